#pragma once

#include <cstdint>
#include <filesystem>

#include "resdiff/denoiser.hpp"

namespace resdiff {

// Serialized training state: network description + provenance header,
// followed by one RSF1 tensor per layer weight / bias.
struct Checkpoint {
    DenoiserParams params;
    int schedule_steps = 0;
    std::uint64_t seed = 0;
    std::uint64_t iterations = 0;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::filesystem::path& path);

} // namespace resdiff
