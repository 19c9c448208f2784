#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <unordered_map>

#include "resdiff/tensor.hpp"

namespace resdiff {

enum class StubKind { identity, affine_blur };

// Stand-in for a pretrained end-to-end model. identity returns the ground
// truth unchanged; affine_blur manufactures a controlled residual by
// corrupting it: clamp(gain * blur(x0) + bias, -1, 1) with a replicate-padded
// box filter. Deterministic per sample: no fresh randomness.
struct StubSpec {
    StubKind kind = StubKind::identity;
    double gain = 1.0;
    double bias = 0.0;
    int kernel = 1; // odd, in {1, 3, 5}

    void validate() const;
};

Tensor stub_apply(const StubSpec& spec, const Tensor& input, const Tensor& x0);

// Memoizes likelihood outputs per sample id; a hit is bitwise identical to a
// fresh evaluation. Optionally persisted as a directory of RSF1 files keyed
// by id.
class LikelihoodCache {
public:
    LikelihoodCache() = default;
    explicit LikelihoodCache(std::filesystem::path dir);

    Tensor get_or_compute(std::uint64_t id, const StubSpec& spec, const Tensor& input,
                          const Tensor& x0);
    std::size_t size() const;

private:
    std::optional<std::filesystem::path> dir_;
    mutable std::mutex mutex_;
    std::unordered_map<std::uint64_t, Tensor> entries_;

    std::filesystem::path file_for(std::uint64_t id) const;
};

} // namespace resdiff
