#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "resdiff/dataset.hpp"
#include "resdiff/denoiser.hpp"
#include "resdiff/e2e_stub.hpp"
#include "resdiff/trainer.hpp"

namespace resdiff {

struct EvalConfig {
    std::uint64_t sample_seed = 1;
    int bootstrap_resamples = 1000;
    int snapshot_stride = 0; // 0 disables snapshots

    void validate() const;
};

// Everything a run needs, parsed from a flat `key = value` file. Unknown or
// duplicate keys are errors, as are malformed values; every key has a
// default, so the empty file is a valid config.
struct ExperimentConfig {
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = "runs";
    int schedule_steps = 1000;
    DatasetSpec dataset; // count is derived from the two split sizes
    int train_count = 512;
    int eval_count = 128;
    StubSpec stub;
    std::vector<int> hidden = {256, 256, 256};
    int time_dim = 32;
    TrainConfig train;
    EvalConfig eval;

    ExperimentConfig();

    void validate() const;
    DenoiserConfig model_config() const;
    // TrainConfig with the shared stub and master seed filled in.
    TrainConfig train_config() const;
    DatasetSpec dataset_spec() const; // with count = train_count + eval_count
};

ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Sorted key = value dump of every semantic field (out_dir excluded: it does
// not affect any computed number). Equal canonical text means equal results.
std::string canonical_config(const ExperimentConfig& config);

std::uint64_t config_hash(const ExperimentConfig& config);

// "<16 hex digits of config_hash>-s<seed>", the run directory leaf name.
std::string run_dir_name(const ExperimentConfig& config);

} // namespace resdiff
