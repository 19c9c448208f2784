#pragma once

#include <filesystem>
#include <optional>

#include "resdiff/checkpoint.hpp"
#include "resdiff/config.hpp"
#include "resdiff/metrics.hpp"
#include "resdiff/trainer.hpp"

namespace resdiff {

// ConfigError unless the checkpoint's schedule length and network shape
// agree with the config.
void require_checkpoint_matches(const ExperimentConfig& config, const Checkpoint& ck);

struct TrainOutput {
    std::filesystem::path run_dir;
    std::filesystem::path checkpoint;
    TrainReport report;
};

struct ExperimentSummary {
    std::filesystem::path run_dir;
    double iou_stub_mean = 0.0;
    double iou_diffusion_mean = 0.0;
    double mse_stub_mean = 0.0;
    double mse_diffusion_mean = 0.0;
    BootstrapCi iou_delta; // diffusion minus stub, want > 0
    BootstrapCi mse_delta; // diffusion minus stub, want < 0
    bool gap_already_zero = false;
    double train_seconds = 0.0;
    double sample_seconds = 0.0;
};

// Train on the first train_count samples; write config.txt, schedule.csv,
// losses.csv, checkpoint.rdk and timing.txt under out_dir/<run_dir_name>.
TrainOutput run_training(const ExperimentConfig& config);

// Full run: train (or load `checkpoint`), sample every held-out input, write
// metrics.csv, summary.csv and the per-sample tensors. Timing goes to
// timing.txt so the CSVs are bitwise stable across reruns of one config.
ExperimentSummary run_experiment(const ExperimentConfig& config,
                                 const std::optional<std::filesystem::path>& checkpoint = {});

} // namespace resdiff
