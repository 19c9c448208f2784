#include "resdiff/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <span>
#include <vector>

#include "resdiff/checkpoint.hpp"
#include "resdiff/error.hpp"
#include "resdiff/sampler.hpp"
#include "resdiff/schedule.hpp"
#include "resdiff/tensor_io.hpp"

namespace resdiff {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
    return out;
}

std::filesystem::path prepare_run_dir(const ExperimentConfig& config) {
    const auto dir = config.out_dir / run_dir_name(config);
    std::filesystem::create_directories(dir);
    std::filesystem::remove(dir / "timing.txt");
    auto cfg = open_out(dir / "config.txt");
    cfg << canonical_config(config);
    return dir;
}

void write_losses_csv(const std::filesystem::path& path, const std::vector<double>& losses) {
    auto out = open_out(path);
    out << "iteration,loss\n";
    for (std::size_t i = 0; i < losses.size(); ++i) {
        out << fmt::format("{},{:.17g}\n", i + 1, losses[i]);
    }
}

void append_timing(const std::filesystem::path& dir, std::string_view key, double seconds) {
    std::ofstream out(dir / "timing.txt", std::ios::app);
    out << fmt::format("{} = {:.3f}\n", key, seconds);
}

TrainOutput train_into_dir(const ExperimentConfig& config, const std::filesystem::path& dir) {
    const Schedule schedule = build_schedule(config.schedule_steps);
    {
        auto out = open_out(dir / "schedule.csv");
        write_schedule_csv(out, schedule);
    }
    const auto dataset = make_dataset(config.dataset_spec());
    const std::span<const Sample> train_split(dataset.data(),
                                              static_cast<std::size_t>(config.train_count));
    LikelihoodCache cache;
    TrainOutput out;
    out.run_dir = dir;
    out.report = train(config.train_config(), config.model_config(), train_split, schedule, cache);
    write_losses_csv(dir / "losses.csv", out.report.losses);
    out.checkpoint = dir / "checkpoint.rdk";
    Checkpoint ck;
    ck.params = out.report.params;
    ck.schedule_steps = config.schedule_steps;
    ck.seed = config.seed;
    ck.iterations = static_cast<std::uint64_t>(config.train.iterations);
    save_checkpoint(out.checkpoint, ck);
    append_timing(dir, "train_seconds", out.report.wall_seconds);
    return out;
}

} // namespace

void require_checkpoint_matches(const ExperimentConfig& config, const Checkpoint& ck) {
    if (ck.schedule_steps != config.schedule_steps) {
        throw ConfigError(fmt::format("checkpoint was trained with schedule.steps = {}, config has {}",
                                      ck.schedule_steps, config.schedule_steps));
    }
    const auto want = config.model_config();
    const auto& have = ck.params.config;
    if (have.x_dim != want.x_dim || have.cond_dim != want.cond_dim ||
        have.hidden != want.hidden || have.time_emb.dim != want.time_emb.dim) {
        throw ConfigError("checkpoint network shape does not match the config");
    }
}

TrainOutput run_training(const ExperimentConfig& config) {
    config.validate();
    return train_into_dir(config, prepare_run_dir(config));
}

ExperimentSummary run_experiment(const ExperimentConfig& config,
                                 const std::optional<std::filesystem::path>& checkpoint) {
    config.validate();
    const auto dir = prepare_run_dir(config);
    ExperimentSummary summary;
    summary.run_dir = dir;

    const Schedule schedule = build_schedule(config.schedule_steps);
    DenoiserParams params;
    if (checkpoint) {
        Checkpoint ck = load_checkpoint(*checkpoint);
        require_checkpoint_matches(config, ck);
        params = std::move(ck.params);
        auto out = open_out(dir / "schedule.csv");
        write_schedule_csv(out, schedule);
    } else {
        TrainOutput trained = train_into_dir(config, dir);
        summary.train_seconds = trained.report.wall_seconds;
        params = std::move(trained.report.params);
    }

    const auto dataset = make_dataset(config.dataset_spec());
    const std::span<const Sample> eval_split(dataset.data() + config.train_count,
                                             static_cast<std::size_t>(config.eval_count));
    LikelihoodCache cache;
    const auto tensor_dir = dir / "tensors";
    std::filesystem::create_directories(tensor_dir);

    std::vector<double> iou_stub, iou_diff, mse_stub, mse_diff, d_iou, d_mse;
    double max_residual = 0.0;
    const Rng eval_root(config.eval.sample_seed);
    const auto start = std::chrono::steady_clock::now();
    auto metrics = open_out(dir / "metrics.csv");
    metrics << "sample_id,mse_stub,mse_diffusion,iou_stub,iou_diffusion\n";
    for (const Sample& s : eval_split) {
        const Tensor x_hat0 = cache.get_or_compute(s.id, config.stub, s.input, s.mask);
        max_residual = std::max(max_residual, max_abs(residual(x_hat0, s.mask)));
        Rng chain = eval_root.child(1 + s.id);
        const SampleTrace trace =
            sample(x_hat0, s.input, params, schedule, chain, config.eval.snapshot_stride);
        const double ms = mse(x_hat0, s.mask);
        const double md = mse(trace.x0, s.mask);
        const double is = iou(x_hat0, s.mask);
        const double id = iou(trace.x0, s.mask);
        metrics << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g}\n", s.id, ms, md, is, id);
        mse_stub.push_back(ms);
        mse_diff.push_back(md);
        iou_stub.push_back(is);
        iou_diff.push_back(id);
        d_iou.push_back(id - is);
        d_mse.push_back(md - ms);
        save_rsf1(tensor_dir / fmt::format("{}_mask.rsf1", s.id), s.mask);
        save_rsf1(tensor_dir / fmt::format("{}_input.rsf1", s.id), s.input);
        save_rsf1(tensor_dir / fmt::format("{}_xhat0.rsf1", s.id), x_hat0);
        save_rsf1(tensor_dir / fmt::format("{}_sample.rsf1", s.id), trace.x0);
        for (const auto& [t, snap] : trace.snapshots) {
            save_rsf1(tensor_dir / fmt::format("{}_t{}.rsf1", s.id, t), snap);
        }
    }
    summary.sample_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    append_timing(dir, "sample_seconds", summary.sample_seconds);

    summary.iou_stub_mean = mean_of(iou_stub);
    summary.iou_diffusion_mean = mean_of(iou_diff);
    summary.mse_stub_mean = mean_of(mse_stub);
    summary.mse_diffusion_mean = mean_of(mse_diff);
    // Draw order: one bootstrap stream, IoU deltas first, then MSE deltas.
    Rng boot = eval_root.child(0);
    summary.iou_delta = bootstrap_mean_ci(d_iou, config.eval.bootstrap_resamples, boot);
    summary.mse_delta = bootstrap_mean_ci(d_mse, config.eval.bootstrap_resamples, boot);
    summary.gap_already_zero = max_residual == 0.0;

    auto sum = open_out(dir / "summary.csv");
    sum << "key,value\n";
    const auto row = [&](std::string_view key, double v) {
        sum << fmt::format("{},{:.17g}\n", key, v);
    };
    row("iou_stub_mean", summary.iou_stub_mean);
    row("iou_diffusion_mean", summary.iou_diffusion_mean);
    row("iou_delta_mean", summary.iou_delta.mean);
    row("iou_delta_lo", summary.iou_delta.lo);
    row("iou_delta_hi", summary.iou_delta.hi);
    row("mse_stub_mean", summary.mse_stub_mean);
    row("mse_diffusion_mean", summary.mse_diffusion_mean);
    row("mse_delta_mean", summary.mse_delta.mean);
    row("mse_delta_lo", summary.mse_delta.lo);
    row("mse_delta_hi", summary.mse_delta.hi);
    sum << fmt::format("gap_already_zero,{}\n", summary.gap_already_zero ? 1 : 0);
    return summary;
}

} // namespace resdiff
