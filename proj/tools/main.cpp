#include <cstdint>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "resdiff/checkpoint.hpp"
#include "resdiff/config.hpp"
#include "resdiff/experiment.hpp"
#include "resdiff/sampler.hpp"
#include "resdiff/selfcheck.hpp"
#include "resdiff/tensor_io.hpp"

namespace {

using namespace resdiff;

std::ofstream must_open(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
    return out;
}

ExperimentConfig config_or_default(const std::string& path) {
    if (path.empty()) return ExperimentConfig{};
    return load_config(path);
}

int cmd_schedule(int steps, const std::string& out_path) {
    const Schedule s = build_schedule(steps);
    if (out_path.empty() || out_path == "-") {
        write_schedule_csv(std::cout, s);
    } else {
        auto out = must_open(out_path);
        write_schedule_csv(out, s);
    }
    std::cerr << fmt::format("t_prime = {}, acceleration_bias = {:.6g}\n", s.t_prime,
                             acceleration_bias(s));
    return 0;
}

int cmd_train(const std::string& config_path) {
    const ExperimentConfig config = load_config(config_path);
    const TrainOutput out = run_training(config);
    std::cout << fmt::format("run_dir = {}\ncheckpoint = {}\nfinal_loss = {:.6g}\n"
                             "train_seconds = {:.1f}\n",
                             out.run_dir.string(), out.checkpoint.string(),
                             out.report.losses.back(), out.report.wall_seconds);
    return 0;
}

int cmd_sample(const std::string& checkpoint_path, int count, std::uint64_t seed,
               const std::string& out_dir, const std::string& config_path) {
    ExperimentConfig config = config_or_default(config_path);
    Checkpoint ck = load_checkpoint(checkpoint_path);
    require_checkpoint_matches(config, ck);
    const Schedule schedule = build_schedule(config.schedule_steps);

    DatasetSpec spec = config.dataset;
    spec.count = count;
    const auto dataset = make_dataset(spec);
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    auto trace_csv = must_open(dir / "trace.csv");
    trace_csv << "sample_id,t,rms\n";
    const Rng root(seed);
    LikelihoodCache cache;
    for (const Sample& s : dataset) {
        const Tensor x_hat0 = cache.get_or_compute(s.id, config.stub, s.input, s.mask);
        Rng chain = root.child(1 + s.id);
        const SampleTrace trace =
            sample(x_hat0, s.input, ck.params, schedule, chain, config.eval.snapshot_stride);
        for (const auto& [t, value] : trace.rms) {
            trace_csv << fmt::format("{},{},{:.17g}\n", s.id, t, value);
        }
        save_rsf1(dir / fmt::format("{}_mask.rsf1", s.id), s.mask);
        save_rsf1(dir / fmt::format("{}_input.rsf1", s.id), s.input);
        save_rsf1(dir / fmt::format("{}_xhat0.rsf1", s.id), x_hat0);
        save_rsf1(dir / fmt::format("{}_sample.rsf1", s.id), trace.x0);
        for (const auto& [t, snap] : trace.snapshots) {
            save_rsf1(dir / fmt::format("{}_t{}.rsf1", s.id, t), snap);
        }
    }
    std::cout << fmt::format("wrote {} samples to {}\n", dataset.size(), dir.string());
    return 0;
}

int cmd_eval(const std::string& config_path, const std::string& checkpoint_path) {
    const ExperimentConfig config = load_config(config_path);
    std::optional<std::filesystem::path> checkpoint;
    if (!checkpoint_path.empty()) checkpoint = checkpoint_path;
    const ExperimentSummary s = run_experiment(config, checkpoint);
    std::cout << fmt::format("run_dir = {}\n", s.run_dir.string());
    std::cout << fmt::format("iou_stub_mean = {:.6g}\niou_diffusion_mean = {:.6g}\n",
                             s.iou_stub_mean, s.iou_diffusion_mean);
    std::cout << fmt::format("iou_delta = {:.6g} [{:.6g}, {:.6g}]\n", s.iou_delta.mean,
                             s.iou_delta.lo, s.iou_delta.hi);
    std::cout << fmt::format("mse_stub_mean = {:.6g}\nmse_diffusion_mean = {:.6g}\n",
                             s.mse_stub_mean, s.mse_diffusion_mean);
    std::cout << fmt::format("mse_delta = {:.6g} [{:.6g}, {:.6g}]\n", s.mse_delta.mean,
                             s.mse_delta.lo, s.mse_delta.hi);
    if (s.gap_already_zero) {
        std::cout << "gap already zero: the likelihood output matches the truth exactly\n";
    }
    std::cout << fmt::format("train_seconds = {:.1f}\nsample_seconds = {:.1f}\n",
                             s.train_seconds, s.sample_seconds);
    return 0;
}

int cmd_gradcheck(std::uint64_t seed, int trials) {
    const double worst = gradcheck_max_rel_error(seed, trials);
    const bool ok = worst <= 1e-4;
    std::cout << fmt::format("max relative gradient error {:.3g} over {} trials: {}\n", worst,
                             trials, ok ? "pass" : "FAIL");
    return ok ? 0 : 1;
}

int cmd_oracle_tests(std::uint64_t seed, int steps) {
    const auto results = run_oracle_checks(seed, steps);
    bool all = true;
    for (const auto& r : results) {
        all = all && r.pass;
        std::cout << fmt::format("{:<24} {}  {}\n", r.name, r.pass ? "pass" : "FAIL", r.detail);
    }
    std::cout << (all ? "all checks passed\n" : "SOME CHECKS FAILED\n");
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"residual-shifted diffusion toolkit"};
    app.require_subcommand(1);

    int schedule_steps = 1000;
    std::string schedule_out;
    auto* sc_schedule = app.add_subcommand("schedule", "print or save the noise schedule");
    sc_schedule->add_option("--steps", schedule_steps, "schedule length T");
    sc_schedule->add_option("--out", schedule_out, "CSV path ('-' for stdout)");

    std::string train_config;
    auto* sc_train = app.add_subcommand("train", "train a denoiser from a config file");
    sc_train->add_option("--config", train_config, "key = value config file")->required();

    std::string sample_checkpoint, sample_out, sample_config;
    int sample_n = 8;
    std::uint64_t sample_seed = 1;
    auto* sc_sample = app.add_subcommand("sample", "run the reverse chain from a checkpoint");
    sc_sample->add_option("--checkpoint", sample_checkpoint, "checkpoint file")->required();
    sc_sample->add_option("--n", sample_n, "number of samples");
    sc_sample->add_option("--seed", sample_seed, "chain noise seed");
    sc_sample->add_option("--out", sample_out, "output directory")->required();
    sc_sample->add_option("--config", sample_config, "config file for dataset and stub context");

    std::string eval_config, eval_checkpoint;
    auto* sc_eval = app.add_subcommand("eval", "train (or load) and evaluate on the held-out split");
    sc_eval->add_option("--config", eval_config, "key = value config file")->required();
    sc_eval->add_option("--checkpoint", eval_checkpoint, "skip training, evaluate this checkpoint");

    std::uint64_t gradcheck_seed = 0;
    int gradcheck_trials = 4;
    auto* sc_gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");
    sc_gradcheck->add_option("--seed", gradcheck_seed, "rng seed");
    sc_gradcheck->add_option("--trials", gradcheck_trials, "number of random nets");

    std::uint64_t oracle_seed = 0;
    int oracle_steps = 1000;
    auto* sc_oracle = app.add_subcommand("oracle-tests", "diffusion identity and oracle suite");
    sc_oracle->add_option("--seed", oracle_seed, "rng seed");
    sc_oracle->add_option("--steps", oracle_steps, "schedule length T");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sc_schedule->parsed()) return cmd_schedule(schedule_steps, schedule_out);
        if (sc_train->parsed()) return cmd_train(train_config);
        if (sc_sample->parsed()) {
            return cmd_sample(sample_checkpoint, sample_n, sample_seed, sample_out, sample_config);
        }
        if (sc_eval->parsed()) return cmd_eval(eval_config, eval_checkpoint);
        if (sc_gradcheck->parsed()) return cmd_gradcheck(gradcheck_seed, gradcheck_trials);
        if (sc_oracle->parsed()) return cmd_oracle_tests(oracle_seed, oracle_steps);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
