#include "resdiff/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fmt/format.h>

#include "resdiff/error.hpp"

namespace resdiff {
namespace {

void zero_like(DenoiserParams& grad) {
    for (auto& layer : grad.layers) {
        std::fill(layer.w.begin(), layer.w.end(), 0.0);
        std::fill(layer.b.begin(), layer.b.end(), 0.0);
    }
}

} // namespace

void TrainConfig::validate() const {
    if (batch_size < 1) throw ConfigError("train: batch_size must be at least 1");
    if (iterations < 1) throw ConfigError("train: iterations must be at least 1");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("train: learning_rate must be finite and positive");
    }
    stub.validate();
}

Trainer::Trainer(const TrainConfig& config, std::span<const Sample> dataset,
                 const Schedule& schedule, LikelihoodCache& cache)
    : config_(config), schedule_(schedule), cache_(cache) {
    config_.validate();
    if (dataset.empty()) throw ConfigError("train: dataset is empty");
    order_.reserve(dataset.size());
    for (const Sample& s : dataset) order_.push_back(&s);
    std::sort(order_.begin(), order_.end(),
              [](const Sample* a, const Sample* b) { return a->id < b->id; });
    t_max_ = config_.restrict_t_to_t_prime ? schedule_.t_prime : schedule_.steps;
}

double Trainer::step(DenoiserParams& params, Rng& rng) {
    if (grad_.layers.size() != params.layers.size()) {
        grad_ = DenoiserParams::zeros(params.config);
    } else {
        zero_like(grad_);
    }
    double loss_acc = 0.0;
    for (int slot = 0; slot < config_.batch_size; ++slot) {
        const auto idx = rng.uniform_int(order_.size());
        const Sample& sample = *order_[idx];
        const int t = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(t_max_)));
        const Tensor eps = gaussian(rng, sample.mask.shape());
        const Tensor x_hat0 = cache_.get_or_compute(sample.id, config_.stub, sample.input, sample.mask);
        const Tensor r = residual(x_hat0, sample.mask);
        const ForwardSample fwd = q_sample_closed(sample.mask, r, t, eps, schedule_);
        loss_acc += accumulate_loss_and_grad(params, fwd.x_t, sample.input, t, fwd.resnoise,
                                             grad_, scratch_);
    }
    const double loss = loss_acc / static_cast<double>(config_.batch_size);
    if (!std::isfinite(loss)) {
        throw TrainingDivergence(fmt::format("train: non-finite batch loss {}", loss));
    }
    apply_sgd(params, grad_, config_.learning_rate, 1.0 / static_cast<double>(config_.batch_size));
    return loss;
}

TrainReport train(const TrainConfig& config, const DenoiserConfig& model,
                  std::span<const Sample> dataset, const Schedule& schedule,
                  LikelihoodCache& cache) {
    const auto start = std::chrono::steady_clock::now();
    const Rng root(config.seed);
    Rng init_rng = root.child(0);
    Rng step_rng = root.child(1);
    TrainReport report;
    report.params = DenoiserParams::init(model, init_rng);
    Trainer trainer(config, dataset, schedule, cache);
    report.losses.reserve(static_cast<std::size_t>(config.iterations));
    for (int it = 0; it < config.iterations; ++it) {
        report.losses.push_back(trainer.step(report.params, step_rng));
    }
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

double zero_predictor_loss(const TrainConfig& config, std::span<const Sample> dataset,
                           const Schedule& schedule, LikelihoodCache& cache) {
    config.validate();
    if (dataset.empty()) throw ConfigError("zero_predictor_loss: dataset is empty");
    const int t_max = config.restrict_t_to_t_prime ? schedule.t_prime : schedule.steps;
    double coeff_sq = 0.0;
    for (int t = 1; t <= t_max; ++t) {
        const double c = resnoise_coeff(t, schedule);
        coeff_sq += c * c;
    }
    coeff_sq /= static_cast<double>(t_max);
    double r_sq = 0.0;
    for (const Sample& s : dataset) {
        const Tensor x_hat0 = cache.get_or_compute(s.id, config.stub, s.input, s.mask);
        const Tensor r = residual(x_hat0, s.mask);
        double acc = 0.0;
        for (double v : r.data()) acc += v * v;
        r_sq += acc / static_cast<double>(r.size());
    }
    r_sq /= static_cast<double>(dataset.size());
    return 1.0 + coeff_sq * r_sq;
}

} // namespace resdiff
