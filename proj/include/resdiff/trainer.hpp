#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "resdiff/dataset.hpp"
#include "resdiff/denoiser.hpp"
#include "resdiff/diffusion.hpp"
#include "resdiff/e2e_stub.hpp"
#include "resdiff/rng.hpp"
#include "resdiff/schedule.hpp"

namespace resdiff {

struct TrainConfig {
    int batch_size = 16;
    int iterations = 1000;
    double learning_rate = 1e-3;
    std::uint64_t seed = 0;
    // Draw t from {1..t_prime} (the accelerated objective); false widens to
    // {1..steps} for ablation.
    bool restrict_t_to_t_prime = true;
    StubSpec stub;

    void validate() const;
};

struct TrainReport {
    std::vector<double> losses; // one entry per iteration, all finite
    double wall_seconds = 0.0;
    DenoiserParams params; // final state; persisting it is the caller's job
};

// SGD on the resnoise regression. Batches are drawn over the id-sorted
// dataset, so two containers holding the same samples in any order train
// identically. Per batch slot the draws are: sample index, then t, then eps.
class Trainer {
public:
    // dataset must outlive the trainer; the cache memoizes stub outputs by
    // sample id across steps.
    Trainer(const TrainConfig& config, std::span<const Sample> dataset,
            const Schedule& schedule, LikelihoodCache& cache);

    // One update of params; returns the batch loss (mean over samples and
    // coordinates). Throws TrainingDivergence on a non-finite loss.
    double step(DenoiserParams& params, Rng& rng);

    int t_max() const { return t_max_; }

private:
    TrainConfig config_;
    const Schedule& schedule_;
    LikelihoodCache& cache_;
    std::vector<const Sample*> order_;
    int t_max_ = 0;
    DenoiserParams grad_;
    DenoiserScratch scratch_;
};

// Fixed-budget run: init params from child stream 0 of config.seed, step
// with child stream 1. Losses are recorded every iteration.
TrainReport train(const TrainConfig& config, const DenoiserConfig& model,
                  std::span<const Sample> dataset, const Schedule& schedule,
                  LikelihoodCache& cache);

// Analytic loss of the all-zeros predictor, averaged over the dataset and
// the uniform t draw: 1 + mean_t coeff(t)^2 * mean_n ||R_n||^2 / size.
// Training is only doing something once the smoothed loss drops below this.
double zero_predictor_loss(const TrainConfig& config, std::span<const Sample> dataset,
                           const Schedule& schedule, LikelihoodCache& cache);

} // namespace resdiff
