#pragma once

#include <utility>
#include <vector>

#include "resdiff/denoiser.hpp"
#include "resdiff/diffusion.hpp"
#include "resdiff/rng.hpp"
#include "resdiff/schedule.hpp"
#include "resdiff/tensor.hpp"

namespace resdiff {

struct SampleTrace {
    Tensor x_hat0; // likelihood output the chain starts from
    Tensor x_init; // state at t_prime
    std::vector<std::pair<int, Tensor>> snapshots; // t strictly decreasing
    Tensor x0; // final estimate
    std::vector<std::pair<int, double>> rms; // (t, rms of state), t_prime down to 0
};

// State the reverse chain starts from, built without the ground truth:
//   (1 - sqrt(abar_{t_prime})) x_hat0 + sqrt(1 - abar_{t_prime}) eps
Tensor init_x_tprime(const Tensor& x_hat0, const Tensor& eps, const Schedule& s);

// One reverse transition for 2 <= t <= t_prime:
//   mu_from_resnoise(x_t, predicted resnoise, t) + sqrt(tilde_beta_t) z
Tensor reverse_step(const Tensor& x_t, const Tensor& cond, int t, const DenoiserParams& params,
                    const Tensor& z, const Schedule& s, DenoiserScratch* scratch = nullptr);

// Full chain: init at t_prime, noisy steps down to t=2, one deterministic
// step at t=1. Exactly t_prime denoiser evaluations. Draw order: eps for the
// init, then z per noisy step. snapshot_stride > 0 records x_t whenever
// t % stride == 0.
SampleTrace sample(const Tensor& x_hat0, const Tensor& cond, const DenoiserParams& params,
                   const Schedule& s, Rng& rng, int snapshot_stride = 0);

} // namespace resdiff
