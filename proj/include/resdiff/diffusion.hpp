#pragma once

#include "resdiff/schedule.hpp"
#include "resdiff/tensor.hpp"

namespace resdiff {

// One forward draw at step t: the noised state, the Gaussian draw that
// produced it, and the training target for that draw. All three share the
// shape of the clean input; resnoise equals eps exactly when the residual
// is zero.
struct ForwardSample {
    Tensor x_t;
    int t = 0;
    Tensor eps;
    Tensor resnoise;
};

// x_hat0 - x0, the deterministic gap the reverse process has to close.
Tensor residual(const Tensor& x_hat0, const Tensor& x0);

// One Markov forward step:
//   sqrt(alpha_t) x_{t-1} + (1 - sqrt(alpha_t)) r + sqrt(beta_t) eps
Tensor q_sample_step(const Tensor& x_prev, const Tensor& r, int t, const Tensor& eps,
                     const Schedule& s);

// Closed form of t iterated steps:
//   sqrt(abar_t) x0 + (1 - sqrt(abar_t)) r + sqrt(1 - abar_t) eps
// The returned sample carries the matching resnoise target.
ForwardSample q_sample_closed(const Tensor& x0, const Tensor& r, int t, const Tensor& eps,
                              const Schedule& s);

// Same quantity with the residual substituted out:
//   (2 sqrt(abar_t) - 1) x0 + (1 - sqrt(abar_t)) x_hat0 + sqrt(1 - abar_t) eps
Tensor q_sample_simplified(const Tensor& x0, const Tensor& x_hat0, int t, const Tensor& eps,
                           const Schedule& s);

// (1 - sqrt(alpha_t)) sqrt(1 - abar_t) / beta_t, the residual weight inside
// the resnoise target. Finite and positive for every valid t.
double resnoise_coeff(int t, const Schedule& s);

// eps + resnoise_coeff(t) * r, the denoiser's regression target.
Tensor resnoise_target(const Tensor& eps, const Tensor& r, int t, const Schedule& s);

// Forward-noised likelihood output with the same Gaussian draw:
//   sqrt(abar_t) x_hat0 + sqrt(1 - abar_t) eps
Tensor q_sample_hat(const Tensor& x_hat0, int t, const Tensor& eps, const Schedule& s);

// Reverse conditional mean given the clean input (test oracle; the sampler
// itself goes through mu_from_resnoise). Requires t >= 2:
//   (sqrt(abar_{t-1}) beta_t / (1 - abar_t)) (x0 - r)
//   + (sqrt(alpha_t) (1 - abar_{t-1}) / (1 - abar_t)) (x_t - r) + r
Tensor posterior_mean(const Tensor& x_t, const Tensor& x0, const Tensor& r, int t,
                      const Schedule& s);

// Reverse mean from a resnoise estimate:
//   (1 / sqrt(alpha_t)) (x_t - (beta_t / sqrt(1 - abar_t)) eps_resnoise)
Tensor mu_from_resnoise(const Tensor& x_t, const Tensor& eps_resnoise, int t,
                        const Schedule& s);

} // namespace resdiff
