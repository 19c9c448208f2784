#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "resdiff/diffusion.hpp"
#include "resdiff/schedule.hpp"
#include "resdiff/tensor.hpp"

namespace resdiff {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail; // measured numbers, human readable
};

// Extended-precision recomputation of the schedule quantities.
struct ScheduleOracle {
    std::vector<double> sqrt_alpha_bar; // rounded from long double
    int t_prime = 0;
    double acceleration_bias = 0.0;
};
ScheduleOracle oracle_schedule(int steps);

// Max elementwise |a - b| / (eps * budget) where budget sums the magnitudes
// of every term entering either expression. "Exact to k ulp" is asserted as
// a forward error of at most k of these units.
double ulp_budget_error(const Tensor& a, const Tensor& b, const Tensor& budget);

// Reverse chain driven by the resnoise implied by the current state and the
// ground truth (test oracle). z = 0 throughout.
Tensor oracle_denoise(const Tensor& x0, const Tensor& x_hat0, const Tensor& eps_init,
                      const Schedule& s);

CheckResult check_schedule_oracle(int steps);
CheckResult check_two_form_equality(const Schedule& s, std::uint64_t seed, int instances,
                                    double ulps = 4.0);
CheckResult check_posterior_exchange(const Schedule& s, std::uint64_t seed, int instances,
                                     double ulps = 4.0);
CheckResult check_vanilla_reduction(const Schedule& s, std::uint64_t seed, int instances);
CheckResult check_init_bias(const Schedule& s, std::uint64_t seed, int instances,
                            double ulps = 4.0);
// Iterated one-step forward vs closed-form moments at t in {1, t'/2, t'},
// within 5 standard errors.
CheckResult check_markov_moments(const Schedule& s, std::uint64_t seed, int samples);
// 1-D quadrature Bayes posterior vs the closed-form mean and variance.
CheckResult check_posterior_quadrature(const Schedule& s, std::uint64_t seed, int t_count,
                                       double tol = 1e-6);
CheckResult check_oracle_denoising(const Schedule& s, std::uint64_t seed, double tol = 1e-6);

std::vector<CheckResult> run_oracle_checks(std::uint64_t seed, int steps);

// Analytic vs central-difference gradients on randomized small nets.
double gradcheck_max_rel_error(std::uint64_t seed, int trials);

} // namespace resdiff
