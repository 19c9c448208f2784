#pragma once

#include <iosfwd>
#include <vector>

#include "resdiff/error.hpp"

namespace resdiff {

// Per-step diffusion constants. Index convention: vectors hold steps
// t = 1..steps at positions 0..steps-1; use the *_at accessors.
//
// beta ramps linearly from 1e-4 at t=1 to 2e-2 at t=steps. alpha = 1 - beta,
// alpha_bar is the running product of alpha, tilde_beta is the reverse
// conditional variance (0 at t=1 so the final step is deterministic).
// t_prime is the acceleration step: the t whose sqrt(alpha_bar) is closest
// to 1/2, ties broken toward the smaller index.
struct Schedule {
    int steps = 0;
    std::vector<double> beta;
    std::vector<double> alpha;
    std::vector<double> alpha_bar;
    std::vector<double> sqrt_alpha_bar;
    std::vector<double> tilde_beta;
    int t_prime = 0;

    double beta_at(int t) const { return beta[index(t)]; }
    double alpha_at(int t) const { return alpha[index(t)]; }
    double alpha_bar_at(int t) const { return alpha_bar[index(t)]; }
    double sqrt_alpha_bar_at(int t) const { return sqrt_alpha_bar[index(t)]; }
    double tilde_beta_at(int t) const { return tilde_beta[index(t)]; }

    // alpha_bar at t-1, with the empty product 1 at t=1.
    double alpha_bar_prev(int t) const {
        index(t);
        return t == 1 ? 1.0 : alpha_bar[static_cast<std::size_t>(t) - 2];
    }

    std::size_t index(int t) const {
        if (t < 1 || t > steps) {
            throw ShapeError("schedule: step out of range");
        }
        return static_cast<std::size_t>(t) - 1;
    }
};

Schedule build_schedule(int steps);

// argmin over t of |sqrt(alpha_bar_t) - 1/2|, smaller index on ties.
int compute_t_prime(const Schedule& s);

// |2 sqrt(alpha_bar_{t_prime}) - 1|: the magnitude of the ground-truth
// coefficient dropped when initializing at t_prime.
double acceleration_bias(const Schedule& s);

// CSV with columns t,beta,alpha,alpha_bar,sqrt_alpha_bar,tilde_beta and a
// footer row carrying t_prime and acceleration_bias.
void write_schedule_csv(std::ostream& out, const Schedule& s);

} // namespace resdiff
