#include "resdiff/schedule.hpp"

#include <cmath>
#include <fmt/format.h>
#include <ostream>

namespace resdiff {

namespace {
constexpr double kBetaStart = 1e-4;
constexpr double kBetaEnd = 2e-2;
} // namespace

Schedule build_schedule(int steps) {
    if (steps < 2) {
        throw ConfigError("schedule: steps must be >= 2");
    }
    Schedule s;
    s.steps = steps;
    const std::size_t n = static_cast<std::size_t>(steps);
    s.beta.resize(n);
    s.alpha.resize(n);
    s.alpha_bar.resize(n);
    s.sqrt_alpha_bar.resize(n);
    s.tilde_beta.resize(n);

    double running = 1.0;
    for (int t = 1; t <= steps; ++t) {
        const std::size_t i = static_cast<std::size_t>(t) - 1;
        // Endpoints are pinned to the literals; the interpolated form can be
        // off by an ulp there for step counts whose rounding does not cancel.
        s.beta[i] = t == 1     ? kBetaStart
                    : t == steps ? kBetaEnd
                                 : (kBetaStart * static_cast<double>(steps - t) +
                                    kBetaEnd * static_cast<double>(t - 1)) /
                                       static_cast<double>(steps - 1);
        s.alpha[i] = 1.0 - s.beta[i];
        running *= s.alpha[i];
        s.alpha_bar[i] = running;
        s.sqrt_alpha_bar[i] = std::sqrt(running);
        s.tilde_beta[i] =
            t == 1 ? 0.0 : (1.0 - s.alpha_bar[i - 1]) / (1.0 - s.alpha_bar[i]) * s.beta[i];
    }
    s.t_prime = compute_t_prime(s);
    return s;
}

int compute_t_prime(const Schedule& s) {
    if (s.steps < 1 || s.sqrt_alpha_bar.size() != static_cast<std::size_t>(s.steps)) {
        throw ConfigError("schedule: arrays not populated");
    }
    int best = 1;
    double best_dist = std::fabs(s.sqrt_alpha_bar[0] - 0.5);
    for (int t = 2; t <= s.steps; ++t) {
        const double d = std::fabs(s.sqrt_alpha_bar[static_cast<std::size_t>(t) - 1] - 0.5);
        if (d < best_dist) {
            best_dist = d;
            best = t;
        }
    }
    return best;
}

double acceleration_bias(const Schedule& s) {
    return std::fabs(2.0 * s.sqrt_alpha_bar_at(s.t_prime) - 1.0);
}

void write_schedule_csv(std::ostream& out, const Schedule& s) {
    out << "t,beta,alpha,alpha_bar,sqrt_alpha_bar,tilde_beta\n";
    for (int t = 1; t <= s.steps; ++t) {
        out << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", t, s.beta_at(t),
                           s.alpha_at(t), s.alpha_bar_at(t), s.sqrt_alpha_bar_at(t),
                           s.tilde_beta_at(t));
    }
    out << fmt::format("t_prime,{},acceleration_bias,{:.17g}\n", s.t_prime,
                       acceleration_bias(s));
}

} // namespace resdiff
