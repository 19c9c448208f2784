#include "doctest.h"

#include <cmath>
#include <sstream>

#include "resdiff/schedule.hpp"

using namespace resdiff;

// Independently computed at 50-digit precision and frozen before the
// implementation existed.
namespace {
constexpr double kSqrtAbar10_T10 = 0.95065210048220953356;
constexpr double kBias_T10 = 0.90130420096441906711;
constexpr double kBias_T100 = 0.20592412374160906898;
constexpr double kSqrtAbarTPrime_T1000 = 0.5002276729546887178;
constexpr double kBias_T1000 = 0.00045534590937743559401;
constexpr double kBias_T10000 = 0.00016973076701488468413;
} // namespace

TEST_CASE("steps below two are rejected") {
    CHECK_THROWS_AS(build_schedule(1), ConfigError);
    CHECK_THROWS_AS(build_schedule(0), ConfigError);
    CHECK_THROWS_AS(build_schedule(-5), ConfigError);
}

TEST_CASE("ramp endpoints are exact") {
    const Schedule s = build_schedule(1000);
    CHECK(s.beta_at(1) == 1e-4);
    CHECK(s.beta_at(1000) == 2e-2);
    const Schedule tiny = build_schedule(2);
    CHECK(tiny.beta_at(1) == 1e-4);
    CHECK(tiny.beta_at(2) == 2e-2);
    // Step counts where the interpolated ramp rounds an ulp off the literals.
    for (int steps : {3, 137, 400, 777, 4096}) {
        const Schedule other = build_schedule(steps);
        CHECK(other.beta_at(1) == 1e-4);
        CHECK(other.beta_at(steps) == 2e-2);
    }
}

TEST_CASE("ramp is linear and monotone") {
    const Schedule s = build_schedule(1000);
    for (int t = 2; t <= 1000; ++t) CHECK(s.beta_at(t) > s.beta_at(t - 1));
    // Midpoint pair of the ramp averages to the midpoint of the endpoints.
    CHECK(0.5 * (s.beta_at(500) + s.beta_at(501)) ==
          doctest::Approx(0.01005).epsilon(1e-15));
}

TEST_CASE("alpha and alpha_bar invariants") {
    const Schedule s = build_schedule(1000);
    for (int t = 1; t <= 1000; ++t) {
        CHECK(s.alpha_at(t) == 1.0 - s.beta_at(t));
        CHECK(s.alpha_at(t) > 0.0);
        CHECK(s.alpha_at(t) < 1.0);
        CHECK(s.sqrt_alpha_bar_at(t) == std::sqrt(s.alpha_bar_at(t)));
    }
    for (int t = 2; t <= 1000; ++t) CHECK(s.alpha_bar_at(t) < s.alpha_bar_at(t - 1));
    CHECK(s.alpha_bar_prev(1) == 1.0);
    CHECK(s.alpha_bar_prev(2) == s.alpha_bar_at(1));
}

TEST_CASE("tilde_beta starts at zero then follows the posterior variance") {
    const Schedule s = build_schedule(1000);
    CHECK(s.tilde_beta_at(1) == 0.0);
    for (int t : {2, 368, 1000}) {
        const double expected =
            (1.0 - s.alpha_bar_prev(t)) / (1.0 - s.alpha_bar_at(t)) * s.beta_at(t);
        CHECK(s.tilde_beta_at(t) == expected);
        CHECK(s.tilde_beta_at(t) > 0.0);
        CHECK(s.tilde_beta_at(t) < s.beta_at(t));
    }
}

TEST_CASE("accessor range checks") {
    const Schedule s = build_schedule(10);
    CHECK_THROWS_AS(s.beta_at(0), ShapeError);
    CHECK_THROWS_AS(s.beta_at(11), ShapeError);
    CHECK_THROWS_AS(s.alpha_bar_prev(0), ShapeError);
}

TEST_CASE("acceleration step against frozen oracle") {
    const Schedule s = build_schedule(1000);
    CHECK(s.t_prime == 368);
    CHECK(s.sqrt_alpha_bar_at(368) ==
          doctest::Approx(kSqrtAbarTPrime_T1000).epsilon(1e-12));
    CHECK(acceleration_bias(s) == doctest::Approx(kBias_T1000).epsilon(1e-9));
    // Local optimality around the argmin.
    const double here = std::fabs(s.sqrt_alpha_bar_at(368) - 0.5);
    CHECK(here <= std::fabs(s.sqrt_alpha_bar_at(367) - 0.5));
    CHECK(here <= std::fabs(s.sqrt_alpha_bar_at(369) - 0.5));
}

TEST_CASE("short schedules never approach one half") {
    const Schedule s = build_schedule(10);
    CHECK(s.t_prime == 10);
    CHECK(s.sqrt_alpha_bar_at(10) == doctest::Approx(kSqrtAbar10_T10).epsilon(1e-13));
    CHECK(acceleration_bias(s) == doctest::Approx(kBias_T10).epsilon(1e-13));
}

TEST_CASE("acceleration bias shrinks as steps grow") {
    const double b100 = acceleration_bias(build_schedule(100));
    const double b1000 = acceleration_bias(build_schedule(1000));
    const double b10000 = acceleration_bias(build_schedule(10000));
    CHECK(b100 == doctest::Approx(kBias_T100).epsilon(1e-11));
    CHECK(b10000 == doctest::Approx(kBias_T10000).epsilon(1e-7));
    CHECK(b100 > b1000);
    CHECK(b1000 > b10000);
    CHECK(b1000 < 1e-2);
    CHECK(build_schedule(100).t_prime == 100);
    CHECK(build_schedule(10000).t_prime == 1131);
}

TEST_CASE("csv dump carries every column and the footer") {
    const Schedule s = build_schedule(10);
    std::stringstream out;
    write_schedule_csv(out, s);
    std::string line;
    std::getline(out, line);
    CHECK(line == "t,beta,alpha,alpha_bar,sqrt_alpha_bar,tilde_beta");
    int rows = 0;
    std::string last;
    while (std::getline(out, line)) {
        if (!line.empty()) {
            last = line;
            ++rows;
        }
    }
    CHECK(rows == 11); // 10 steps + footer
    CHECK(last.find("t_prime") != std::string::npos);
    CHECK(last.find("10") != std::string::npos);
}
