#include "doctest.h"

#include <cmath>

#include "resdiff/selfcheck.hpp"

using namespace resdiff;

namespace {
// Frozen 50-digit-precision values, computed before the implementation.
constexpr int kTPrime1000 = 368;
constexpr double kBias1000 = 0.00045534590937743559401;
} // namespace

TEST_CASE("the extended-precision schedule oracle matches its frozen values") {
    const ScheduleOracle oracle = oracle_schedule(1000);
    REQUIRE(oracle.sqrt_alpha_bar.size() == 1000);
    CHECK(oracle.t_prime == kTPrime1000);
    CHECK(oracle.acceleration_bias == doctest::Approx(kBias1000).epsilon(1e-11));
    // Entry 0 holds t = 1.
    CHECK(oracle.sqrt_alpha_bar[0] == doctest::Approx(std::sqrt(1.0 - 1e-4)).epsilon(1e-15));
    for (std::size_t i = 1; i < oracle.sqrt_alpha_bar.size(); ++i) {
        CHECK(oracle.sqrt_alpha_bar[i] < oracle.sqrt_alpha_bar[i - 1]);
    }
}

TEST_CASE("ulp budget error is zero on identical tensors and scales linearly") {
    const Tensor a({3}, {1.0, -2.0, 0.5});
    const Tensor budget({3}, {1.0, 1.0, 1.0});
    CHECK(ulp_budget_error(a, a, budget) == 0.0);
    Tensor b = a;
    b[0] = std::nextafter(b[0], 2.0);
    const double eps = 2.220446049250313e-16;
    CHECK(ulp_budget_error(a, b, budget) == doctest::Approx((b[0] - a[0]) / eps).epsilon(1e-12));
}

TEST_CASE("every oracle check passes on the reference schedule") {
    const std::vector<CheckResult> results = run_oracle_checks(0, 1000);
    REQUIRE(!results.empty());
    for (const CheckResult& r : results) {
        INFO(r.name << ": " << r.detail);
        CHECK(r.pass);
        CHECK(!r.name.empty());
        CHECK(!r.detail.empty());
    }
}

TEST_CASE("analytic gradients agree with central differences") {
    CHECK(gradcheck_max_rel_error(0, 4) <= 1e-4);
}
