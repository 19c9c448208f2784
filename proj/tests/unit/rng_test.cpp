#include "doctest.h"

#include <cmath>

#include "resdiff/rng.hpp"
#include "resdiff/stats.hpp"

using namespace resdiff;

TEST_CASE("same seed gives identical draws") {
    Rng a(7);
    Rng b(7);
    const Tensor ta = gaussian(a, {4});
    const Tensor tb = gaussian(b, {4});
    for (std::size_t i = 0; i < 4; ++i) CHECK(ta[i] == tb[i]);
    CHECK(a.uniform() == b.uniform());
    CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge") {
    Rng a(1);
    Rng b(2);
    bool any_diff = false;
    for (int i = 0; i < 8; ++i) any_diff = any_diff || a.next_u64() != b.next_u64();
    CHECK(any_diff);
}

TEST_CASE("invalid shapes are rejected") {
    Rng rng(0);
    CHECK_THROWS_AS(gaussian(rng, {0}), ShapeError);
    CHECK_THROWS_AS(gaussian(rng, {}), ShapeError);
    CHECK_THROWS_AS(gaussian(rng, {3, 0}), ShapeError);
}

TEST_CASE("uniform range and integer rejection bound") {
    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    for (int i = 0; i < 1000; ++i) CHECK(rng.uniform_int(7) < 7);
    CHECK(rng.uniform_int(1) == 0);
}

TEST_CASE("gaussian fill pairs are order-stable") {
    // A shape-[3] fill must be a prefix of the shape-[4] fill: pairs are
    // drawn in order and the trailing odd element keeps the first half.
    Rng a(5);
    Rng b(5);
    const Tensor three = gaussian(a, {3});
    const Tensor four = gaussian(b, {4});
    for (std::size_t i = 0; i < 3; ++i) CHECK(three[i] == four[i]);
}

TEST_CASE("draw counter tracks state advances") {
    Rng rng(9);
    CHECK(rng.draws() == 0);
    rng.uniform();
    CHECK(rng.draws() == 1);
    rng.gaussian_scalar();
    CHECK(rng.draws() == 3); // one Box-Muller pair
    Tensor t({5});
    rng.fill_gaussian(t);
    CHECK(rng.draws() == 3 + 6); // three pairs for five elements
}

TEST_CASE("child streams are independent and deterministic") {
    const Rng root(42);
    Rng c0 = root.child(0);
    Rng c1 = root.child(1);
    Rng c0_again = Rng(42).child(0);
    CHECK(c0.next_u64() == c0_again.next_u64());
    bool any_diff = false;
    for (int i = 0; i < 8; ++i) any_diff = any_diff || c0.next_u64() != c1.next_u64();
    CHECK(any_diff);
}

TEST_CASE("large-sample gaussian moments") {
    Rng rng(123);
    const Tensor draws = gaussian(rng, {100000});
    double sum = 0.0;
    for (std::size_t i = 0; i < draws.size(); ++i) sum += draws[i];
    const double mean = sum / static_cast<double>(draws.size());
    double sq = 0.0;
    for (std::size_t i = 0; i < draws.size(); ++i) {
        sq += (draws[i] - mean) * (draws[i] - mean);
    }
    const double var = sq / static_cast<double>(draws.size() - 1);
    CHECK(std::fabs(mean) < 0.02);
    CHECK(std::fabs(var - 1.0) < 0.03);
}

TEST_CASE("ten-thousand draw mean within four standard errors") {
    Rng rng(77);
    const Tensor draws = gaussian(rng, {10000});
    double sum = 0.0;
    for (std::size_t i = 0; i < draws.size(); ++i) sum += draws[i];
    CHECK(std::fabs(sum / 10000.0) <= 4.0 / std::sqrt(10000.0));
}

TEST_CASE("moments of gaussian stream via stats") {
    Rng rng(31);
    std::vector<Tensor> samples;
    for (int i = 0; i < 20000; ++i) samples.push_back(gaussian(rng, {1}));
    const auto [mean, var] = moments(samples);
    CHECK(std::fabs(mean[0]) < 0.05);
    CHECK(std::fabs(var[0] - 1.0) < 0.05);
}
