#pragma once

#include <cstdint>
#include <vector>

#include "resdiff/tensor.hpp"

namespace resdiff {

// Deterministic stream generator: xoshiro256++ state seeded from a 64-bit
// seed via splitmix64. A given seed produces the same sequence on every
// platform. Draw order contract:
//   - next_u64() advances the state once.
//   - uniform() = (next_u64() >> 11) * 2^-53, one state advance, in [0, 1).
//   - uniform_int(n) uses rejection on next_u64(), at least one advance.
//   - Gaussian fills go in row-major order; elements (2k, 2k+1) come from
//     one Box-Muller pair built from uniforms (u1, u2) drawn in that order:
//       r = sqrt(-2 ln(1 - u1)), z0 = r cos(2 pi u2), z1 = r sin(2 pi u2).
//     A trailing odd element consumes a full pair and keeps z0. A scalar
//     gaussian() draw is the shape-[1] case.
// The stream is single-owner; parallel work derives child streams with
// child(), which reseeds through splitmix64 from (seed, index).
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }
    // Count of state advances so far (the stream position).
    std::uint64_t draws() const { return draws_; }

    std::uint64_t next_u64();
    double uniform();
    std::uint64_t uniform_int(std::uint64_t n); // [0, n); n >= 1
    double gaussian_scalar();

    void fill_gaussian(Tensor& out);
    Rng child(std::uint64_t index) const;

private:
    std::uint64_t seed_ = 0;
    std::uint64_t draws_ = 0;
    std::uint64_t state_[4] = {0, 0, 0, 0};
};

// Tensor of i.i.d. standard normal entries; the shape is validated
// (non-empty, all dims >= 1).
Tensor gaussian(Rng& rng, const std::vector<std::size_t>& shape);

} // namespace resdiff
