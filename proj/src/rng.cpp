#include "resdiff/rng.hpp"

#include <cmath>
#include <numbers>

namespace resdiff {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) {
        w = splitmix64(s);
    }
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    ++draws_;
    return result;
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_int(std::uint64_t n) {
    if (n == 0) {
        throw ShapeError("uniform_int: n must be >= 1");
    }
    // Rejection keeps the draw unbiased for any n.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = next_u64();
    while (v >= limit) {
        v = next_u64();
    }
    return v % n;
}

double Rng::gaussian_scalar() {
    const double u1 = 1.0 - uniform(); // (0, 1], keeps the log argument positive
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(2.0 * std::numbers::pi * u2);
}

void Rng::fill_gaussian(Tensor& out) {
    auto p = out.data();
    const std::size_t n = p.size();
    std::size_t i = 0;
    while (i + 1 < n) {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        p[i] = r * std::cos(2.0 * std::numbers::pi * u2);
        p[i + 1] = r * std::sin(2.0 * std::numbers::pi * u2);
        i += 2;
    }
    if (i < n) {
        p[i] = gaussian_scalar();
    }
}

Rng Rng::child(std::uint64_t index) const {
    std::uint64_t s = seed_ ^ 0x5851f42d4c957f2dULL;
    (void)splitmix64(s);
    s ^= index;
    std::uint64_t derived = splitmix64(s);
    return Rng(derived);
}

Tensor gaussian(Rng& rng, const std::vector<std::size_t>& shape) {
    shape_size(shape); // validates
    Tensor out(shape);
    rng.fill_gaussian(out);
    return out;
}

} // namespace resdiff
