#include "resdiff/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "resdiff/error.hpp"

namespace resdiff {

double iou(const Tensor& prediction, const Tensor& truth) {
    Tensor::require_same_shape(prediction, truth, "iou");
    std::size_t inter = 0;
    std::size_t uni = 0;
    for (std::size_t i = 0; i < prediction.size(); ++i) {
        const bool p = prediction.data()[i] > 0.0;
        const bool t = truth.data()[i] > 0.0;
        if (p && t) ++inter;
        if (p || t) ++uni;
    }
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double mse(const Tensor& prediction, const Tensor& truth) {
    Tensor::require_same_shape(prediction, truth, "mse");
    double acc = 0.0;
    for (std::size_t i = 0; i < prediction.size(); ++i) {
        const double d = prediction.data()[i] - truth.data()[i];
        acc += d * d;
    }
    return acc / static_cast<double>(prediction.size());
}

double mean_of(std::span<const double> values) {
    if (values.empty()) throw ConfigError("mean_of: empty sample");
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc / static_cast<double>(values.size());
}

BootstrapCi bootstrap_mean_ci(std::span<const double> values, int resamples, Rng& rng) {
    if (values.empty()) throw ConfigError("bootstrap_mean_ci: empty sample");
    if (resamples < 1) throw ConfigError("bootstrap_mean_ci: resamples must be positive");
    BootstrapCi ci;
    ci.mean = mean_of(values);
    std::vector<double> means;
    means.reserve(static_cast<std::size_t>(resamples));
    const auto n = values.size();
    for (int r = 0; r < resamples; ++r) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += values[rng.uniform_int(static_cast<std::uint64_t>(n))];
        }
        means.push_back(acc / static_cast<double>(n));
    }
    std::sort(means.begin(), means.end());
    const auto rank = [&](double q) {
        const auto m = means.size();
        auto idx = static_cast<std::size_t>(std::llround(q * static_cast<double>(m - 1)));
        idx = std::min(idx, m - 1);
        return means[idx];
    };
    ci.lo = rank(0.025);
    ci.hi = rank(0.975);
    return ci;
}

} // namespace resdiff
