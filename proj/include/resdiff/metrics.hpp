#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "resdiff/rng.hpp"
#include "resdiff/tensor.hpp"

namespace resdiff {

// Intersection over union of the sets {v > 0}. Both sets empty counts as a
// perfect match (1.0).
double iou(const Tensor& prediction, const Tensor& truth);

double mse(const Tensor& prediction, const Tensor& truth);

struct BootstrapCi {
    double mean = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

// Percentile bootstrap of the mean at 95% confidence. Resample means are
// sorted and the interval is [2.5%, 97.5%] by nearest-rank.
BootstrapCi bootstrap_mean_ci(std::span<const double> values, int resamples, Rng& rng);

double mean_of(std::span<const double> values);

} // namespace resdiff
