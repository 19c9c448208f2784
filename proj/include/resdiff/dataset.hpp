#pragma once

#include <cstdint>
#include <vector>

#include "resdiff/rng.hpp"
#include "resdiff/tensor.hpp"

namespace resdiff {

enum class ShapeFamily { disc, rectangle, mixed };

// Synthetic segmentation pairs: binary masks in {-1, +1} and noisy inputs
// image = mask + N(0, sigma^2) + a fixed horizontal intensity ramp of
// amplitude `gradient`, so segmenting the input is learnable but imperfect.
struct DatasetSpec {
    int height = 16;
    int width = 16;
    int count = 0;
    ShapeFamily family = ShapeFamily::mixed;
    double noise_sigma = 0.5;
    double gradient = 0.4;
    std::uint64_t seed = 0;

    void validate() const;
};

struct Sample {
    std::uint64_t id = 0;
    Tensor input; // conditioning image
    Tensor mask;  // ground truth, entries in {-1, +1}
};

// Deterministic: sample n draws from the child stream (spec.seed, n), so the
// set is stable under count changes and order is by id. Shape parameters are
// redrawn until the mask area fraction lands in [0.1, 0.6].
std::vector<Sample> make_dataset(const DatasetSpec& spec);

double mask_area_fraction(const Tensor& mask);

} // namespace resdiff
