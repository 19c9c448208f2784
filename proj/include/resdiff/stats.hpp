#pragma once

#include <span>
#include <utility>

#include "resdiff/tensor.hpp"

namespace resdiff {

// Elementwise sample mean and unbiased sample variance over >= 2 tensors of
// identical shape.
std::pair<Tensor, Tensor> moments(std::span<const Tensor> samples);

// Streaming elementwise moments (Welford), for sample counts too large to
// hold in memory. Matches moments() up to rounding.
class RunningMoments {
public:
    void add(const Tensor& sample);
    std::size_t count() const { return count_; }
    Tensor mean() const;
    Tensor variance() const; // unbiased; requires count >= 2

private:
    std::size_t count_ = 0;
    Tensor mean_;
    Tensor m2_;
};

} // namespace resdiff
