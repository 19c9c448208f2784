#include "resdiff/stats.hpp"

namespace resdiff {

std::pair<Tensor, Tensor> moments(std::span<const Tensor> samples) {
    if (samples.size() < 2) {
        throw ShapeError("moments: need at least 2 samples");
    }
    RunningMoments acc;
    for (const Tensor& s : samples) {
        acc.add(s);
    }
    return {acc.mean(), acc.variance()};
}

void RunningMoments::add(const Tensor& sample) {
    if (count_ == 0) {
        mean_ = sample;
        m2_ = Tensor(sample.shape());
        count_ = 1;
        return;
    }
    Tensor::require_same_shape(mean_, sample, "moments");
    ++count_;
    auto m = mean_.data();
    auto m2 = m2_.data();
    auto x = sample.data();
    const double inv_n = 1.0 / static_cast<double>(count_);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double delta = x[i] - m[i];
        m[i] += delta * inv_n;
        m2[i] += delta * (x[i] - m[i]);
    }
}

Tensor RunningMoments::mean() const {
    if (count_ == 0) {
        throw ShapeError("moments: empty accumulator");
    }
    return mean_;
}

Tensor RunningMoments::variance() const {
    if (count_ < 2) {
        throw ShapeError("moments: variance needs at least 2 samples");
    }
    return scale(m2_, 1.0 / static_cast<double>(count_ - 1));
}

} // namespace resdiff
