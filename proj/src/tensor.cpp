#include "resdiff/tensor.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace resdiff {

std::size_t shape_size(std::span<const std::size_t> shape) {
    if (shape.empty()) {
        throw ShapeError("shape must have at least one dimension");
    }
    std::size_t n = 1;
    for (std::size_t d : shape) {
        if (d == 0) {
            throw ShapeError("shape dimensions must be >= 1");
        }
        n *= d;
    }
    return n;
}

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_size(shape_), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), data_(shape_size(shape_), fill) {
    check_finite("Tensor fill");
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_size(shape_) != data_.size()) {
        throw ShapeError("data length does not match shape");
    }
    check_finite("Tensor data");
}

void Tensor::require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(what) + ": shape mismatch");
    }
}

void Tensor::check_finite(const char* what) const {
    for (double v : data_) {
        if (!std::isfinite(v)) {
            throw ShapeError(std::string(what) + ": non-finite element");
        }
    }
}

namespace {

template <typename F>
Tensor elementwise(const Tensor& a, const Tensor& b, const char* what, F f) {
    Tensor::require_same_shape(a, b, what);
    Tensor out(a.shape());
    auto pa = a.data();
    auto pb = b.data();
    auto po = out.data();
    for (std::size_t i = 0; i < po.size(); ++i) {
        po[i] = f(pa[i], pb[i]);
    }
    out.check_finite(what);
    return out;
}

template <typename F>
Tensor map(const Tensor& a, const char* what, F f) {
    Tensor out(a.shape());
    auto pa = a.data();
    auto po = out.data();
    for (std::size_t i = 0; i < po.size(); ++i) {
        po[i] = f(pa[i]);
    }
    out.check_finite(what);
    return out;
}

} // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    return elementwise(a, b, "add", [](double x, double y) { return x + y; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    return elementwise(a, b, "sub", [](double x, double y) { return x - y; });
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
    return elementwise(a, b, "hadamard", [](double x, double y) { return x * y; });
}

Tensor scale(const Tensor& a, double c) {
    return map(a, "scale", [c](double x) { return c * x; });
}

Tensor add_scaled(const Tensor& a, double ca, const Tensor& b, double cb) {
    return elementwise(a, b, "add_scaled",
                       [ca, cb](double x, double y) { return ca * x + cb * y; });
}

Tensor add_scalar(const Tensor& a, double c) {
    return map(a, "add_scalar", [c](double x) { return x + c; });
}

Tensor clamp(const Tensor& a, double lo, double hi) {
    return map(a, "clamp", [lo, hi](double x) { return x < lo ? lo : (x > hi ? hi : x); });
}

double max_abs(const Tensor& a) {
    double m = 0.0;
    for (double v : a.data()) {
        m = std::max(m, std::fabs(v));
    }
    return m;
}

double rms(const Tensor& a) {
    double s = 0.0;
    for (double v : a.data()) {
        s += v * v;
    }
    return std::sqrt(s / static_cast<double>(a.size()));
}

double mean_value(const Tensor& a) {
    double s = 0.0;
    for (double v : a.data()) {
        s += v;
    }
    return s / static_cast<double>(a.size());
}

} // namespace resdiff
