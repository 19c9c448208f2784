#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "resdiff/error.hpp"

namespace resdiff {

// Dense n-dimensional array of 64-bit reals, row-major. Tensors are value
// types: operations return new tensors, and every public operation leaves
// only finite entries behind.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape);
    Tensor(std::vector<std::size_t> shape, double fill);
    Tensor(std::vector<std::size_t> shape, std::vector<double> data);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }

    double operator[](std::size_t i) const { return data_[i]; }
    double& operator[](std::size_t i) { return data_[i]; }

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    // Throws ShapeError unless both tensors have identical shapes.
    static void require_same_shape(const Tensor& a, const Tensor& b, const char* what);

    void check_finite(const char* what) const;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

// Validates a shape descriptor (non-empty, all dims >= 1) and returns the
// element count.
std::size_t shape_size(std::span<const std::size_t> shape);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);
Tensor hadamard(const Tensor& a, const Tensor& b);

// ca*a + cb*b, elementwise.
Tensor add_scaled(const Tensor& a, double ca, const Tensor& b, double cb);

Tensor add_scalar(const Tensor& a, double c);
Tensor clamp(const Tensor& a, double lo, double hi);

double max_abs(const Tensor& a);
double rms(const Tensor& a);
double mean_value(const Tensor& a);

} // namespace resdiff
