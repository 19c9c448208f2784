#include "resdiff/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "resdiff/error.hpp"

namespace resdiff {
namespace {

constexpr int kMaxShapeAttempts = 1000;
constexpr double kMinAreaFraction = 0.1;
constexpr double kMaxAreaFraction = 0.6;

void paint_disc(Tensor& mask, double cx, double cy, double radius) {
    const auto h = mask.shape()[0];
    const auto w = mask.shape()[1];
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const double dx = static_cast<double>(x) - cx;
            const double dy = static_cast<double>(y) - cy;
            mask[y * w + x] = (dx * dx + dy * dy <= radius * radius) ? 1.0 : -1.0;
        }
    }
}

void paint_rectangle(Tensor& mask, double cx, double cy, double half_w, double half_h) {
    const auto h = mask.shape()[0];
    const auto w = mask.shape()[1];
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const bool inside = std::abs(static_cast<double>(x) - cx) <= half_w &&
                                std::abs(static_cast<double>(y) - cy) <= half_h;
            mask[y * w + x] = inside ? 1.0 : -1.0;
        }
    }
}

// One attempt consumes a fixed number of draws for its family; the selector
// (mixed only) is drawn first. Redraws repeat the whole sequence.
Tensor draw_mask(Rng& rng, const DatasetSpec& spec) {
    const double h = static_cast<double>(spec.height);
    const double w = static_cast<double>(spec.width);
    const double extent = std::min(h, w);
    for (int attempt = 0; attempt < kMaxShapeAttempts; ++attempt) {
        ShapeFamily family = spec.family;
        if (family == ShapeFamily::mixed) {
            family = rng.uniform_int(2) == 0 ? ShapeFamily::disc : ShapeFamily::rectangle;
        }
        Tensor mask({static_cast<std::size_t>(spec.height), static_cast<std::size_t>(spec.width)});
        const double cx = (0.25 + 0.5 * rng.uniform()) * (w - 1.0);
        const double cy = (0.25 + 0.5 * rng.uniform()) * (h - 1.0);
        if (family == ShapeFamily::disc) {
            const double radius = (0.2 + 0.2 * rng.uniform()) * extent;
            paint_disc(mask, cx, cy, radius);
        } else {
            const double half_w = (0.125 + 0.225 * rng.uniform()) * w;
            const double half_h = (0.125 + 0.225 * rng.uniform()) * h;
            paint_rectangle(mask, cx, cy, half_w, half_h);
        }
        const double frac = mask_area_fraction(mask);
        if (frac >= kMinAreaFraction && frac <= kMaxAreaFraction) return mask;
    }
    throw ConfigError("dataset: could not draw a mask with admissible area fraction");
}

} // namespace

void DatasetSpec::validate() const {
    if (height < 4 || width < 4) throw ConfigError("dataset: height and width must be at least 4");
    if (count < 0) throw ConfigError("dataset: count must be non-negative");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
        throw ConfigError("dataset: noise_sigma must be finite and non-negative");
    }
    if (!std::isfinite(gradient)) throw ConfigError("dataset: gradient must be finite");
}

std::vector<Sample> make_dataset(const DatasetSpec& spec) {
    spec.validate();
    std::vector<Sample> out;
    out.reserve(static_cast<std::size_t>(spec.count));
    const Rng base(spec.seed);
    for (int n = 0; n < spec.count; ++n) {
        Rng rng = base.child(static_cast<std::uint64_t>(n));
        Sample s;
        s.id = static_cast<std::uint64_t>(n);
        s.mask = draw_mask(rng, spec);
        Tensor noise = gaussian(rng, s.mask.shape());
        s.input = add_scaled(s.mask, 1.0, noise, spec.noise_sigma);
        const auto w = s.input.shape()[1];
        for (std::size_t y = 0; y < s.input.shape()[0]; ++y) {
            for (std::size_t x = 0; x < w; ++x) {
                const double ramp = 2.0 * static_cast<double>(x) / static_cast<double>(w - 1) - 1.0;
                s.input[y * w + x] += spec.gradient * ramp;
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

double mask_area_fraction(const Tensor& mask) {
    std::size_t inside = 0;
    for (double v : mask.data()) {
        if (v > 0.0) ++inside;
    }
    return static_cast<double>(inside) / static_cast<double>(mask.size());
}

} // namespace resdiff
