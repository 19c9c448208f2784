#include "resdiff/e2e_stub.hpp"

#include <algorithm>
#include <cmath>

#include "resdiff/tensor_io.hpp"

namespace resdiff {

void StubSpec::validate() const {
    if (kind == StubKind::identity) {
        return;
    }
    if (!(gain > 0.0 && gain <= 1.0)) {
        throw ConfigError("stub: gain must be in (0, 1]");
    }
    if (std::fabs(bias) > 0.5) {
        throw ConfigError("stub: |bias| must be <= 0.5");
    }
    if (kernel != 1 && kernel != 3 && kernel != 5) {
        throw ConfigError("stub: kernel must be 1, 3, or 5");
    }
}

namespace {

// Box mean filter over the last two dims with replicate padding.
Tensor box_blur(const Tensor& x, int kernel) {
    if (kernel == 1) {
        return x;
    }
    if (x.rank() != 2) {
        throw ConfigError("stub: blur kernels > 1 need a rank-2 tensor");
    }
    const int h = static_cast<int>(x.shape()[0]);
    const int w = static_cast<int>(x.shape()[1]);
    const int half = kernel / 2;
    Tensor out(x.shape());
    auto px = x.data();
    auto po = out.data();
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            double acc = 0.0;
            for (int di = -half; di <= half; ++di) {
                const int ii = std::clamp(i + di, 0, h - 1);
                for (int dj = -half; dj <= half; ++dj) {
                    const int jj = std::clamp(j + dj, 0, w - 1);
                    acc += px[static_cast<std::size_t>(ii) * w + jj];
                }
            }
            po[static_cast<std::size_t>(i) * w + j] =
                acc / static_cast<double>(kernel * kernel);
        }
    }
    return out;
}

} // namespace

Tensor stub_apply(const StubSpec& spec, const Tensor& input, const Tensor& x0) {
    spec.validate();
    (void)input; // the surrogate corrupts the ground truth directly
    if (spec.kind == StubKind::identity) {
        return x0;
    }
    Tensor blurred = box_blur(x0, spec.kernel);
    Tensor out(blurred.shape());
    auto pb = blurred.data();
    auto po = out.data();
    for (std::size_t i = 0; i < po.size(); ++i) {
        po[i] = std::clamp(spec.gain * pb[i] + spec.bias, -1.0, 1.0);
    }
    return out;
}

LikelihoodCache::LikelihoodCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(*dir_);
}

std::filesystem::path LikelihoodCache::file_for(std::uint64_t id) const {
    return *dir_ / (std::to_string(id) + ".rsf1");
}

Tensor LikelihoodCache::get_or_compute(std::uint64_t id, const StubSpec& spec,
                                       const Tensor& input, const Tensor& x0) {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = entries_.find(id);
        if (it != entries_.end()) {
            return it->second;
        }
    }
    Tensor value;
    bool from_disk = false;
    if (dir_) {
        const auto path = file_for(id);
        if (std::filesystem::exists(path)) {
            value = load_rsf1(path);
            from_disk = true;
        }
    }
    if (!from_disk) {
        value = stub_apply(spec, input, x0);
        if (dir_) {
            save_rsf1(file_for(id), value);
        }
    }
    std::lock_guard<std::mutex> lock(mutex_);
    auto [it, inserted] = entries_.emplace(id, std::move(value));
    return it->second;
}

std::size_t LikelihoodCache::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return entries_.size();
}

} // namespace resdiff
