#include "resdiff/denoiser.hpp"

#include <cmath>

namespace resdiff {

Tensor embed_time(int t, const TimeEmbedding& emb) {
    if (emb.dim <= 0 || emb.dim % 2 != 0) {
        throw ConfigError("time embedding: dimension must be a positive even integer");
    }
    if (emb.base_period < 1.0) {
        throw ConfigError("time embedding: base period must be >= 1");
    }
    const int half = emb.dim / 2;
    Tensor out({static_cast<std::size_t>(emb.dim)});
    auto p = out.data();
    for (int k = 0; k < half; ++k) {
        const double exponent = half > 1 ? static_cast<double>(k) / (half - 1) : 0.0;
        const double omega = std::pow(emb.base_period, exponent);
        const double arg = static_cast<double>(t) / omega;
        p[2 * k] = std::sin(arg);
        p[2 * k + 1] = std::cos(arg);
    }
    return out;
}

std::int64_t DenoiserConfig::param_count() const {
    std::int64_t n = 0;
    int in = input_dim();
    for (int h : hidden) {
        n += static_cast<std::int64_t>(h) * in + h;
        in = h;
    }
    n += static_cast<std::int64_t>(x_dim) * in + x_dim;
    return n;
}

namespace {

std::vector<LinearLayer> make_layers(const DenoiserConfig& config) {
    if (config.x_dim <= 0 || config.cond_dim < 0) {
        throw ConfigError("denoiser: bad layer sizes");
    }
    std::vector<int> widths;
    widths.push_back(config.input_dim());
    for (int h : config.hidden) {
        if (h <= 0) {
            throw ConfigError("denoiser: hidden widths must be positive");
        }
        widths.push_back(h);
    }
    widths.push_back(config.x_dim);

    std::vector<LinearLayer> layers(widths.size() - 1);
    for (std::size_t l = 0; l < layers.size(); ++l) {
        layers[l].in = widths[l];
        layers[l].out = widths[l + 1];
        layers[l].w.assign(static_cast<std::size_t>(layers[l].out) * layers[l].in, 0.0);
        layers[l].b.assign(static_cast<std::size_t>(layers[l].out), 0.0);
    }
    return layers;
}

void build_input(const DenoiserParams& params, const Tensor& x_t, const Tensor& cond, int t,
                 std::vector<double>& input) {
    const DenoiserConfig& cfg = params.config;
    if (static_cast<int>(x_t.size()) != cfg.x_dim) {
        throw ShapeError("predict_resnoise: x size does not match configured input");
    }
    if (static_cast<int>(cond.size()) != cfg.cond_dim) {
        throw ShapeError("predict_resnoise: conditioning size does not match configured input");
    }
    if (t < 1) {
        throw ShapeError("predict_resnoise: step must be >= 1");
    }
    input.resize(static_cast<std::size_t>(cfg.input_dim()));
    std::size_t k = 0;
    for (double v : x_t.data()) {
        input[k++] = v;
    }
    for (double v : cond.data()) {
        input[k++] = v;
    }
    const Tensor emb = embed_time(t, cfg.time_emb);
    for (double v : emb.data()) {
        input[k++] = v;
    }
}

// y = W x + b
void affine(const LinearLayer& layer, const std::vector<double>& x, std::vector<double>& y) {
    y.resize(static_cast<std::size_t>(layer.out));
    const double* w = layer.w.data();
    for (int o = 0; o < layer.out; ++o) {
        double acc = layer.b[static_cast<std::size_t>(o)];
        const double* row = w + static_cast<std::size_t>(o) * layer.in;
        for (int i = 0; i < layer.in; ++i) {
            acc += row[i] * x[static_cast<std::size_t>(i)];
        }
        y[static_cast<std::size_t>(o)] = acc;
    }
}

// Runs the network, leaving activations in scratch. Returns the output
// activation (last entry of scratch.act).
const std::vector<double>& forward(const DenoiserParams& params, const Tensor& x_t,
                                   const Tensor& cond, int t, DenoiserScratch& scratch) {
    build_input(params, x_t, cond, t, scratch.input);
    const std::size_t n_layers = params.layers.size();
    scratch.pre.resize(n_layers);
    scratch.act.resize(n_layers);
    const std::vector<double>* x = &scratch.input;
    for (std::size_t l = 0; l < n_layers; ++l) {
        affine(params.layers[l], *x, scratch.pre[l]);
        if (l + 1 < n_layers) {
            scratch.act[l].resize(scratch.pre[l].size());
            for (std::size_t i = 0; i < scratch.pre[l].size(); ++i) {
                scratch.act[l][i] = std::tanh(scratch.pre[l][i]);
            }
        } else {
            scratch.act[l] = scratch.pre[l]; // linear output layer
        }
        x = &scratch.act[l];
    }
    return scratch.act.back();
}

} // namespace

DenoiserParams DenoiserParams::zeros(const DenoiserConfig& config) {
    DenoiserParams p;
    p.config = config;
    p.layers = make_layers(config);
    return p;
}

DenoiserParams DenoiserParams::init(const DenoiserConfig& config, Rng& rng) {
    DenoiserParams p = zeros(config);
    for (auto& layer : p.layers) {
        const double std_dev = 1.0 / std::sqrt(static_cast<double>(layer.in));
        Tensor draw({layer.w.size()});
        rng.fill_gaussian(draw);
        for (std::size_t i = 0; i < layer.w.size(); ++i) {
            layer.w[i] = std_dev * draw[i];
        }
    }
    return p;
}

Tensor predict_resnoise(const DenoiserParams& params, const Tensor& x_t, const Tensor& cond,
                        int t, DenoiserScratch* scratch) {
    DenoiserScratch local;
    DenoiserScratch& s = scratch ? *scratch : local;
    const std::vector<double>& out = forward(params, x_t, cond, t, s);
    Tensor result(x_t.shape(), std::vector<double>(out.begin(), out.end()));
    return result;
}

double accumulate_loss_and_grad(const DenoiserParams& params, const Tensor& x_t,
                                const Tensor& cond, int t, const Tensor& target,
                                DenoiserParams& grad, DenoiserScratch& scratch) {
    Tensor::require_same_shape(x_t, target, "loss_and_grad");
    const std::vector<double>& out = forward(params, x_t, cond, t, scratch);
    const std::size_t n_out = out.size();
    const std::size_t n_layers = params.layers.size();
    scratch.delta.resize(n_layers);

    // loss = mean over output coordinates of squared error
    auto pt = target.data();
    double loss = 0.0;
    auto& dout = scratch.delta[n_layers - 1];
    dout.resize(n_out);
    const double inv_n = 1.0 / static_cast<double>(n_out);
    for (std::size_t i = 0; i < n_out; ++i) {
        const double e = out[i] - pt[i];
        loss += e * e;
        dout[i] = 2.0 * e * inv_n; // dL/d(pre) of the linear output layer
    }
    loss *= inv_n;

    // Backward pass; deltas hold dL/d(pre-activation) per layer.
    for (std::size_t l = n_layers; l-- > 0;) {
        const LinearLayer& layer = params.layers[l];
        LinearLayer& g = grad.layers[l];
        const std::vector<double>& upstream =
            l == 0 ? scratch.input : scratch.act[l - 1];
        const std::vector<double>& delta = scratch.delta[l];
        for (int o = 0; o < layer.out; ++o) {
            const double d = delta[static_cast<std::size_t>(o)];
            g.b[static_cast<std::size_t>(o)] += d;
            double* grow = g.w.data() + static_cast<std::size_t>(o) * layer.in;
            for (int i = 0; i < layer.in; ++i) {
                grow[i] += d * upstream[static_cast<std::size_t>(i)];
            }
        }
        if (l == 0) {
            break;
        }
        auto& down = scratch.delta[l - 1];
        down.assign(static_cast<std::size_t>(layer.in), 0.0);
        const double* w = layer.w.data();
        for (int o = 0; o < layer.out; ++o) {
            const double d = delta[static_cast<std::size_t>(o)];
            const double* row = w + static_cast<std::size_t>(o) * layer.in;
            for (int i = 0; i < layer.in; ++i) {
                down[static_cast<std::size_t>(i)] += d * row[i];
            }
        }
        // tanh'(pre) = 1 - act^2
        const std::vector<double>& act = scratch.act[l - 1];
        for (std::size_t i = 0; i < down.size(); ++i) {
            down[i] *= 1.0 - act[i] * act[i];
        }
    }
    return loss;
}

std::pair<double, DenoiserParams> loss_and_grad(const DenoiserParams& params,
                                                const Tensor& x_t, const Tensor& cond, int t,
                                                const Tensor& target) {
    DenoiserParams grad = DenoiserParams::zeros(params.config);
    DenoiserScratch scratch;
    const double loss = accumulate_loss_and_grad(params, x_t, cond, t, target, grad, scratch);
    return {loss, std::move(grad)};
}

void apply_sgd(DenoiserParams& params, const DenoiserParams& grad, double lr, double scale) {
    const double step = lr * scale;
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        auto& layer = params.layers[l];
        const auto& g = grad.layers[l];
        for (std::size_t i = 0; i < layer.w.size(); ++i) {
            layer.w[i] -= step * g.w[i];
        }
        for (std::size_t i = 0; i < layer.b.size(); ++i) {
            layer.b[i] -= step * g.b[i];
        }
    }
}

} // namespace resdiff
