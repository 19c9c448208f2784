#pragma once

#include <cstdint>
#include <vector>

#include "resdiff/rng.hpp"
#include "resdiff/tensor.hpp"

namespace resdiff {

// Sinusoidal step embedding. dim must be even; frequencies 1/omega_k with
// omega_k geometric in [1, base_period].
struct TimeEmbedding {
    int dim = 32;
    double base_period = 10000.0;
};

// Layout: [sin(t/omega_0), cos(t/omega_0), sin(t/omega_1), cos(t/omega_1), ...].
Tensor embed_time(int t, const TimeEmbedding& emb);

struct LinearLayer {
    int out = 0;
    int in = 0;
    std::vector<double> w; // row-major [out x in]
    std::vector<double> b; // [out]
};

struct DenoiserConfig {
    int x_dim = 0;    // flattened noised-state size; also the output size
    int cond_dim = 0; // flattened conditioning-image size
    std::vector<int> hidden = {256, 256, 256};
    TimeEmbedding time_emb;

    int input_dim() const { return x_dim + cond_dim + time_emb.dim; }
    std::int64_t param_count() const;
};

// Fully connected resnoise predictor. The noised state, the conditioning
// image, and the step embedding are concatenated at the input layer; hidden
// layers use tanh, the output layer is linear.
struct DenoiserParams {
    DenoiserConfig config;
    std::vector<LinearLayer> layers; // hidden.size() + 1 entries

    static DenoiserParams zeros(const DenoiserConfig& config);
    // Weights ~ N(0, 1/fan_in), biases 0. Draw order: layer by layer,
    // weights row-major, then bias.
    static DenoiserParams init(const DenoiserConfig& config, Rng& rng);
};

// Reusable forward/backward buffers; callers that loop (the trainer) hold one.
struct DenoiserScratch {
    std::vector<double> input;
    std::vector<std::vector<double>> pre;  // pre-activation per layer
    std::vector<std::vector<double>> act;  // post-activation per layer
    std::vector<std::vector<double>> delta;
};

Tensor predict_resnoise(const DenoiserParams& params, const Tensor& x_t, const Tensor& cond,
                        int t, DenoiserScratch* scratch = nullptr);

// Mean squared error against target plus the exact gradient of that loss
// with respect to every parameter.
std::pair<double, DenoiserParams> loss_and_grad(const DenoiserParams& params,
                                                const Tensor& x_t, const Tensor& cond, int t,
                                                const Tensor& target);

// Same computation, summed into grad (which must be zeros() or a previous
// accumulation over the same config). Returns this sample's loss.
double accumulate_loss_and_grad(const DenoiserParams& params, const Tensor& x_t,
                                const Tensor& cond, int t, const Tensor& target,
                                DenoiserParams& grad, DenoiserScratch& scratch);

// params -= lr * scale * grad
void apply_sgd(DenoiserParams& params, const DenoiserParams& grad, double lr,
               double scale = 1.0);

} // namespace resdiff
