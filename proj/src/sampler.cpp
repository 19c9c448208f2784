#include "resdiff/sampler.hpp"

#include <cmath>

#include "resdiff/error.hpp"

namespace resdiff {

Tensor init_x_tprime(const Tensor& x_hat0, const Tensor& eps, const Schedule& s) {
    Tensor::require_same_shape(x_hat0, eps, "init_x_tprime");
    const double sab = s.sqrt_alpha_bar_at(s.t_prime);
    const double noise = std::sqrt(1.0 - s.alpha_bar_at(s.t_prime));
    return add_scaled(x_hat0, 1.0 - sab, eps, noise);
}

Tensor reverse_step(const Tensor& x_t, const Tensor& cond, int t, const DenoiserParams& params,
                    const Tensor& z, const Schedule& s, DenoiserScratch* scratch) {
    if (t < 2 || t > s.t_prime) {
        throw ShapeError("reverse_step: t must lie in [2, t_prime]");
    }
    Tensor::require_same_shape(x_t, z, "reverse_step");
    const Tensor eps_res = predict_resnoise(params, x_t, cond, t, scratch);
    Tensor mu = mu_from_resnoise(x_t, eps_res, t, s);
    return add_scaled(mu, 1.0, z, std::sqrt(s.tilde_beta_at(t)));
}

SampleTrace sample(const Tensor& x_hat0, const Tensor& cond, const DenoiserParams& params,
                   const Schedule& s, Rng& rng, int snapshot_stride) {
    SampleTrace trace;
    trace.x_hat0 = x_hat0;
    const Tensor eps = gaussian(rng, x_hat0.shape());
    Tensor x = init_x_tprime(x_hat0, eps, s);
    trace.x_init = x;
    trace.rms.emplace_back(s.t_prime, rms(x));
    DenoiserScratch scratch;
    for (int t = s.t_prime; t >= 2; --t) {
        const Tensor z = gaussian(rng, x.shape());
        x = reverse_step(x, cond, t, params, z, s, &scratch);
        trace.rms.emplace_back(t - 1, rms(x));
        if (snapshot_stride > 0 && (t - 1) % snapshot_stride == 0) {
            trace.snapshots.emplace_back(t - 1, x);
        }
    }
    const Tensor eps_res = predict_resnoise(params, x, cond, 1, &scratch);
    x = mu_from_resnoise(x, eps_res, 1, s);
    trace.x0 = x;
    trace.rms.emplace_back(0, rms(x));
    return trace;
}

} // namespace resdiff
