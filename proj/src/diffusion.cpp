#include "resdiff/diffusion.hpp"

#include <cmath>

namespace resdiff {

namespace {

void check_step(int t, const Schedule& s, const char* what) {
    if (t < 1 || t > s.steps) {
        throw ShapeError(std::string(what) + ": step out of range");
    }
}

// c0*a + c1*b + c2*c, elementwise over three same-shape tensors.
Tensor lincomb3(double c0, const Tensor& a, double c1, const Tensor& b, double c2,
                const Tensor& c, const char* what) {
    Tensor::require_same_shape(a, b, what);
    Tensor::require_same_shape(a, c, what);
    Tensor out(a.shape());
    auto pa = a.data();
    auto pb = b.data();
    auto pc = c.data();
    auto po = out.data();
    for (std::size_t i = 0; i < po.size(); ++i) {
        po[i] = c0 * pa[i] + c1 * pb[i] + c2 * pc[i];
    }
    out.check_finite(what);
    return out;
}

} // namespace

Tensor residual(const Tensor& x_hat0, const Tensor& x0) {
    return sub(x_hat0, x0);
}

Tensor q_sample_step(const Tensor& x_prev, const Tensor& r, int t, const Tensor& eps,
                     const Schedule& s) {
    check_step(t, s, "q_sample_step");
    const double sa = std::sqrt(s.alpha_at(t));
    // Noise scale reads the stored beta; 1 - alpha would re-round it.
    return lincomb3(sa, x_prev, 1.0 - sa, r, std::sqrt(s.beta_at(t)), eps, "q_sample_step");
}

ForwardSample q_sample_closed(const Tensor& x0, const Tensor& r, int t, const Tensor& eps,
                              const Schedule& s) {
    check_step(t, s, "q_sample_closed");
    const double sab = s.sqrt_alpha_bar_at(t);
    ForwardSample fs;
    fs.x_t = lincomb3(sab, x0, 1.0 - sab, r, std::sqrt(1.0 - s.alpha_bar_at(t)), eps,
                      "q_sample_closed");
    fs.t = t;
    fs.eps = eps;
    fs.resnoise = resnoise_target(eps, r, t, s);
    return fs;
}

Tensor q_sample_simplified(const Tensor& x0, const Tensor& x_hat0, int t, const Tensor& eps,
                           const Schedule& s) {
    check_step(t, s, "q_sample_simplified");
    const double sab = s.sqrt_alpha_bar_at(t);
    return lincomb3(2.0 * sab - 1.0, x0, 1.0 - sab, x_hat0,
                    std::sqrt(1.0 - s.alpha_bar_at(t)), eps, "q_sample_simplified");
}

double resnoise_coeff(int t, const Schedule& s) {
    check_step(t, s, "resnoise_coeff");
    return (1.0 - std::sqrt(s.alpha_at(t))) * std::sqrt(1.0 - s.alpha_bar_at(t)) /
           s.beta_at(t);
}

Tensor resnoise_target(const Tensor& eps, const Tensor& r, int t, const Schedule& s) {
    return add_scaled(eps, 1.0, r, resnoise_coeff(t, s));
}

Tensor q_sample_hat(const Tensor& x_hat0, int t, const Tensor& eps, const Schedule& s) {
    check_step(t, s, "q_sample_hat");
    return add_scaled(x_hat0, s.sqrt_alpha_bar_at(t), eps,
                      std::sqrt(1.0 - s.alpha_bar_at(t)));
}

Tensor posterior_mean(const Tensor& x_t, const Tensor& x0, const Tensor& r, int t,
                      const Schedule& s) {
    if (t < 2) {
        throw ShapeError("posterior_mean: requires t >= 2");
    }
    check_step(t, s, "posterior_mean");
    Tensor::require_same_shape(x_t, x0, "posterior_mean");
    Tensor::require_same_shape(x_t, r, "posterior_mean");
    // c0 == sqrt(abar_prev) * beta / (1 - abar) and
    // ct == sqrt(alpha) * (1 - abar_prev) / (1 - abar), rewritten over step-t
    // primitives only; the resnoise route then agrees to rounding error.
    const double one_m = 1.0 - s.alpha_bar_at(t);
    const double sa = std::sqrt(s.alpha_at(t));
    const double c0 = s.sqrt_alpha_bar_at(t) * s.beta_at(t) / (sa * one_m);
    const double ct = (one_m - s.beta_at(t)) / (sa * one_m);
    Tensor out(x_t.shape());
    auto px = x_t.data();
    auto p0 = x0.data();
    auto pr = r.data();
    auto po = out.data();
    for (std::size_t i = 0; i < po.size(); ++i) {
        po[i] = c0 * (p0[i] - pr[i]) + ct * (px[i] - pr[i]) + pr[i];
    }
    out.check_finite("posterior_mean");
    return out;
}

Tensor mu_from_resnoise(const Tensor& x_t, const Tensor& eps_resnoise, int t,
                        const Schedule& s) {
    check_step(t, s, "mu_from_resnoise");
    const double inv_sa = 1.0 / std::sqrt(s.alpha_at(t));
    const double c = s.beta_at(t) / std::sqrt(1.0 - s.alpha_bar_at(t));
    Tensor::require_same_shape(x_t, eps_resnoise, "mu_from_resnoise");
    Tensor out(x_t.shape());
    auto px = x_t.data();
    auto pe = eps_resnoise.data();
    auto po = out.data();
    for (std::size_t i = 0; i < po.size(); ++i) {
        po[i] = inv_sa * (px[i] - c * pe[i]);
    }
    out.check_finite("mu_from_resnoise");
    return out;
}

} // namespace resdiff
