#include "resdiff/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <vector>

#include "resdiff/denoiser.hpp"
#include "resdiff/error.hpp"
#include "resdiff/rng.hpp"
#include "resdiff/sampler.hpp"

namespace resdiff {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

Tensor random_instance(Rng& rng, bool flat) {
    return flat ? gaussian(rng, {8}) : gaussian(rng, {4, 4});
}

// budget += |c| * |x| elementwise
void add_abs_term(Tensor& budget, double c, const Tensor& x) {
    const double a = std::fabs(c);
    auto pb = budget.data();
    auto px = x.data();
    for (std::size_t i = 0; i < pb.size(); ++i) pb[i] += a * std::fabs(px[i]);
}

struct PosteriorCoeffs {
    double c0;
    double ct;
};

// Same expressions as the library posterior; keeping them in one place makes
// the vanilla-reduction comparison a genuine same-arithmetic check.
PosteriorCoeffs posterior_coeffs(int t, const Schedule& s) {
    const double one_m = 1.0 - s.alpha_bar_at(t);
    const double sa = std::sqrt(s.alpha_at(t));
    PosteriorCoeffs c;
    c.c0 = s.sqrt_alpha_bar_at(t) * s.beta_at(t) / (sa * one_m);
    c.ct = (one_m - s.beta_at(t)) / (sa * one_m);
    return c;
}

} // namespace

ScheduleOracle oracle_schedule(int steps) {
    if (steps < 2) throw ConfigError("oracle_schedule: steps must be at least 2");
    ScheduleOracle o;
    o.sqrt_alpha_bar.resize(static_cast<std::size_t>(steps));
    std::vector<long double> sab(static_cast<std::size_t>(steps));
    const long double b_lo = 1e-4L;
    const long double b_hi = 2e-2L;
    long double prod = 1.0L;
    long double best = 2.0L;
    for (int t = 1; t <= steps; ++t) {
        const long double beta =
            (b_lo * (steps - t) + b_hi * (t - 1)) / static_cast<long double>(steps - 1);
        prod *= 1.0L - beta;
        const long double root = sqrtl(prod);
        sab[static_cast<std::size_t>(t) - 1] = root;
        o.sqrt_alpha_bar[static_cast<std::size_t>(t) - 1] = static_cast<double>(root);
        const long double dist = fabsl(root - 0.5L);
        if (dist < best) {
            best = dist;
            o.t_prime = t;
        }
    }
    o.acceleration_bias =
        static_cast<double>(fabsl(2.0L * sab[static_cast<std::size_t>(o.t_prime) - 1] - 1.0L));
    return o;
}

double ulp_budget_error(const Tensor& a, const Tensor& b, const Tensor& budget) {
    Tensor::require_same_shape(a, b, "ulp_budget_error");
    Tensor::require_same_shape(a, budget, "ulp_budget_error");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = std::fabs(a.data()[i] - b.data()[i]);
        if (diff == 0.0) continue;
        const double denom = kEps * budget.data()[i];
        worst = std::max(worst, denom > 0.0 ? diff / denom
                                            : std::numeric_limits<double>::infinity());
    }
    return worst;
}

Tensor oracle_denoise(const Tensor& x0, const Tensor& x_hat0, const Tensor& eps_init,
                      const Schedule& s) {
    const Tensor r = residual(x_hat0, x0);
    Tensor x = init_x_tprime(x_hat0, eps_init, s);
    for (int t = s.t_prime; t >= 1; --t) {
        const double sab = s.sqrt_alpha_bar_at(t);
        const double noise = std::sqrt(1.0 - s.alpha_bar_at(t));
        Tensor eps_eff(x.shape());
        for (std::size_t i = 0; i < x.size(); ++i) {
            eps_eff.data()[i] =
                (x.data()[i] - sab * x0.data()[i] - (1.0 - sab) * r.data()[i]) / noise;
        }
        const Tensor eps_res = resnoise_target(eps_eff, r, t, s);
        x = mu_from_resnoise(x, eps_res, t, s);
    }
    return x;
}

CheckResult check_schedule_oracle(int steps) {
    CheckResult res{.name = fmt::format("schedule_oracle_T{}", steps)};
    const Schedule s = build_schedule(steps);
    const ScheduleOracle o = oracle_schedule(steps);
    const bool endpoints_ok = s.beta.front() == 1e-4 && s.beta.back() == 2e-2;
    bool monotone_ok = true;
    for (int t = 2; t <= steps && monotone_ok; ++t) {
        monotone_ok = s.alpha_bar_at(t) < s.alpha_bar_at(t - 1);
    }
    double max_rel = 0.0;
    for (int t = 1; t <= steps; ++t) {
        const std::size_t i = static_cast<std::size_t>(t) - 1;
        max_rel = std::max(max_rel, std::fabs(s.sqrt_alpha_bar[i] - o.sqrt_alpha_bar[i]) /
                                        (kEps * o.sqrt_alpha_bar[i]));
    }
    // A t-term running product carries up to t/2 ulp into its square root, so
    // the oracle comparison uses that forward-error budget, not a fixed count.
    const double product_budget = 0.5 * steps + 4.0;
    const double here = std::fabs(s.sqrt_alpha_bar_at(s.t_prime) - 0.5);
    bool local_ok = true;
    if (s.t_prime > 1) local_ok = here <= std::fabs(s.sqrt_alpha_bar_at(s.t_prime - 1) - 0.5);
    if (s.t_prime < steps) {
        local_ok = local_ok && here <= std::fabs(s.sqrt_alpha_bar_at(s.t_prime + 1) - 0.5);
    }
    res.pass = endpoints_ok && monotone_ok && max_rel <= product_budget &&
               s.t_prime == o.t_prime && local_ok;
    res.detail = fmt::format("t_prime={} (oracle {}), max sqrt_abar dev {:.2f} ulp (budget "
                             "{:.0f}), bias {:.6g}, endpoints {}, monotone {}, local_opt {}",
                             s.t_prime, o.t_prime, max_rel, product_budget, acceleration_bias(s),
                             endpoints_ok ? "exact" : "OFF", monotone_ok ? "ok" : "BROKEN",
                             local_ok ? "ok" : "BROKEN");
    return res;
}

CheckResult check_two_form_equality(const Schedule& s, std::uint64_t seed, int instances,
                                    double ulps) {
    Rng rng(seed);
    double worst = 0.0;
    for (int n = 0; n < instances; ++n) {
        const bool flat = n % 2 == 0;
        const Tensor x0 = random_instance(rng, flat);
        const Tensor x_hat0 = random_instance(rng, flat);
        const Tensor eps = random_instance(rng, flat);
        const int t = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(s.steps)));
        const Tensor r = residual(x_hat0, x0);
        const Tensor a = q_sample_closed(x0, r, t, eps, s).x_t;
        const Tensor b = q_sample_simplified(x0, x_hat0, t, eps, s);
        const double sab = s.sqrt_alpha_bar_at(t);
        const double noise = std::sqrt(1.0 - s.alpha_bar_at(t));
        Tensor budget(x0.shape());
        add_abs_term(budget, sab, x0);
        add_abs_term(budget, 1.0 - sab, r);
        add_abs_term(budget, 2.0 * sab - 1.0, x0);
        add_abs_term(budget, 1.0 - sab, x_hat0);
        add_abs_term(budget, 2.0 * noise, eps);
        worst = std::max(worst, ulp_budget_error(a, b, budget));
    }
    return {.name = "two_form_equality",
            .pass = worst <= ulps,
            .detail = fmt::format("max {:.3g} ulp over {} instances (limit {})", worst, instances, ulps)};
}

CheckResult check_posterior_exchange(const Schedule& s, std::uint64_t seed, int instances,
                                     double ulps) {
    Rng rng(seed);
    double worst = 0.0;
    for (int n = 0; n < instances; ++n) {
        const bool flat = n % 2 == 0;
        const Tensor x0 = random_instance(rng, flat);
        const Tensor x_hat0 = random_instance(rng, flat);
        const Tensor eps = random_instance(rng, flat);
        const int t = 2 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(s.steps - 1)));
        const Tensor r = residual(x_hat0, x0);
        const ForwardSample fwd = q_sample_closed(x0, r, t, eps, s);
        const Tensor a = posterior_mean(fwd.x_t, x0, r, t, s);
        const Tensor b = mu_from_resnoise(fwd.x_t, fwd.resnoise, t, s);
        const auto [c0, ct] = posterior_coeffs(t, s);
        const double inv_sa = 1.0 / std::sqrt(s.alpha_at(t));
        const double cr = s.beta_at(t) / std::sqrt(1.0 - s.alpha_bar_at(t));
        Tensor budget(x0.shape());
        add_abs_term(budget, c0, x0);
        add_abs_term(budget, c0 + ct, r);
        add_abs_term(budget, ct + inv_sa, fwd.x_t);
        add_abs_term(budget, 1.0, r);
        add_abs_term(budget, inv_sa * cr, fwd.resnoise);
        worst = std::max(worst, ulp_budget_error(a, b, budget));
    }
    return {.name = "posterior_exchange",
            .pass = worst <= ulps,
            .detail = fmt::format("max {:.3g} ulp over {} instances (limit {})", worst, instances, ulps)};
}

CheckResult check_vanilla_reduction(const Schedule& s, std::uint64_t seed, int instances) {
    Rng rng(seed);
    bool ok = true;
    double worst = 0.0;
    for (int n = 0; n < instances && ok; ++n) {
        const bool flat = n % 2 == 0;
        const Tensor x0 = random_instance(rng, flat);
        const Tensor eps = random_instance(rng, flat);
        const Tensor zero(x0.shape());
        const int t = 2 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(s.steps - 1)));
        const double sab = s.sqrt_alpha_bar_at(t);
        const double noise = std::sqrt(1.0 - s.alpha_bar_at(t));

        const ForwardSample fwd = q_sample_closed(x0, zero, t, eps, s);
        const Tensor vanilla_xt = add_scaled(x0, sab, eps, noise);
        const Tensor step = q_sample_step(x0, zero, t, eps, s);
        const Tensor vanilla_step =
            add_scaled(x0, std::sqrt(s.alpha_at(t)), eps, std::sqrt(s.beta_at(t)));
        const auto [c0, ct] = posterior_coeffs(t, s);
        const Tensor post = posterior_mean(fwd.x_t, x0, zero, t, s);
        const Tensor vanilla_post = add_scaled(x0, c0, fwd.x_t, ct);
        const Tensor mu_a = mu_from_resnoise(fwd.x_t, resnoise_target(eps, zero, t, s), t, s);
        const Tensor mu_b = mu_from_resnoise(fwd.x_t, eps, t, s);

        for (std::size_t i = 0; i < x0.size() && ok; ++i) {
            ok = fwd.x_t.data()[i] == vanilla_xt.data()[i] &&
                 fwd.resnoise.data()[i] == eps.data()[i] &&
                 step.data()[i] == vanilla_step.data()[i] &&
                 post.data()[i] == vanilla_post.data()[i] &&
                 mu_a.data()[i] == mu_b.data()[i];
            worst = std::max(worst, std::fabs(post.data()[i] - vanilla_post.data()[i]));
        }
    }
    return {.name = "vanilla_reduction",
            .pass = ok,
            .detail = ok ? fmt::format("exact over {} instances", instances)
                         : fmt::format("mismatch, worst posterior gap {:.3g}", worst)};
}

CheckResult check_init_bias(const Schedule& s, std::uint64_t seed, int instances, double ulps) {
    Rng rng(seed);
    double worst = 0.0;
    const int tp = s.t_prime;
    const double sab = s.sqrt_alpha_bar_at(tp);
    const double noise = std::sqrt(1.0 - s.alpha_bar_at(tp));
    for (int n = 0; n < instances; ++n) {
        const bool flat = n % 2 == 0;
        const Tensor x0 = random_instance(rng, flat);
        const Tensor x_hat0 = random_instance(rng, flat);
        const Tensor eps = random_instance(rng, flat);
        const Tensor r = residual(x_hat0, x0);
        const Tensor closed = q_sample_closed(x0, r, tp, eps, s).x_t;
        const Tensor init = init_x_tprime(x_hat0, eps, s);
        const Tensor diff = sub(closed, init);
        const Tensor expected = scale(x0, 2.0 * sab - 1.0);
        Tensor budget(x0.shape());
        add_abs_term(budget, sab, x0);
        add_abs_term(budget, 1.0 - sab, r);
        add_abs_term(budget, 1.0 - sab, x_hat0);
        add_abs_term(budget, 2.0 * noise, eps);
        add_abs_term(budget, 2.0 * sab - 1.0, x0);
        worst = std::max(worst, ulp_budget_error(diff, expected, budget));
    }
    return {.name = "init_bias_identity",
            .pass = worst <= ulps,
            .detail = fmt::format("max {:.3g} ulp over {} instances (limit {})", worst, instances, ulps)};
}

CheckResult check_markov_moments(const Schedule& s, std::uint64_t seed, int samples) {
    Rng rng(seed);
    const double x0v = 0.7;
    const double xh0v = 0.3;
    const auto n = static_cast<std::size_t>(samples);
    Tensor x({n});
    std::fill(x.data().begin(), x.data().end(), x0v);
    Tensor r({n});
    std::fill(r.data().begin(), r.data().end(), xh0v - x0v);
    const std::vector<int> checkpoints = {1, s.t_prime / 2, s.t_prime};
    double worst_z = 0.0;
    std::string detail;
    bool ok = true;
    for (int t = 1; t <= s.t_prime; ++t) {
        const Tensor eps = gaussian(rng, {n});
        x = q_sample_step(x, r, t, eps, s);
        if (std::find(checkpoints.begin(), checkpoints.end(), t) == checkpoints.end()) continue;
        double mean = 0.0;
        for (double v : x.data()) mean += v;
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double v : x.data()) var += (v - mean) * (v - mean);
        var /= static_cast<double>(n - 1);
        const double sab = s.sqrt_alpha_bar_at(t);
        const double want_mean = sab * x0v + (1.0 - sab) * (xh0v - x0v);
        const double want_var = 1.0 - s.alpha_bar_at(t);
        const double se_mean = std::sqrt(want_var / static_cast<double>(n));
        const double se_var = want_var * std::sqrt(2.0 / static_cast<double>(n - 1));
        const double z_mean = std::fabs(mean - want_mean) / se_mean;
        const double z_var = std::fabs(var - want_var) / se_var;
        worst_z = std::max({worst_z, z_mean, z_var});
        ok = ok && z_mean <= 5.0 && z_var <= 5.0;
        detail += fmt::format("t={}: z_mean {:.2f}, z_var {:.2f}; ", t, z_mean, z_var);
    }
    detail += fmt::format("N={}", samples);
    return {.name = "markov_consistency", .pass = ok, .detail = detail};
}

CheckResult check_posterior_quadrature(const Schedule& s, std::uint64_t seed, int t_count,
                                       double tol) {
    Rng rng(seed);
    double worst_mean = 0.0;
    double worst_var = 0.0;
    for (int k = 0; k < t_count; ++k) {
        const int t = 2 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(s.steps - 1)));
        const double x0 = rng.gaussian_scalar();
        const double xh0 = rng.gaussian_scalar();
        const double eps = rng.gaussian_scalar();
        const double r = xh0 - x0;
        const double sab = s.sqrt_alpha_bar_at(t);
        const double x_t = sab * x0 + (1.0 - sab) * r + std::sqrt(1.0 - s.alpha_bar_at(t)) * eps;

        const double abar_prev = s.alpha_bar_prev(t);
        const double m_prior = std::sqrt(abar_prev) * x0 + (1.0 - std::sqrt(abar_prev)) * r;
        const double v_prior = 1.0 - abar_prev;
        const double sa = std::sqrt(s.alpha_at(t));
        const double v_lik = s.beta_at(t);
        // x_{t-1} value at which the likelihood of the observed x_t peaks
        const double m_lik = (x_t - (1.0 - sa) * r) / sa;
        const double sd_lik = std::sqrt(v_lik) / sa;
        const double lo = std::max(m_prior - 16.0 * std::sqrt(v_prior), m_lik - 16.0 * sd_lik);
        const double hi = std::min(m_prior + 16.0 * std::sqrt(v_prior), m_lik + 16.0 * sd_lik);
        if (!(lo < hi)) {
            return {.name = "posterior_quadrature",
                    .pass = false,
                    .detail = fmt::format("empty support window at t={}", t)};
        }
        const int intervals = 40000;
        const double h = (hi - lo) / intervals;
        double w_sum = 0.0;
        double wx_sum = 0.0;
        double wxx_sum = 0.0;
        for (int i = 0; i <= intervals; ++i) {
            const double v = lo + h * i;
            const double dp = (v - m_prior) * (v - m_prior) / (2.0 * v_prior);
            const double dl = (x_t - sa * v - (1.0 - sa) * r) * (x_t - sa * v - (1.0 - sa) * r) /
                              (2.0 * v_lik);
            const double w =
                std::exp(-dp - dl) * (i == 0 || i == intervals ? 1.0 : (i % 2 ? 4.0 : 2.0));
            w_sum += w;
            wx_sum += w * v;
            wxx_sum += w * v * v;
        }
        const double mean_q = wx_sum / w_sum;
        const double var_q = wxx_sum / w_sum - mean_q * mean_q;

        const Tensor one_xt({1}, x_t);
        const Tensor one_x0({1}, x0);
        const Tensor one_r({1}, r);
        const double mean_c = posterior_mean(one_xt, one_x0, one_r, t, s).data()[0];
        worst_mean = std::max(worst_mean, std::fabs(mean_q - mean_c));
        worst_var = std::max(worst_var, std::fabs(var_q - s.tilde_beta_at(t)));
    }
    const bool ok = worst_mean <= tol && worst_var <= tol;
    return {.name = "posterior_quadrature",
            .pass = ok,
            .detail = fmt::format("max |mean dev| {:.3g}, max |var dev| {:.3g} over {} draws (tol {:g})",
                                  worst_mean, worst_var, t_count, tol)};
}

CheckResult check_oracle_denoising(const Schedule& s, std::uint64_t seed, double tol) {
    Rng rng(seed);
    double carried = 1.0;
    for (int t = 2; t <= s.t_prime; ++t) {
        carried *= posterior_coeffs(t, s).ct;
    }
    double worst = 0.0;
    double bound = 0.0;
    for (const bool flat : {true, false}) {
        const Tensor x0 = flat ? gaussian(rng, {8}) : gaussian(rng, {16, 16});
        const Tensor bump = gaussian(rng, x0.shape());
        const Tensor x_hat0 = add_scaled(x0, 1.0, bump, 0.3);
        const Tensor eps = gaussian(rng, x0.shape());
        const Tensor out = oracle_denoise(x0, x_hat0, eps, s);
        worst = std::max(worst, max_abs(sub(out, x0)));
        const double tp_bias = std::fabs(2.0 * s.sqrt_alpha_bar_at(s.t_prime) - 1.0);
        const double init_dev = tp_bias * max_abs(x0) +
                                std::sqrt(1.0 - s.alpha_bar_at(s.t_prime)) * max_abs(eps);
        bound = std::max(bound, carried * init_dev);
    }
    return {.name = "oracle_denoising",
            .pass = worst <= tol + bound,
            .detail = fmt::format("max recovery error {:.3g}, carried bias bound {:.3g} (tol {:g})",
                                  worst, bound, tol)};
}

std::vector<CheckResult> run_oracle_checks(std::uint64_t seed, int steps) {
    const Schedule s = build_schedule(steps);
    std::vector<CheckResult> out;
    out.push_back(check_schedule_oracle(steps));
    out.push_back(check_two_form_equality(s, seed, 1000));
    out.push_back(check_posterior_exchange(s, seed + 1, 1000));
    out.push_back(check_vanilla_reduction(s, seed + 2, 200));
    out.push_back(check_init_bias(s, seed + 3, 1000));
    out.push_back(check_markov_moments(s, seed + 4, 100000));
    out.push_back(check_posterior_quadrature(s, seed + 5, 5));
    out.push_back(check_oracle_denoising(s, seed + 6));
    return out;
}

double gradcheck_max_rel_error(std::uint64_t seed, int trials) {
    Rng rng(seed);
    double worst = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        DenoiserConfig cfg;
        cfg.x_dim = 3 + trial % 2;
        cfg.cond_dim = 2;
        cfg.hidden = {5, 4 + trial % 3};
        cfg.time_emb.dim = 4;
        DenoiserParams params = DenoiserParams::init(cfg, rng);
        const Tensor x_t = gaussian(rng, {static_cast<std::size_t>(cfg.x_dim)});
        const Tensor cond = gaussian(rng, {static_cast<std::size_t>(cfg.cond_dim)});
        const Tensor target = gaussian(rng, {static_cast<std::size_t>(cfg.x_dim)});
        const int t = 1 + static_cast<int>(rng.uniform_int(50));
        const auto [loss, grad] = loss_and_grad(params, x_t, cond, t, target);
        const double h = 1e-5;
        for (std::size_t li = 0; li < params.layers.size(); ++li) {
            auto probe = [&](std::vector<double>& field, const std::vector<double>& gfield) {
                for (std::size_t i = 0; i < field.size(); ++i) {
                    const double saved = field[i];
                    field[i] = saved + h;
                    const double up = loss_and_grad(params, x_t, cond, t, target).first;
                    field[i] = saved - h;
                    const double dn = loss_and_grad(params, x_t, cond, t, target).first;
                    field[i] = saved;
                    const double fd = (up - dn) / (2.0 * h);
                    const double g = gfield[i];
                    const double rel = std::fabs(g - fd) / std::max(1e-6, std::fabs(g) + std::fabs(fd));
                    worst = std::max(worst, rel);
                }
            };
            probe(params.layers[li].w, grad.layers[li].w);
            probe(params.layers[li].b, grad.layers[li].b);
        }
    }
    return worst;
}

} // namespace resdiff
