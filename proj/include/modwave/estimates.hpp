#pragma once

#include <cmath>
#include <vector>

#include "modwave/critical.hpp"
#include "modwave/fitting.hpp"
#include "modwave/grid.hpp"
#include "modwave/modulus.hpp"
#include "modwave/quadrature.hpp"
#include "modwave/spectral.hpp"

namespace modwave {

struct matsumura_config {
    int n = 1;
    double t_max = 800.0;
    profile_kind profile = profile_kind::bump;
    double radius = 2.0;
    double amplitude = 1.0;
    double box_half_length = 0.0; // 0: auto
    int grid_points = 0;          // 0: 65536 (1D) / 2048 (2D)
    double fit_t1 = 10.0;
    int probes = 48;
};

// Linear-flow decay check: evolves (w0, w1) = (0, data) exactly per mode,
// probes on a log-spaced time grid, and fits each norm against the linear
// rates -n/4 - k/2 (L2 scale) and -n/2 (Linf).
inline std::vector<decay_report> matsumura_check(const matsumura_config& cfg) {
    if (cfg.n != 1 && cfg.n != 2) throw config_error("matsumura_check: n must be 1 or 2");
    const double cap = cfg.n == 1 ? 1000.0 : 200.0;
    if (cfg.t_max > cap * (1.0 + 1e-12))
        throw config_error("matsumura_check: t_max capped at " + std::to_string(cap) +
                           " for n = " + std::to_string(cfg.n));
    const double L = cfg.box_half_length > 0 ? cfg.box_half_length
                                             : 1.1 * (cfg.t_max + cfg.radius);
    const int N = cfg.grid_points > 0 ? cfg.grid_points : (cfg.n == 1 ? 65536 : 2048);
    const grid g(cfg.n, L, N);
    grid_field w0(g);
    grid_field w1 = make_profile_field(g, cfg.profile, cfg.radius, cfg.amplitude);

    std::vector<norm_probe> probes;
    const double t0 = 1.0;
    for (int i = 0; i <= cfg.probes; ++i) {
        const double t = t0 * std::pow(cfg.t_max / t0, static_cast<double>(i) / cfg.probes);
        auto [w, wt] = linear_evolve(w0, w1, t);
        probes.push_back({t, "w", norms(w)});
    }

    std::vector<decay_report> out;
    const double n = cfg.n;
    struct spec_row {
        norm_kind kind;
        double predicted;
        const char* name;
    } rows[] = {{norm_kind::l2, -n / 4.0, "l2"},
                {norm_kind::linf, -n / 2.0, "linf"},
                {norm_kind::grad_l2, -n / 4.0 - 0.5, "grad_l2"}};
    for (const auto& r : rows) {
        auto rep = fit_decay(probe_series(probes, "w", r.kind), cfg.fit_t1, cfg.t_max, r.predicted);
        rep.unknown = "w";
        rep.kind = r.name;
        out.push_back(rep);
    }
    return out;
}

struct convolution_bound_report {
    std::vector<double> ratios; // LHS/RHS per grid time
    double sup_ratio = 0.0;
    bool pass = false;
};

// Compares int_0^t (1+t-tau)^-alpha (1+tau)^-1 mu1(C(1+tau)^-gamma)^b1 mu2(...)^b2 dtau
// against (1+t)^-alpha times the same integral without the convolution weight.
inline convolution_bound_report convolution_bound_check(const modulus& mu1, const modulus& mu2, double alpha,
                                      double beta1, double beta2, double gamma,
                                      const std::vector<double>& t_grid, double C = 0.05,
                                      double threshold = 100.0) {
    if (alpha > 1.0) throw parameter_error("convolution_bound_check: alpha must be <= 1");
    if (beta1 < 0.0 || beta2 < 0.0 || gamma < 0.0)
        throw parameter_error("convolution_bound_check: beta1, beta2, gamma must be >= 0");
    auto weight = [&](double tau) {
        double w = 1.0 / (1.0 + tau);
        if (beta1 > 0.0)
            w *= std::pow(mu1.eval_log(std::log(1.0 / C) + gamma * std::log1p(tau)), beta1);
        if (beta2 > 0.0)
            w *= std::pow(mu2.eval_log(std::log(1.0 / C) + gamma * std::log1p(tau)), beta2);
        return w;
    };
    convolution_bound_report rep;
    for (double t : t_grid) {
        const double lhs = quad_adaptive(
            [&](double tau) { return std::pow(1.0 + t - tau, -alpha) * weight(tau); }, 0.0, t,
            1e-10);
        const double rhs = std::pow(1.0 + t, -alpha) * quad_adaptive(weight, 0.0, t, 1e-10);
        rep.ratios.push_back(lhs / rhs);
        rep.sup_ratio = std::max(rep.sup_ratio, lhs / rhs);
    }
    rep.pass = std::isfinite(rep.sup_ratio) && rep.sup_ratio <= threshold;
    return rep;
}

struct gn_params {
    int j = 0, m = 1;
    double theta = 0.5;
    double r = 2.0, r1 = 2.0, r2 = 2.0; // use INFINITY for sup norms
};

inline double lp_norm(const grid_field& f, double r) {
    if (std::isinf(r)) {
        double mx = 0.0;
        for (double x : f.v) mx = std::max(mx, std::fabs(x));
        return mx;
    }
    double acc = 0.0;
    for (double x : f.v) acc += std::pow(std::fabs(x), r);
    return std::pow(acc * f.g.cell(), 1.0 / r);
}

inline grid_field gradient_magnitude(const grid_field& f) {
    if (f.g.n == 1) {
        grid_field gx = spectral_derivative(f, 0);
        for (double& x : gx.v) x = std::fabs(x);
        return gx;
    }
    grid_field gx = spectral_derivative(f, 0), gy = spectral_derivative(f, 1);
    grid_field out(f.g);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = std::hypot(gx.v[i], gy.v[i]);
    return out;
}

// ||grad^j f||_r / (||grad^m f||_r1^theta ||f||_r2^(1-theta)) with the exponent
// bookkeeping j - n/r = (m - n/r1) theta - (n/r2)(1 - theta) enforced.
inline double gn_ratio(const grid_field& f, const gn_params& p) {
    const double n = f.g.n;
    if (p.j != 0 || p.m != 1) throw parameter_error("gn_ratio: supported orders are j=0, m=1");
    if (!(p.theta >= static_cast<double>(p.j) / p.m) || !(p.theta <= 1.0))
        throw parameter_error("gn_ratio: theta out of [j/m, 1]");
    auto inv = [](double r) { return std::isinf(r) ? 0.0 : 1.0 / r; };
    const double lhs_book = p.j - n * inv(p.r);
    const double rhs_book = (p.m - n * inv(p.r1)) * p.theta - n * inv(p.r2) * (1.0 - p.theta);
    if (std::fabs(lhs_book - rhs_book) > 1e-12)
        throw parameter_error("gn_ratio: exponent bookkeeping violated");

    const double num = lp_norm(f, p.r);
    const grid_field gmag = gradient_magnitude(f);
    const double den = std::pow(lp_norm(gmag, p.r1), p.theta) *
                       std::pow(lp_norm(f, p.r2), 1.0 - p.theta);
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return num / den;
}

} // namespace modwave
