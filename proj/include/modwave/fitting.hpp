#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "modwave/critical.hpp"
#include "modwave/errors.hpp"
#include "modwave/spectral.hpp"

namespace modwave {

struct decay_report {
    std::string unknown;     // "u" or "v"
    std::string kind;        // "l2", "linf", "grad_l2"
    double t1 = 0.0, t2 = 0.0;
    double fitted = 0.0;     // least-squares slope of log(norm) vs log(1+t)
    double ci95 = 0.0;
    double predicted = 0.0;
    std::optional<double> compensated; // slope after dividing out ell(t)
    bool pass = false;       // |fitted - predicted| <= 0.1 (compensated when present)
};

namespace detail {

struct ls_fit {
    double slope = 0.0, stderr_slope = 0.0;
};

inline ls_fit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    ls_fit f;
    f.slope = sxy / sxx;
    if (n > 2) {
        double ss = 0;
        const double b0 = my - f.slope * mx;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - b0 - f.slope * x[i];
            ss += r * r;
        }
        f.stderr_slope = std::sqrt(ss / ((n - 2) * sxx));
    }
    return f;
}

} // namespace detail

// Fits log(norm) against log(1+t) on [t1, t2]. Requires t1 >= 10, at least a
// decade of window, >= 20 probes, positive norms. When an ell config is given
// the series is divided by ell(t) first and the verdict uses that slope.
inline decay_report fit_decay(const std::vector<std::pair<double, double>>& series, double t1,
                              double t2, double predicted,
                              const loss_weight_config* ell = nullptr,
                              double tolerance = 0.1) {
    if (!(t1 >= 10.0)) throw parameter_error("fit_decay: window must start at t >= 10");
    if (!(t2 >= 10.0 * t1)) throw parameter_error("fit_decay: window must span >= 1 decade");
    std::vector<double> x, y, yc;
    for (const auto& [t, val] : series) {
        if (t < t1 - 1e-12 || t > t2 + 1e-12) continue;
        if (!(val > 0.0)) throw insufficient_data("fit_decay: nonpositive norm in window");
        x.push_back(std::log1p(t));
        y.push_back(std::log(val));
        if (ell) yc.push_back(std::log(val / loss_weight(*ell, t)));
    }
    if (x.size() < 20) throw insufficient_data("fit_decay: need >= 20 probes in window");

    decay_report rep;
    rep.t1 = t1;
    rep.t2 = t2;
    rep.predicted = predicted;
    const auto f = detail::least_squares(x, y);
    rep.fitted = f.slope;
    rep.ci95 = 1.96 * f.stderr_slope;
    double decisive = rep.fitted;
    if (ell) {
        rep.compensated = detail::least_squares(x, yc).slope;
        decisive = *rep.compensated;
    }
    rep.pass = std::fabs(decisive - predicted) <= tolerance;
    return rep;
}

inline std::vector<std::pair<double, double>> probe_series(const std::vector<norm_probe>& probes,
                                                           const std::string& unknown,
                                                           norm_kind kind) {
    std::vector<std::pair<double, double>> out;
    for (const auto& p : probes) {
        if (p.unknown != unknown) continue;
        double v = 0.0;
        switch (kind) {
            case norm_kind::l2: v = p.n.l2; break;
            case norm_kind::linf: v = p.n.linf; break;
            case norm_kind::grad_l2: v = p.n.h1; break;
        }
        out.emplace_back(p.t, v);
    }
    return out;
}

} // namespace modwave
