#pragma once

#include <cmath>

#include "modwave/errors.hpp"

namespace modwave {

enum class kernel_kind { k0, k1, dtk0, dtk1 };

namespace detail {

// Fourier symbols of the damped wave fundamental solutions: m'' + m' + xi^2 m = 0
// with (m, m')(0) = (1,0) for K0 and (0,1) for K1. Characteristic roots
// lambda = (-1 +- sqrt(1-4 xi^2))/2; the three branches (real, double-root
// vicinity, complex) are evaluated in cancellation-free forms.
struct k_pair {
    double k0, k1;
};

inline k_pair kernel_k0k1(double t, double xi) {
    const double disc = 1.0 - 4.0 * xi * xi;
    if (std::fabs(disc) < 1e-4) {
        // series around the double root in y = disc * t^2 / 4
        const double y = 0.25 * disc * t * t;
        double s = 0.0, c = 0.0, term = 1.0;
        // S(y) = sum y^k/(2k+1)!, C(y) = sum y^k/(2k)!
        double fact_even = 1.0, fact_odd = 1.0; // (2k)!, (2k+1)!
        for (int k = 0; k <= 9; ++k) {
            c += term / fact_even;
            s += term / fact_odd;
            term *= y;
            fact_even *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
            fact_odd *= (2.0 * k + 2.0) * (2.0 * k + 3.0);
        }
        const double e = std::exp(-0.5 * t);
        return {e * (c + 0.5 * t * s), e * t * s};
    }
    if (disc > 0.0) {
        const double d = std::sqrt(disc);
        const double lp = 0.5 * (-1.0 + d), lm = 0.5 * (-1.0 - d);
        const double ep = std::exp(lp * t), em = std::exp(lm * t);
        return {(-lm * ep + lp * em) / d, (ep - em) / d};
    }
    const double w = 0.5 * std::sqrt(-disc);
    const double e = std::exp(-0.5 * t);
    const double sn = std::sin(w * t), cs = std::cos(w * t);
    return {e * (cs + 0.5 * sn / w), e * sn / w};
}

} // namespace detail

// Multiplier m(t, |xi|) for the requested fundamental-solution symbol.
// Time derivatives use the exact identities dtK0 = -xi^2 K1, dtK1 = K0 - K1.
inline double kernel_multiplier(double t, double xi, kernel_kind which) {
    if (!(t >= 0.0)) throw domain_error("kernel_multiplier: t must be >= 0");
    const auto [k0, k1] = detail::kernel_k0k1(t, xi);
    switch (which) {
        case kernel_kind::k0: return k0;
        case kernel_kind::k1: return k1;
        case kernel_kind::dtk0: return -xi * xi * k1;
        case kernel_kind::dtk1: return k0 - k1;
    }
    return 0.0;
}

// Q(t, xi) = int_0^t K1(s, xi) ds, the constant-source Duhamel weight.
// For xi away from 0 the ODE identity Q = (1 - K0)/xi^2 is exact; near 0 the
// two-root form with expm1 avoids the 0/0.
inline double kernel_duhamel_weight(double t, double xi) {
    if (!(t >= 0.0)) throw domain_error("kernel_duhamel_weight: t must be >= 0");
    if (xi < 0.3) {
        const double d = std::sqrt(1.0 - 4.0 * xi * xi);
        const double lp = 0.5 * (-1.0 + d), lm = 0.5 * (-1.0 - d);
        auto e1 = [](double x) { return std::fabs(x) < 1e-12 ? 1.0 + 0.5 * x : std::expm1(x) / x; };
        return t * (e1(lp * t) - e1(lm * t)) / d;
    }
    return (1.0 - kernel_multiplier(t, xi, kernel_kind::k0)) / (xi * xi);
}

} // namespace modwave
