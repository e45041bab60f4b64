#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "modwave/fft.hpp"
#include "modwave/grid.hpp"
#include "modwave/kernels.hpp"

namespace modwave {

struct norm_entry {
    double l1 = 0.0, l2 = 0.0, linf = 0.0, h1 = 0.0; // h1 = ||grad f||_L2
};

struct norm_probe {
    double t = 0.0;
    std::string unknown; // "u" or "v"
    norm_entry n;
};

// L1, L2, Linf by Riemann sums with cell weight dx^n; gradient seminorm by Parseval.
inline norm_entry norms(const grid_field& f) {
    if (!f.finite()) throw nonfinite_input("norms: field has non-finite values");
    norm_entry out;
    double s1 = 0.0, s2 = 0.0, mx = 0.0;
    for (double x : f.v) {
        s1 += std::fabs(x);
        s2 += x * x;
        mx = std::max(mx, std::fabs(x));
    }
    const double cell = f.g.cell();
    out.l1 = s1 * cell;
    out.l2 = std::sqrt(s2 * cell);
    out.linf = mx;

    std::vector<std::complex<double>> spec;
    fft::forward(f, spec);
    double g2 = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const double xi = fft::xi_abs(f.g, i);
        g2 += fft::pair_weight(f.g, i) * xi * xi * std::norm(spec[i]);
    }
    // discrete Parseval: sum_j |f_j|^2 dx^n = (dx^n / N^n) sum_k |fhat_k|^2
    out.h1 = std::sqrt(g2 * cell / static_cast<double>(f.g.size()));
    return out;
}

// spectral partial derivative along axis (0 = x, 1 = y)
inline grid_field spectral_derivative(const grid_field& f, int axis = 0) {
    if (!f.finite()) throw nonfinite_input("spectral_derivative: non-finite field");
    std::vector<std::complex<double>> spec;
    fft::forward(f, spec);
    const grid& g = f.g;
    const std::size_t half = static_cast<std::size_t>(g.points / 2 + 1);
    for (std::size_t i = 0; i < spec.size(); ++i) {
        double xi;
        if (g.n == 1) {
            xi = g.xi(static_cast<int>(i));
        } else {
            const int iy = static_cast<int>(i / half);
            const int ix = static_cast<int>(i % half);
            xi = (axis == 0) ? g.xi(ix) : g.xi(g.wave_index(iy));
        }
        spec[i] *= std::complex<double>(0.0, xi);
    }
    // Nyquist derivative mode is dropped (its imaginary pair is not representable)
    grid_field out;
    fft::inverse(g, spec, out);
    return out;
}

inline grid_field apply_kernel(const grid_field& f, double t, kernel_kind which) {
    if (!f.finite()) throw nonfinite_input("apply_kernel: non-finite field");
    std::vector<std::complex<double>> spec;
    fft::forward(f, spec);
    for (std::size_t i = 0; i < spec.size(); ++i)
        spec[i] *= kernel_multiplier(t, fft::xi_abs(f.g, i), which);
    grid_field out;
    fft::inverse(f.g, spec, out);
    return out;
}

// exact linear flow: w = K0(t)*w0 + K1(t)*w1, wt = dtK0(t)*w0 + dtK1(t)*w1
inline std::pair<grid_field, grid_field> linear_evolve(const grid_field& w0,
                                                       const grid_field& w1, double t) {
    require_same_grid(w0, w1);
    std::vector<std::complex<double>> s0, s1;
    fft::forward(w0, s0);
    fft::forward(w1, s1);
    std::vector<std::complex<double>> a(s0.size()), b(s0.size());
    for (std::size_t i = 0; i < s0.size(); ++i) {
        const double xi = fft::xi_abs(w0.g, i);
        const auto kk = detail::kernel_k0k1(t, xi);
        a[i] = kk.k0 * s0[i] + kk.k1 * s1[i];
        b[i] = (-xi * xi * kk.k1) * s0[i] + (kk.k0 - kk.k1) * s1[i];
    }
    grid_field w, wt;
    fft::inverse(w0.g, a, w);
    fft::inverse(w0.g, b, wt);
    return {std::move(w), std::move(wt)};
}

} // namespace modwave
