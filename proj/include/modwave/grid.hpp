#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "modwave/errors.hpp"

namespace modwave {

// Uniform periodic box [-L, L)^n, n = 1 or 2, N points per axis (power of two).
// Wavenumbers are xi_k = pi k / L, k in [-N/2, N/2).
struct grid {
    int n = 1;
    double half_length = 1.0; // L
    int points = 16;          // N per axis

    grid() = default;
    grid(int dim, double L, int N) : n(dim), half_length(L), points(N) {
        if (n != 1 && n != 2) throw domain_error("grid: n must be 1 or 2");
        if (!(L > 0.0)) throw domain_error("grid: L must be > 0");
        if (N < 16 || (N & (N - 1)) != 0) throw domain_error("grid: N must be a power of two >= 16");
    }

    double dx() const { return 2.0 * half_length / points; }
    std::size_t size() const {
        return n == 1 ? static_cast<std::size_t>(points)
                      : static_cast<std::size_t>(points) * points;
    }
    double cell() const { return n == 1 ? dx() : dx() * dx(); }
    double coord(int j) const { return -half_length + j * dx(); }
    // signed integer wavenumber for full-length axis index
    int wave_index(int i) const { return i <= points / 2 ? i : i - points; }
    double xi(int k) const { return M_PI * k / half_length; }

    bool operator==(const grid& o) const {
        return n == o.n && half_length == o.half_length && points == o.points;
    }
};

struct grid_field {
    grid g;
    std::vector<double> v;

    grid_field() = default;
    explicit grid_field(const grid& gr, double fill = 0.0) : g(gr), v(gr.size(), fill) {}

    double& operator()(std::size_t i) { return v[i]; }
    double operator()(std::size_t i) const { return v[i]; }

    bool finite() const {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }
    double max_abs() const {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::fabs(x));
        return m;
    }
    double mean() const {
        double s = 0.0;
        for (double x : v) s += x;
        return s / v.size();
    }
};

inline void require_same_grid(const grid_field& a, const grid_field& b) {
    if (!(a.g == b.g)) throw grid_mismatch("fields live on different grids");
}

enum class profile_kind { gaussian, bump, dgaussian };

// data profiles with peak amplitude 1; gaussian and bump are radial,
// dgaussian is the odd x-derivative shape (zero mean)
inline double profile_value(profile_kind kind, double x, double y, double radius) {
    const double r2 = (x * x + y * y) / (radius * radius);
    switch (kind) {
        case profile_kind::gaussian: return std::exp(-r2);
        case profile_kind::bump:
            if (r2 >= 1.0) return 0.0;
            return std::exp(1.0 - 1.0 / (1.0 - r2));
        case profile_kind::dgaussian: return -2.0 * (x / radius) * std::exp(-r2);
    }
    return 0.0;
}

inline grid_field make_profile_field(const grid& g, profile_kind kind, double radius,
                                     double amplitude) {
    grid_field f(g);
    if (amplitude == 0.0) return f;
    if (g.n == 1) {
        for (int j = 0; j < g.points; ++j)
            f.v[j] = amplitude * profile_value(kind, g.coord(j), 0.0, radius);
    } else {
        for (int jy = 0; jy < g.points; ++jy) {
            const double y = g.coord(jy);
            for (int jx = 0; jx < g.points; ++jx)
                f.v[static_cast<std::size_t>(jy) * g.points + jx] =
                    amplitude * profile_value(kind, g.coord(jx), y, radius);
        }
    }
    return f;
}

} // namespace modwave
