#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "modwave/critical.hpp"
#include "modwave/errors.hpp"
#include "modwave/grid.hpp"
#include "modwave/modulus.hpp"
#include "modwave/solver.hpp"

namespace modwave {

// Smooth cutoff profile: 1 on [0,1/2], 0 on [1,inf), the e^{-1/x} partition in
// between (symmetric about rho = 3/4, C^infinity at the matching points).
inline double cutoff_profile(double rho) {
    if (rho <= 0.5) return 1.0;
    if (rho >= 1.0) return 0.0;
    auto h = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
    const double a = h(1.0 - rho), b = h(rho - 0.5);
    return a / (a + b);
}

// starred variant: vanishes on the inner plateau as well
inline double cutoff_profile_star(double rho) { return rho < 0.5 ? 0.0 : cutoff_profile(rho); }

// phi_R with an explicit power: cutoff((t^2+|x|^4)/R^4)^power. The canonical
// space-time cutoff is power = nu+2; the auxiliary weights use nu*p or nu*q.
inline double spacetime_cutoff(double t, double xabs, double R, double power,
                               bool starred = false) {
    if (!(R > 0.0)) throw domain_error("spacetime_cutoff: R must be > 0");
    if (t < 0.0) return 0.0;
    const double r4 = R * R * R * R;
    const double x2 = xabs * xabs;
    const double rho = (t * t + x2 * x2) / r4;
    const double base = starred ? cutoff_profile_star(rho) : cutoff_profile(rho);
    if (base == 0.0) return 0.0;
    if (base == 1.0) return 1.0;
    return std::pow(base, power);
}

inline bool in_QR(double t, double xabs, double R) {
    return t >= 0.0 && t <= R * R && xabs <= R;
}

// Q*_R = Q_R minus the box [0, R^2/sqrt(2)] x {|x| <= R/2^(1/4)}
inline bool in_QstarR(double t, double xabs, double R) {
    if (!in_QR(t, xabs, R)) return false;
    return !(t <= R * R / std::sqrt(2.0) && xabs <= R / std::pow(2.0, 0.25));
}

// grid-quadrature measure of Q*_R (midpoint rule in t and x)
inline double measure_QstarR(int n, double R, double dx, double dt) {
    const double tmax = R * R;
    const int nt = std::max(4, static_cast<int>(std::ceil(tmax / dt)));
    double acc = 0.0;
    if (n == 1) {
        const int nx = std::max(4, static_cast<int>(std::ceil(2.0 * R / dx)));
        const double hx = 2.0 * R / nx, ht = tmax / nt;
        for (int it = 0; it < nt; ++it) {
            const double t = (it + 0.5) * ht;
            for (int ix = 0; ix < nx; ++ix) {
                const double x = -R + (ix + 0.5) * hx;
                if (in_QstarR(t, std::fabs(x), R)) acc += hx * ht;
            }
        }
    } else {
        const int nx = std::max(4, static_cast<int>(std::ceil(2.0 * R / dx)));
        const double hx = 2.0 * R / nx, ht = tmax / nt;
        for (int it = 0; it < nt; ++it) {
            const double t = (it + 0.5) * ht;
            for (int iy = 0; iy < nx; ++iy) {
                const double y = -R + (iy + 0.5) * hx;
                for (int ix = 0; ix < nx; ++ix) {
                    const double x = -R + (ix + 0.5) * hx;
                    if (in_QstarR(t, std::hypot(x, y), R)) acc += hx * hx * ht;
                }
            }
        }
    }
    return acc;
}

// trajectory view over stored snapshots; fields are (u, v) values on g
struct trajectory {
    grid g;
    std::vector<snapshot> snaps;

    double horizon() const { return snaps.empty() ? 0.0 : snaps.back().t; }
};

inline trajectory trajectory_from(const sim_outcome& out) {
    if (out.trajectory.empty())
        throw coverage_error("trajectory_from: simulation stored no snapshots");
    return {out.g, out.trajectory};
}

namespace detail {

// space-time quadrature of transform(|field|) * cutoff^power over snapshots
// (trapezoid in t, Riemann in x); field_u selects u vs v.
template <class Transform>
double spacetime_integral(const trajectory& tr, bool field_u, double R, double power,
                          bool starred, Transform&& phi_of_abs) {
    if (tr.horizon() + 1e-9 < R * R)
        throw coverage_error("trajectory shorter than R^2");
    const grid& g = tr.g;
    double acc = 0.0;
    double prev_t = 0.0, prev_slice = 0.0;
    bool have_prev = false;
    for (const auto& sn : tr.snaps) {
        double slice = 0.0;
        const auto& vals = field_u ? sn.u : sn.v;
        if (g.n == 1) {
            for (int j = 0; j < g.points; ++j) {
                const double w = spacetime_cutoff(sn.t, std::fabs(g.coord(j)), R, power, starred);
                if (w > 0.0) slice += phi_of_abs(std::fabs(vals[j])) * w;
            }
        } else {
            for (int jy = 0; jy < g.points; ++jy) {
                const double y = g.coord(jy);
                for (int jx = 0; jx < g.points; ++jx) {
                    const double w = spacetime_cutoff(sn.t, std::hypot(g.coord(jx), y), R, power,
                                                      starred);
                    if (w > 0.0)
                        slice += phi_of_abs(std::fabs(vals[static_cast<std::size_t>(jy) * g.points + jx])) * w;
                }
            }
        }
        slice *= g.cell();
        if (have_prev) acc += 0.5 * (sn.t - prev_t) * (slice + prev_slice);
        prev_t = sn.t;
        prev_slice = slice;
        have_prev = true;
        if (sn.t >= R * R) break; // cutoff support ends at t = R^2
    }
    return acc;
}

} // namespace detail

// I_R and J_R: the phi_R-weighted space-time masses of the two sources
inline std::pair<double, double> functionals(const trajectory& tr, const critical_pair& pair,
                                             const modulus& mu1, const modulus& mu2, double R,
                                             double nu, clamp_mode clamp = clamp_mode::freeze) {
    auto phi_p = [&](double a) {
        return a == 0.0 ? 0.0 : std::pow(a, pair.p) * mu1.eval_clamped(a, clamp);
    };
    auto phi_q = [&](double a) {
        return a == 0.0 ? 0.0 : std::pow(a, pair.q) * mu2.eval_clamped(a, clamp);
    };
    const double I = detail::spacetime_integral(tr, false, R, nu + 2.0, false, phi_p);
    const double J = detail::spacetime_integral(tr, true, R, nu + 2.0, false, phi_q);
    return {I, J};
}

// test hook: unit transform (p = 0, mu == 1), used to probe the cutoff geometry
inline double functional_unit(const trajectory& tr, double R, double nu) {
    return detail::spacetime_integral(tr, false, R, nu + 2.0, false,
                                      [](double) { return 1.0; });
}

struct ledger_row {
    double R = 0.0;
    double I = 0.0, J = 0.0;
    double g_p = 0.0, g_q = 0.0;
    double G_p = 0.0, G_q = 0.0;
    double res1 = 0.0, res2 = 0.0; // empirical constants of the two ODE inequalities
    double c_emp = 0.0;            // min of the two
};

struct blowup_ledger {
    std::vector<ledger_row> rows;
    double nu = 0.0;
    double deriv_residual_p = 0.0; // max relative |G'(R) R - g(R)| / g(R)
    double deriv_residual_q = 0.0;
};

namespace detail {

inline double g_lambda(const trajectory& tr, const critical_pair& pair, const modulus& mu,
                       bool field_u, double lambda, double nu, clamp_mode clamp) {
    const double p = field_u ? pair.q : pair.p;
    auto phi = [&](double a) {
        return a == 0.0 ? 0.0 : std::pow(a, p) * mu.eval_clamped(a, clamp);
    };
    return spacetime_integral(tr, field_u, lambda, nu * p, true, phi);
}

// int_lo^hi g(lambda)/lambda dlambda by composite G7K15 in log-lambda
template <class GFn>
double accumulate_G(const GFn& g, double lo, double hi, int segments = 6) {
    double acc = 0.0;
    const double la = std::log(lo), lb = std::log(hi);
    for (int s = 0; s < segments; ++s) {
        const double a = la + (lb - la) * s / segments;
        const double b = la + (lb - la) * (s + 1) / segments;
        double err;
        acc += quad_g7k15([&](double u) { return g(std::exp(u)); }, a, b, err);
    }
    return acc;
}

} // namespace detail

// Builds the per-R ledger: g at each ladder point, G by quadrature in lambda,
// and the central-difference check of G'(R) R = g(R) at half-ladder steps.
inline blowup_ledger g_and_G(const trajectory& tr, const critical_pair& pair, const modulus& mu1,
                             const modulus& mu2, double nu, const std::vector<double>& ladder,
                             clamp_mode clamp = clamp_mode::freeze) {
    if (ladder.size() < 2) throw ledger_too_short("g_and_G: need at least 2 ladder points");
    if (tr.horizon() + 1e-9 < ladder.back() * ladder.back())
        throw coverage_error("g_and_G: trajectory shorter than largest R^2");

    blowup_ledger led;
    led.nu = nu;
    auto gp = [&](double lam) { return detail::g_lambda(tr, pair, mu1, false, lam, nu, clamp); };
    auto gq = [&](double lam) { return detail::g_lambda(tr, pair, mu2, true, lam, nu, clamp); };

    const double lam_lo = ladder.front() / 64.0;
    // small-lambda tail of int g/lambda: g ~ lambda^(n+2) there
    double Gp = gp(lam_lo) / (pair.n + 2.0) + detail::accumulate_G(gp, lam_lo, ladder.front());
    double Gq = gq(lam_lo) / (pair.n + 2.0) + detail::accumulate_G(gq, lam_lo, ladder.front());

    double prev_R = ladder.front();
    for (std::size_t k = 0; k < ladder.size(); ++k) {
        const double R = ladder[k];
        if (k > 0) {
            Gp += detail::accumulate_G(gp, prev_R, R, 3);
            Gq += detail::accumulate_G(gq, prev_R, R, 3);
            prev_R = R;
        }
        ledger_row row;
        row.R = R;
        auto [I, J] = functionals(tr, pair, mu1, mu2, R, nu, clamp);
        row.I = I;
        row.J = J;
        row.g_p = gp(R);
        row.g_q = gq(R);
        row.G_p = Gp;
        row.G_q = Gq;
        led.rows.push_back(row);
    }

    // derivative relation at interior ladder points, half-step central difference
    for (std::size_t k = 0; k < led.rows.size(); ++k) {
        const double R = led.rows[k].R;
        const double h = std::sqrt(ladder.size() > 1 ? ladder[1] / ladder[0] : 1.25);
        const double Ra = R / h, Rb = R * h;
        if (Rb * Rb > tr.horizon() + 1e-9) continue;
        const double dGp = detail::accumulate_G(gp, Ra, Rb, 2);
        const double dGq = detail::accumulate_G(gq, Ra, Rb, 2);
        const double dlog = std::log(Rb / Ra);
        if (led.rows[k].g_p > 0.0)
            led.deriv_residual_p = std::max(led.deriv_residual_p,
                                            std::fabs(dGp / dlog - led.rows[k].g_p) / led.rows[k].g_p);
        if (led.rows[k].g_q > 0.0)
            led.deriv_residual_q = std::max(led.deriv_residual_q,
                                            std::fabs(dGq / dlog - led.rows[k].g_q) / led.rows[k].g_q);
    }
    return led;
}

struct ode_check_report {
    bool applicable = false; // false for the zero solution
    double c0 = 0.0;
    double min_c = 0.0;      // min over the ladder of the per-row empirical constants
    int rows_checked = 0;
};

// Empirical constants of the derived differential inequalities. G'(r) r is
// taken from the ledger identity g(r); theta uses mu(C0 r^-n) with
// C0 = c0_scale * min(G_p(R0), G_q(R0)).
inline ode_check_report ode_inequality_check(blowup_ledger& led, const critical_pair& pair,
                                             const modulus& mu1, const modulus& mu2,
                                             double c0_scale = 1.0, double R0 = 0.0,
                                             clamp_mode clamp = clamp_mode::freeze) {
    ode_check_report rep;
    if (led.rows.empty()) return rep;
    if (R0 <= 0.0) R0 = led.rows.front().R;
    std::vector<ledger_row*> above;
    for (auto& r : led.rows)
        if (r.R > R0 * (1.0 + 1e-12)) above.push_back(&r);
    if (above.size() < 4)
        throw ledger_too_short("ode_inequality_check: need >= 4 ladder points above R0");

    const ledger_row& base = led.rows.front();
    if (base.G_p <= 0.0 || base.G_q <= 0.0) {
        rep.applicable = false; // zero solution: inequalities are vacuous
        return rep;
    }
    rep.applicable = true;
    rep.c0 = c0_scale * std::min(base.G_p, base.G_q);
    rep.min_c = std::numeric_limits<double>::infinity();
    const double n = pair.n;
    for (auto* r : above) {
        const double arg = rep.c0 * std::pow(r->R, -n);
        const double th1 = std::pow(r->R, -(n * (pair.p - 1.0) - 1.0)) * mu1.eval_clamped(arg, clamp);
        const double th2 = std::pow(r->R, -(n * (pair.q - 1.0) - 1.0)) * mu2.eval_clamped(arg, clamp);
        // G'(r) = g(r)/r by the ledger identity
        const double c1 = (r->g_p / r->R) / (th1 * std::pow(r->G_q, pair.p));
        const double c2 = (r->g_q / r->R) / (th2 * std::pow(r->G_p, pair.q));
        r->res1 = c1;
        r->res2 = c2;
        r->c_emp = std::min(c1, c2);
        rep.min_c = std::min(rep.min_c, r->c_emp);
        ++rep.rows_checked;
    }
    return rep;
}

// strictly increasing Phi(s) = s^q mu(s) (freeze extension past s_max);
// inverse by monotone bisection
inline double phi_inverse(double y, double q, const modulus& mu,
                          clamp_mode clamp = clamp_mode::freeze, double tol = 1e-10) {
    if (!(y >= 0.0)) throw domain_error("phi_inverse: y must be >= 0");
    if (y == 0.0) return 0.0;
    auto phi = [&](double s) { return std::pow(s, q) * mu.eval_clamped(s, clamp); };
    double hi = 1.0;
    while (phi(hi) < y) {
        hi *= 2.0;
        if (hi > 1e100) throw domain_error("phi_inverse: y out of range");
    }
    double lo = 0.0;
    // bisect to relative precision of the root itself
    while (hi - lo > tol * std::max(lo, 1e-300)) {
        const double mid = 0.5 * (lo + hi);
        (phi(mid) < y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Discrete Jensen slack on Q*_R for one snapshot:
//   Phi(mean of f) <= mean of Phi(f),  f = |u| (phi*_R)^(nu/(nu+2)),
// returns mean(Phi(f)) - Phi(mean(f)) (nonnegative when Phi is convex there).
inline double jensen_slack(const grid& g, const std::vector<double>& u, double t,
                           const critical_pair& pair, const modulus& mu2, double R, double nu,
                           clamp_mode clamp = clamp_mode::freeze) {
    auto phi = [&](double s) {
        return s == 0.0 ? 0.0 : std::pow(s, pair.q) * mu2.eval_clamped(s, clamp);
    };
    double sum_f = 0.0, sum_phi = 0.0;
    std::size_t count = 0;
    auto visit = [&](double xabs, double val) {
        if (!in_QstarR(t, xabs, R)) return;
        // f = |u| (phi*_R)^(nu/(nu+2)) = |u| * cutoff^nu
        const double f = std::fabs(val) * spacetime_cutoff(t, xabs, R, nu, true);
        sum_f += f;
        sum_phi += phi(f);
        ++count;
    };
    if (g.n == 1) {
        for (int j = 0; j < g.points; ++j) visit(std::fabs(g.coord(j)), u[j]);
    } else {
        for (int jy = 0; jy < g.points; ++jy)
            for (int jx = 0; jx < g.points; ++jx)
                visit(std::hypot(g.coord(jx), g.coord(jy)),
                      u[static_cast<std::size_t>(jy) * g.points + jx]);
    }
    if (count == 0) return 0.0;
    return sum_phi / count - phi(sum_f / count);
}

// test-function exponent paired with the smooth profile; the admissible
// range depends on the curve point
struct test_function {
    double nu = 0.0;

    double profile(double rho) const { return cutoff_profile(rho); }

    void validate(const critical_pair& pair) const {
        if (!(nu > 0.0)) throw parameter_error("test_function: nu must be > 0");
        const double bound = std::max(2.0 / (pair.p - 1.0), 2.0 / (pair.q - 1.0));
        if (nu < bound * (1.0 - 1e-12))
            throw parameter_error("test_function: nu below max(2/(p-1), 2/(q-1))");
    }
};

inline std::vector<double> geometric_ladder(double R0, double ratio, int count) {
    if (!(R0 > 0.0) || !(ratio > 1.0) || count < 2)
        throw parameter_error("geometric_ladder: need R0 > 0, ratio > 1, count >= 2");
    std::vector<double> out;
    double r = R0;
    for (int i = 0; i < count; ++i) {
        out.push_back(r);
        r *= ratio;
    }
    return out;
}

// default test-function exponent for a pair: max(2/(p-1), 2/(q-1)) = 2/(p-1)
inline double default_nu(const critical_pair& pair) { return 2.0 / (pair.p - 1.0); }

} // namespace modwave
