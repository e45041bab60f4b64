#pragma once

#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "modwave/critical.hpp"
#include "modwave/fft.hpp"
#include "modwave/grid.hpp"
#include "modwave/kernels.hpp"
#include "modwave/modulus.hpp"
#include "modwave/spectral.hpp"

namespace modwave {

struct sim_state {
    grid_field u, ut, v, vt;
    double t = 0.0;
};

struct data_spec {
    profile_kind profile = profile_kind::gaussian;
    double radius = 2.0;
    double amp_u0 = 0.0, amp_u1 = 0.0, amp_v0 = 0.0, amp_v1 = 0.0;

    double max_amp() const {
        return std::max(std::max(std::fabs(amp_u0), std::fabs(amp_u1)),
                        std::max(std::fabs(amp_v0), std::fabs(amp_v1)));
    }
};

// space-time forcing appended to the right-hand side (used by manufactured
// solutions); y is ignored in 1D
using forcing_fn = std::function<double(double t, double x, double y)>;

struct sim_config {
    critical_pair pair;
    modulus mu1 = modulus::power(1.0);
    modulus mu2 = modulus::power(1.0);
    data_spec data;
    double dt = 0.05;
    double t_max = 100.0;
    double probe_dt = 1.0;
    double blowup_threshold = 1e6;
    double box_half_length = 0.0; // 0: auto, radius + t_max + 10% margin
    int grid_points = 0;          // 0: 8192 in 1D, 1024 in 2D
    bool nonlinearity_on = true;
    clamp_mode clamp = clamp_mode::freeze;
    double snapshot_dt = 0.0;     // 0: no trajectory capture
    forcing_fn forcing_u, forcing_v;

    grid make_grid() const {
        double L = box_half_length;
        if (L <= 0.0) L = 1.1 * (t_max + data.radius);
        int N = grid_points;
        if (N <= 0) N = pair.n == 1 ? 8192 : 1024;
        return grid(pair.n, L, N);
    }

    void validate() const {
        pair.validate();
        if (!(dt > 0.0) || !(t_max > 0.0) || !(probe_dt > 0.0))
            throw config_error("sim_config: dt, t_max, probe_dt must be > 0");
        if (!(blowup_threshold > data.max_amp()))
            throw config_error("sim_config: blowup_threshold must exceed the data amplitude");
        if (!(data.radius > 0.0)) throw config_error("sim_config: radius must be > 0");
        // memory rule: the box grows with the horizon (L >= t_max + radius)
        const double cap = pair.n == 1 ? 1000.0 : 200.0;
        if (t_max > cap * (1.0 + 1e-12))
            throw config_error("sim_config: t_max capped at " + std::to_string(cap) +
                               " for n = " + std::to_string(pair.n));
    }
};

enum class sim_status { reached_tmax, blowup_detected, numerical_failure };

inline const char* to_string(sim_status s) {
    switch (s) {
        case sim_status::reached_tmax: return "ReachedTmax";
        case sim_status::blowup_detected: return "BlowUpDetected";
        default: return "NumericalFailure";
    }
}

struct snapshot {
    double t = 0.0;
    std::vector<double> u, v;
};

struct sim_outcome {
    sim_status status = sim_status::reached_tmax;
    double t_star = 0.0; // meaningful for blowup_detected / numerical_failure
    std::vector<norm_probe> probes;
    std::vector<snapshot> trajectory;
    grid g;
    int halvings = 0;
    double wall_seconds = 0.0;
    double data_norm = 0.0; // L1 + L2 (+ gradient) norms of all four data fields
};

// pointwise |f|^p mu(|f|); exactly zero where f vanishes. Arguments above
// s_max use the freeze extension (mu held at mu(s_max)) unless strict.
inline grid_field nonlinearity(const grid_field& f, double p, const modulus& mu,
                               clamp_mode clamp = clamp_mode::freeze) {
    if (!f.finite()) throw nonfinite_input("nonlinearity: non-finite field");
    grid_field out(f.g);
    for (std::size_t i = 0; i < f.v.size(); ++i) {
        const double a = std::fabs(f.v[i]);
        if (a == 0.0) continue;
        out.v[i] = std::pow(a, p) * mu.eval_clamped(a, clamp);
    }
    return out;
}

inline sim_state make_initial_state(const sim_config& cfg) {
    const grid g = cfg.make_grid();
    sim_state s;
    s.u = make_profile_field(g, cfg.data.profile, cfg.data.radius, cfg.data.amp_u0);
    s.ut = make_profile_field(g, cfg.data.profile, cfg.data.radius, cfg.data.amp_u1);
    s.v = make_profile_field(g, cfg.data.profile, cfg.data.radius, cfg.data.amp_v0);
    s.vt = make_profile_field(g, cfg.data.profile, cfg.data.radius, cfg.data.amp_v1);
    s.t = 0.0;
    return s;
}

namespace detail {

struct mode_tables {
    // multipliers per spectrum entry at a fixed step size
    std::vector<double> k0, k1, dk0, dk1, q;
    grid g;
    double dt = 0.0;
    // reusable spectral workspace for the stepper
    std::vector<std::complex<double>> su, sut, sv, svt, fu0, fv0, fu1, fv1;
    std::vector<std::complex<double>> lin_u, lin_ut, lin_v, lin_vt, pu, pv;
    grid_field u_pred, v_pred;

    void build(const grid& gr, double step) {
        if (g == gr && dt == step && !k0.empty()) return;
        g = gr;
        dt = step;
        const std::size_t n = fft::spec_size(gr);
        k0.resize(n);
        k1.resize(n);
        dk0.resize(n);
        dk1.resize(n);
        q.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double xi = fft::xi_abs(gr, i);
            const auto kk = kernel_k0k1(step, xi);
            k0[i] = kk.k0;
            k1[i] = kk.k1;
            dk0[i] = -xi * xi * kk.k1;
            dk1[i] = kk.k0 - kk.k1;
            q[i] = kernel_duhamel_weight(step, xi);
        }
    }
};

inline void add_forcing(grid_field& f, const forcing_fn& fn, double t) {
    if (!fn) return;
    const grid& g = f.g;
    if (g.n == 1) {
        for (int j = 0; j < g.points; ++j) f.v[j] += fn(t, g.coord(j), 0.0);
    } else {
        for (int jy = 0; jy < g.points; ++jy)
            for (int jx = 0; jx < g.points; ++jx)
                f.v[static_cast<std::size_t>(jy) * g.points + jx] +=
                    fn(t, g.coord(jx), g.coord(jy));
    }
}

} // namespace detail

// One step of the two-stage exponential integrator. The linear flow is exact
// per mode; the Duhamel term uses a constant-source predictor and a
// trapezoidal corrector through the K1 multipliers.
inline void step(sim_state& s, const sim_config& cfg, double dt, detail::mode_tables& tab) {
    const grid& g = s.u.g;
    tab.build(g, dt);

    auto rhs_u = [&](const grid_field& vfield, double t) {
        grid_field f = cfg.nonlinearity_on
                           ? nonlinearity(vfield, cfg.pair.p, cfg.mu1, cfg.clamp)
                           : grid_field(g);
        detail::add_forcing(f, cfg.forcing_u, t);
        return f;
    };
    auto rhs_v = [&](const grid_field& ufield, double t) {
        grid_field f = cfg.nonlinearity_on
                           ? nonlinearity(ufield, cfg.pair.q, cfg.mu2, cfg.clamp)
                           : grid_field(g);
        detail::add_forcing(f, cfg.forcing_v, t);
        return f;
    };

    fft::forward(s.u, tab.su);
    fft::forward(s.ut, tab.sut);
    fft::forward(s.v, tab.sv);
    fft::forward(s.vt, tab.svt);
    fft::forward(rhs_u(s.v, s.t), tab.fu0);
    fft::forward(rhs_v(s.u, s.t), tab.fv0);

    const std::size_t nspec = tab.su.size();
    tab.lin_u.resize(nspec);
    tab.lin_ut.resize(nspec);
    tab.lin_v.resize(nspec);
    tab.lin_vt.resize(nspec);
    tab.pu.resize(nspec);
    tab.pv.resize(nspec);
    for (std::size_t i = 0; i < nspec; ++i) {
        tab.lin_u[i] = tab.k0[i] * tab.su[i] + tab.k1[i] * tab.sut[i];
        tab.lin_ut[i] = tab.dk0[i] * tab.su[i] + tab.dk1[i] * tab.sut[i];
        tab.lin_v[i] = tab.k0[i] * tab.sv[i] + tab.k1[i] * tab.svt[i];
        tab.lin_vt[i] = tab.dk0[i] * tab.sv[i] + tab.dk1[i] * tab.svt[i];
    }

    // predictor: source frozen at the left endpoint
    for (std::size_t i = 0; i < nspec; ++i) {
        tab.pu[i] = tab.lin_u[i] + tab.q[i] * tab.fu0[i];
        tab.pv[i] = tab.lin_v[i] + tab.q[i] * tab.fv0[i];
    }
    fft::inverse(g, tab.pu, tab.u_pred);
    fft::inverse(g, tab.pv, tab.v_pred);

    fft::forward(rhs_u(tab.v_pred, s.t + dt), tab.fu1);
    fft::forward(rhs_v(tab.u_pred, s.t + dt), tab.fv1);

    // corrector: trapezoid of K1(dt - tau) * f(tau); K1(0) = 0 kills the right
    // endpoint in the value update, dtK1(0) = 1 keeps it in the velocity update
    const double h = 0.5 * dt;
    for (std::size_t i = 0; i < nspec; ++i) {
        tab.su[i] = tab.lin_u[i] + h * tab.k1[i] * tab.fu0[i];
        tab.sut[i] = tab.lin_ut[i] + h * (tab.dk1[i] * tab.fu0[i] + tab.fu1[i]);
        tab.sv[i] = tab.lin_v[i] + h * tab.k1[i] * tab.fv0[i];
        tab.svt[i] = tab.lin_vt[i] + h * (tab.dk1[i] * tab.fv0[i] + tab.fv1[i]);
    }
    fft::inverse(g, tab.su, s.u);
    fft::inverse(g, tab.sut, s.ut);
    fft::inverse(g, tab.sv, s.v);
    fft::inverse(g, tab.svt, s.vt);
    s.t += dt;
}

inline void step(sim_state& s, const sim_config& cfg, double dt) {
    detail::mode_tables tab;
    step(s, cfg, dt, tab);
}

// Runs the system to t_max with probes and optional snapshots. Threshold
// crossings (or non-finite values with large norms) are flagged as detected
// blow-up; non-finite steps at moderate norms trigger local dt halving, and
// only a persistent failure is reported as numerical.
inline sim_outcome simulate(const sim_config& cfg) {
    cfg.validate();
    const auto t_begin = std::chrono::steady_clock::now();
    sim_state s = make_initial_state(cfg);
    sim_outcome out;
    out.g = s.u.g;
    {
        // data size in the L1 cap H^k scale, v-data counted symmetrically
        const auto n_u0 = norms(s.u), n_u1 = norms(s.ut);
        const auto n_v0 = norms(s.v), n_v1 = norms(s.vt);
        out.data_norm = n_u0.l1 + n_u0.l2 + n_u0.h1 + n_u1.l1 + n_u1.l2 +
                        n_v0.l1 + n_v0.l2 + n_v0.h1 + n_v1.l1 + n_v1.l2;
    }

    detail::mode_tables tab;
    auto probe = [&](const sim_state& st) {
        out.probes.push_back({st.t, "u", norms(st.u)});
        out.probes.push_back({st.t, "v", norms(st.v)});
    };
    auto snap = [&](const sim_state& st) {
        if (cfg.snapshot_dt > 0.0) out.trajectory.push_back({st.t, st.u.v, st.v.v});
    };
    probe(s);
    snap(s);

    double dt = cfg.dt;
    int halvings = 0;
    double next_probe = cfg.probe_dt, next_snap = cfg.snapshot_dt;
    double last_finite_t = 0.0;

    while (s.t < cfg.t_max - 1e-12) {
        sim_state trial = s;
        step(trial, cfg, dt, tab);
        const bool finite = trial.u.finite() && trial.ut.finite() && trial.v.finite() &&
                            trial.vt.finite();
        if (!finite) {
            if (halvings < 6) {
                ++halvings;
                dt *= 0.5;
                continue;
            }
            // values already past the threshold before the failed step mean
            // genuine growth, not stiffness
            const double mx = std::max(s.u.max_abs(), s.v.max_abs());
            out.status = mx >= 0.01 * cfg.blowup_threshold ? sim_status::blowup_detected
                                                           : sim_status::numerical_failure;
            out.t_star = last_finite_t;
            break;
        }
        s = std::move(trial);
        last_finite_t = s.t;

        const double mx = std::max(s.u.max_abs(), s.v.max_abs());
        if (mx >= cfg.blowup_threshold) {
            probe(s);
            snap(s);
            out.status = sim_status::blowup_detected;
            out.t_star = s.t;
            break;
        }
        if (s.t >= next_probe - 1e-9) {
            probe(s);
            next_probe += cfg.probe_dt;
        }
        if (cfg.snapshot_dt > 0.0 && s.t >= next_snap - 1e-9) {
            snap(s);
            next_snap += cfg.snapshot_dt;
        }
    }

    out.halvings = halvings;
    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    return out;
}

// ---- Picard iteration of the Duhamel fixed-point map ----

struct picard_result {
    std::vector<double> distances; // X(T)-weighted distance between consecutive iterates
    bool no_contraction = false;   // distances grew for 3 consecutive iterates
    bool nonfinite = false;
    double worst_factor = 0.0;     // max ratio d_{k+1}/d_k over measurable pairs
};

namespace detail {

struct picard_weights {
    double wu2, wug, wui, wv2, wvg, wvi;
};

inline picard_weights x_weights(const critical_pair& pair, const loss_weight_config& ell_cfg,
                                double tau) {
    const double n = pair.n, sig = pair.sigma;
    const double ell = loss_weight(ell_cfg, tau);
    picard_weights w;
    w.wu2 = std::pow(1.0 + tau, n / 4.0 - sig) / ell;
    w.wug = std::pow(1.0 + tau, n / 4.0 + 0.5 - sig) / ell;
    w.wui = std::pow(1.0 + tau, n / 2.0 - sig) / ell;
    w.wv2 = std::pow(1.0 + tau, n / 4.0);
    w.wvg = std::pow(1.0 + tau, n / 4.0 + 0.5);
    w.wvi = std::pow(1.0 + tau, n / 2.0);
    return w;
}

} // namespace detail

// Applies the Duhamel map on [0, T] over a uniform grid of time_nodes+1 nodes,
// full history re-quadratured each iterate (trapezoid in tau, exact kernels).
// Distances are sup over the node times of the X(t)-weighted norm sums.
inline picard_result picard_iterate(const sim_config& cfg, int iterations, double T,
                                    int time_nodes = 48, double eps_weight = 0.01) {
    cfg.validate();
    if (iterations < 1) throw config_error("picard_iterate: iterations must be >= 1");
    const grid g((cfg.pair.n), cfg.box_half_length > 0 ? cfg.box_half_length
                                                       : 1.1 * (T + cfg.data.radius),
                 cfg.grid_points > 0 ? cfg.grid_points : (cfg.pair.n == 1 ? 1024 : 128));
    const int m = time_nodes;
    const double dtau = T / m;
    const std::size_t nspec = fft::spec_size(g);

    const auto ell_cfg =
        loss_weight_config::make(cfg.mu1, cfg.mu2, cfg.pair.q, eps_weight, 0.1);

    // linear part at every node
    grid_field u0 = make_profile_field(g, cfg.data.profile, cfg.data.radius, cfg.data.amp_u0);
    grid_field u1 = make_profile_field(g, cfg.data.profile, cfg.data.radius, cfg.data.amp_u1);
    grid_field v0 = make_profile_field(g, cfg.data.profile, cfg.data.radius, cfg.data.amp_v0);
    grid_field v1 = make_profile_field(g, cfg.data.profile, cfg.data.radius, cfg.data.amp_v1);
    std::vector<std::complex<double>> su0, su1, sv0, sv1;
    fft::forward(u0, su0);
    fft::forward(u1, su1);
    fft::forward(v0, sv0);
    fft::forward(v1, sv1);

    std::vector<std::vector<std::complex<double>>> lin_u(m + 1), lin_v(m + 1);
    // K1(t_j - tau_i) multipliers for all node gaps
    std::vector<std::vector<double>> k1gap(m + 1);
    for (int j = 0; j <= m; ++j) {
        lin_u[j].resize(nspec);
        lin_v[j].resize(nspec);
        k1gap[j].resize(nspec);
        for (std::size_t i = 0; i < nspec; ++i) {
            const double xi = fft::xi_abs(g, i);
            const auto kk = detail::kernel_k0k1(j * dtau, xi);
            lin_u[j][i] = kk.k0 * su0[i] + kk.k1 * su1[i];
            lin_v[j][i] = kk.k0 * sv0[i] + kk.k1 * sv1[i];
            k1gap[j][i] = kk.k1;
        }
    }

    // iterate storage in real space
    std::vector<grid_field> cur_u(m + 1, grid_field(g)), cur_v(m + 1, grid_field(g));
    picard_result res;
    int grow_run = 0;

    for (int it = 0; it < iterations; ++it) {
        // transforms of the nonlinearity along the current iterate
        std::vector<std::vector<std::complex<double>>> fu(m + 1), fv(m + 1);
        try {
            for (int i = 0; i <= m; ++i) {
                fft::forward(nonlinearity(cur_v[i], cfg.pair.p, cfg.mu1, cfg.clamp), fu[i]);
                fft::forward(nonlinearity(cur_u[i], cfg.pair.q, cfg.mu2, cfg.clamp), fv[i]);
            }
        } catch (const nonfinite_input&) {
            res.nonfinite = true;
            break;
        }

        double dist = 0.0;
        std::vector<grid_field> next_u(m + 1, grid_field(g)), next_v(m + 1, grid_field(g));
        std::vector<std::complex<double>> acc_u(nspec), acc_v(nspec);
        for (int j = 0; j <= m; ++j) {
            acc_u = lin_u[j];
            acc_v = lin_v[j];
            for (int i = 0; i <= j; ++i) {
                const double w = (i == 0 || i == j) ? 0.5 * dtau : dtau;
                const auto& k1s = k1gap[j - i];
                for (std::size_t k = 0; k < nspec; ++k) {
                    acc_u[k] += w * k1s[k] * fu[i][k];
                    acc_v[k] += w * k1s[k] * fv[i][k];
                }
            }
            fft::inverse(g, acc_u, next_u[j]);
            fft::inverse(g, acc_v, next_v[j]);

            if (!next_u[j].finite() || !next_v[j].finite()) {
                res.nonfinite = true;
                break;
            }
            grid_field du(g), dv(g);
            for (std::size_t k = 0; k < du.v.size(); ++k) {
                du.v[k] = next_u[j].v[k] - cur_u[j].v[k];
                dv.v[k] = next_v[j].v[k] - cur_v[j].v[k];
            }
            const auto nu = norms(du), nv = norms(dv);
            const auto w = detail::x_weights(cfg.pair, ell_cfg, j * dtau);
            dist = std::max(dist, w.wu2 * nu.l2 + w.wug * nu.h1 + w.wui * nu.linf +
                                      w.wv2 * nv.l2 + w.wvg * nv.h1 + w.wvi * nv.linf);
        }
        if (res.nonfinite) break;

        if (!res.distances.empty()) {
            const double prev = res.distances.back();
            if (prev > 0.0) res.worst_factor = std::max(res.worst_factor, dist / prev);
            grow_run = dist > prev ? grow_run + 1 : 0;
            if (grow_run >= 3) res.no_contraction = true;
        }
        res.distances.push_back(dist);
        cur_u = std::move(next_u);
        cur_v = std::move(next_v);
    }
    return res;
}

} // namespace modwave
