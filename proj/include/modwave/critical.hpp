#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "modwave/dini.hpp"
#include "modwave/errors.hpp"
#include "modwave/modulus.hpp"

namespace modwave {

// Point (p_c, q_c) on the critical curve (1+q)/(pq-1) = n/2, with the
// decay-loss exponent sigma = (q-p)/(pq-1).
struct critical_pair {
    int n = 1;
    double p = 0.0;
    double q = 0.0;
    double sigma = 0.0;

    double curve_residual() const {
        return std::fabs((1.0 + q) / (p * q - 1.0) - 0.5 * n) / (0.5 * n);
    }

    void validate() const {
        if (n != 1 && n != 2) throw domain_error("critical_pair: n must be 1 or 2");
        if (!(p > 1.0) || !(q > 1.0)) throw domain_error("critical_pair: exponents must be > 1");
        if (q < p - 1e-12) throw domain_error("critical_pair: q must be >= p");
        if (curve_residual() > 1e-12) throw domain_error("critical_pair: off the critical curve");
        const double s = (q - p) / (p * q - 1.0);
        if (std::fabs(s - sigma) > 1e-12) throw domain_error("critical_pair: sigma mismatch");
    }
};

// Solve (1+q)/(p q - 1) = n/2 for q given p; q = (2+n)/(n p - 2).
inline critical_pair curve_qc(int n, double p) {
    if (n != 1 && n != 2) throw domain_error("curve_qc: n must be 1 or 2");
    if (!(p > 1.0)) throw domain_error("curve_qc: p must be > 1");
    const double denom = n * p - 2.0;
    if (!(denom > 0.0)) throw no_admissible_partner("curve_qc: no admissible q for this p");
    const double q = (2.0 + n) / denom;
    if (!(q > 1.0) || q < p - 1e-12)
        throw no_admissible_partner("curve_qc: solved q violates q > 1, q >= p");
    critical_pair pair{n, p, q, (q - p) / (p * q - 1.0)};
    pair.validate();
    return pair;
}

enum class unknown_kind { u, v };
enum class norm_kind { l2, linf, grad_l2 };

// Decay exponents of (1+t) in the small-data estimates: u carries the loss
// sigma, v does not. grad_l2 is the k = 1 case of the L2 scale.
inline double predicted_exponent(const critical_pair& pair, unknown_kind who, norm_kind kind,
                                 int k = 0) {
    const double n = pair.n;
    const double loss = (who == unknown_kind::u) ? pair.sigma : 0.0;
    switch (kind) {
        case norm_kind::l2: return -n / 4.0 - 0.5 * k + loss;
        case norm_kind::grad_l2: return -n / 4.0 - 0.5 + loss;
        case norm_kind::linf: return -n / 2.0 + loss;
    }
    return 0.0;
}

enum class dini_regime { both_converge, mixed };

inline dini_regime derive_regime(const modulus& mu1, const modulus& mu2) {
    const bool c1 = classify_single(mu1) == dini_status::converges;
    const bool c2 = classify_single(mu2) == dini_status::converges;
    return (c1 && c2) ? dini_regime::both_converge : dini_regime::mixed;
}

struct loss_weight_config {
    modulus mu1;
    modulus mu2;
    double q_c = 0.0;
    double eps = 0.01; // rate of the shrinking argument c (1+t)^-eps
    double c = 0.1;
    dini_regime regime = dini_regime::both_converge;

    static loss_weight_config make(const modulus& m1, const modulus& m2, double q, double eps,
                                   double c) {
        loss_weight_config cfg{m1, m2, q, eps, c, derive_regime(m1, m2)};
        if (!(q > 1.0)) throw domain_error("loss_weight_config: q_c must be > 1");
        if (!(eps > 0.0) || !(c > 0.0)) throw domain_error("loss_weight_config: eps, c must be > 0");
        return cfg;
    }
};

// ell(t): 1 when both single Dini integrals converge, otherwise the shrinking
// modulus ratio (mu1/mu2)^(1/(q+1)) evaluated at c (1+t)^-eps.
inline double loss_weight(const loss_weight_config& cfg, double t) {
    if (!(t >= 0.0)) throw domain_error("loss_weight: t must be >= 0");
    if (cfg.regime == dini_regime::both_converge) return 1.0;
    const double targ = std::log(1.0 / cfg.c) + cfg.eps * std::log1p(t);
    const double r = cfg.mu1.eval_log(targ) / cfg.mu2.eval_log(targ);
    return std::pow(r, 1.0 / (cfg.q_c + 1.0));
}

struct weight_check_report {
    bool monotone = false;          // (1+t)^sigma ell(t) nondecreasing
    bool dominated = false;         // (1+t)^(-(1+p)/(pq-1)) ell(t) <~ (1+t)^-eps
    bool precondition_ok = false;   // eps < (q-p)(q+1) / (C* (pq-1))
    double eps_bound = 0.0;
    bool pass = false;
};

// Checks the two weighted-function properties of ell(t) on a grid. The
// domination property holds up to the constant fixed at t = 0 (ell is not
// normalized), so the check is that the ratio against (1+t)^-eps never rises.
inline weight_check_report weight_monotonicity_check(const loss_weight_config& cfg,
                                                     const critical_pair& pair,
                                                     const std::vector<double>& t_grid,
                                                     double star_sup_ratio) {
    weight_check_report rep;
    if (star_sup_ratio > 0.0)
        rep.eps_bound = (pair.q - pair.p) * (pair.q + 1.0) /
                        (star_sup_ratio * (pair.p * pair.q - 1.0));
    else
        rep.eps_bound = std::numeric_limits<double>::infinity();
    rep.precondition_ok = cfg.eps < rep.eps_bound;

    rep.monotone = true;
    rep.dominated = true;
    double prev = -std::numeric_limits<double>::infinity();
    double prev_ratio = std::numeric_limits<double>::infinity();
    for (double t : t_grid) {
        const double ell = loss_weight(cfg, t);
        const double f = std::pow(1.0 + t, pair.sigma) * ell;
        if (f < prev * (1.0 - 1e-12)) rep.monotone = false;
        prev = f;
        const double lhs = std::pow(1.0 + t, -(1.0 + pair.p) / (pair.p * pair.q - 1.0)) * ell;
        const double ratio = lhs / std::pow(1.0 + t, -cfg.eps);
        if (!std::isfinite(ratio) || ratio > prev_ratio * (1.0 + 1e-12)) rep.dominated = false;
        prev_ratio = std::min(prev_ratio, ratio);
    }
    rep.pass = rep.monotone && rep.dominated;
    return rep;
}

} // namespace modwave
