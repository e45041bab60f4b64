#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "modwave/errors.hpp"
#include "modwave/modulus.hpp"
#include "modwave/quadrature.hpp"

namespace modwave {

// int_eps^c s^-1 mu1(s)^beta1 mu2(s)^beta2 ds, integrated in t = log(1/s)
// where the integrand is slowly varying.
inline double dini_integral(const modulus& mu1, const modulus& mu2, double beta1, double beta2,
                            double c, double eps, double abs_tol = 1e-8,
                            std::size_t max_evals = 1000000) {
    if (!(eps > 0.0) || !(eps < c)) throw domain_error("dini_integral: need 0 < eps < c");
    if (beta1 > 0.0 && c > mu1.s_max() * (1.0 + 1e-14))
        throw domain_error("dini_integral: c above s_max of mu1");
    if (beta2 > 0.0 && c > mu2.s_max() * (1.0 + 1e-14))
        throw domain_error("dini_integral: c above s_max of mu2");
    const double ta = std::log(1.0 / c), tb = std::log(1.0 / eps);
    auto g = [&](double t) {
        double v = 1.0;
        if (beta1 > 0.0) v *= std::pow(mu1.eval_log(t), beta1);
        if (beta2 > 0.0) v *= std::pow(mu2.eval_log(t), beta2);
        return v;
    };
    return quad_adaptive(g, ta, tb, abs_tol, max_evals);
}

enum class dini_status { converges, diverges, unknown };

inline const char* to_string(dini_status s) {
    switch (s) {
        case dini_status::converges: return "Converges";
        case dini_status::diverges: return "Diverges";
        default: return "Unknown";
    }
}

struct dini_verdict {
    dini_status status = dini_status::unknown;
    std::string rule;                    // analytic rule used, or the numeric fallback
    std::optional<double> estimate;      // deepest truncated integral, if computed
    std::vector<double> evidence;        // partial integrals over shrinking lower limits
};

// mu1^(q/(q+1)) mu2^(1/(q+1)) as a modulus, by exact exponent arithmetic
inline modulus middle_modulus(const modulus& mu1, const modulus& mu2, double q_c) {
    if (!(q_c > 1.0)) throw domain_error("middle_modulus: q_c must be > 1");
    return modulus::product(modulus::pow(mu1, q_c / (q_c + 1.0)),
                            modulus::pow(mu2, 1.0 / (q_c + 1.0)));
}

namespace detail {

// Convergence of int_0 mu(s)/s ds for the canonical form
//   mu = s^p (log 1/s)^-a1 ... (log^(m) 1/s)^-am.
// Any s^p factor (p > 0) forces convergence; otherwise the Bertrand-type
// lexicographic rule on the chain decides: the first exponent != 1 decides
// (>1 converges, <1 diverges), the all-ones chain diverges.
inline dini_status chain_rule(const modulus& mu, std::string& rule) {
    const double tol = 1e-12;
    if (mu.power_exponent() > tol) {
        rule = "power-factor";
        return dini_status::converges;
    }
    const auto& a = mu.log_exponents();
    if (a.empty()) {
        rule = "no-rule";
        return dini_status::unknown;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > 1.0 + tol) {
            rule = "log-chain exponent " + std::to_string(i + 1) + " > 1";
            return dini_status::converges;
        }
        if (a[i] < 1.0 - tol) {
            rule = "log-chain exponent " + std::to_string(i + 1) + " < 1";
            return dini_status::diverges;
        }
    }
    rule = "log-chain all-ones";
    return dini_status::diverges;
}

} // namespace detail

// Convergence of the single Dini integral int_0^c mu(s)/s ds.
inline dini_status classify_single(const modulus& mu) {
    std::string rule;
    return detail::chain_rule(mu, rule);
}

// Numeric trend of int s^-1 mu1^b1 mu2^b2 ds via condensation blocks
// B_k = int over t in [T 2^k, T 2^(k+1)]. A tail ~ t^-a has block ratio
// 2^(1-a): ratios near or above 1 mean divergence (a <= 1), ratios bounded
// below ~0.92 mean a convergent tail.
inline dini_status numeric_trend(const modulus& mu1, const modulus& mu2, double beta1,
                                 double beta2, double c, int blocks = 18) {
    auto g = [&](double t) {
        double v = 1.0;
        if (beta1 > 0.0) v *= std::pow(mu1.eval_log(t), beta1);
        if (beta2 > 0.0) v *= std::pow(mu2.eval_log(t), beta2);
        return v;
    };
    const double t0 = std::max(std::log(1.0 / c), 2.0);
    std::vector<double> block;
    double lo = t0;
    for (int k = 0; k < blocks; ++k) {
        const double hi = 2.0 * lo;
        block.push_back(quad_adaptive(g, lo, hi, 1e-12, 400000));
        lo = hi;
    }
    int votes_div = 0, votes_conv = 0;
    for (std::size_t k = block.size() - 4; k < block.size(); ++k) {
        const double ratio = block[k] / block[k - 1];
        if (ratio >= 0.92) ++votes_div;
        else ++votes_conv;
    }
    if (votes_div == 4) return dini_status::diverges;
    if (votes_conv == 4) return dini_status::converges;
    return dini_status::unknown;
}

// Sharp-threshold classifier for int_0^c s^-1 mu1^(q/(q+1)) mu2^(1/(q+1)) ds.
// Analytic rules on the exponent arithmetic first, numeric fallback second.
inline dini_verdict classify_dini(const modulus& mu1, const modulus& mu2, double q_c,
                                  double c = 0.0, bool with_evidence = true) {
    if (!(q_c > 1.0)) throw domain_error("classify_dini: q_c must be > 1");
    const modulus mid = middle_modulus(mu1, mu2, q_c);
    // Unknown is a valid verdict but errors are not: keep c inside the domain
    c = (c <= 0.0) ? mid.s_max() : std::min(c, mid.s_max());
    dini_verdict v;
    v.status = detail::chain_rule(mid, v.rule);
    if (v.status == dini_status::unknown) {
        v.status = numeric_trend(mu1, mu2, q_c / (q_c + 1.0), 1.0 / (q_c + 1.0), c);
        v.rule = "numeric condensation trend";
        if (v.status == dini_status::unknown) v.rule = "numeric trend inconclusive";
    }
    if (with_evidence) {
        // partial integrals over eps_j = c 2^-j, j = 10..40
        const double b1 = q_c / (q_c + 1.0), b2 = 1.0 / (q_c + 1.0);
        auto g = [&](double t) {
            return std::pow(mu1.eval_log(t), b1) * std::pow(mu2.eval_log(t), b2);
        };
        const double ta = std::log(1.0 / c);
        double acc = quad_adaptive(g, ta, ta + 10.0 * std::log(2.0), 1e-10, 400000);
        for (int j = 10; j <= 40; ++j) {
            v.evidence.push_back(acc);
            acc += quad_adaptive(g, ta + j * std::log(2.0), ta + (j + 1) * std::log(2.0), 1e-10,
                                 400000);
        }
        v.estimate = v.evidence.back();
    }
    return v;
}

} // namespace modwave
