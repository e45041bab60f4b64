#pragma once

#include <cmath>
#include <vector>

#include "modwave/errors.hpp"
#include "modwave/modulus.hpp"

namespace modwave {

struct star_report {
    double sup_ratio = 0.0; // sup of s mu'(s) / mu(s) over the grid
    bool pass = false;
};

// s mu'(s) <~ mu(s): finite, bounded logarithmic derivative
inline star_report check_star(const modulus& mu, const std::vector<double>& grid,
                              double threshold = 10.0) {
    star_report rep;
    for (double s : grid) {
        if (!(s > 0.0)) throw domain_error("check_star: grid point must be > 0");
        const double r = s * mu.deriv(s, 1) / mu.eval(s);
        if (!std::isfinite(r)) return rep; // pass stays false
        if (r > rep.sup_ratio) rep.sup_ratio = r;
    }
    rep.pass = rep.sup_ratio <= threshold;
    return rep;
}

struct littleo_report {
    std::vector<double> ratios; // s^k |mu^(k)(s)| / mu(s) along the sequence
    bool pass = false;
};

// s^k mu^(k)(s) = o(mu(s)) as s -> 0, sampled along a decreasing sequence.
// Pass requires strictly decreasing ratios ending below the threshold.
inline littleo_report check_littleo(const modulus& mu, int order,
                                    const std::vector<double>& s_sequence,
                                    double threshold = 0.01) {
    if (order != 1 && order != 2) throw domain_error("check_littleo: order must be 1 or 2");
    littleo_report rep;
    double prev_s = std::numeric_limits<double>::infinity();
    for (double s : s_sequence) {
        if (!(s > 0.0) || !(s < prev_s))
            throw domain_error("check_littleo: sequence must be strictly decreasing and positive");
        prev_s = s;
        const double sk = (order == 1) ? s : s * s;
        rep.ratios.push_back(sk * std::fabs(mu.deriv(s, order)) / mu.eval(s));
    }
    bool decreasing = rep.ratios.size() >= 2;
    for (std::size_t i = 1; i < rep.ratios.size(); ++i)
        if (!(rep.ratios[i] < rep.ratios[i - 1])) decreasing = false;
    rep.pass = decreasing && !rep.ratios.empty() && rep.ratios.back() < threshold;
    return rep;
}

// nonnegative second differences of Phi(s) = s^p mu(s) on a uniform grid of (0, c0]
inline bool convexity_check(const modulus& mu, double p, double c0, int grid_size) {
    if (!(p > 0.0)) throw domain_error("convexity_check: p must be > 0");
    if (!(c0 > 0.0) || c0 > mu.s_max() * (1.0 + 1e-14))
        throw domain_error("convexity_check: c0 must lie in (0, s_max]");
    if (grid_size < 4) throw domain_error("convexity_check: grid too small");
    const double h = c0 / grid_size;
    auto phi = [&](double s) { return std::pow(s, p) * mu.eval(s); };
    double fm = phi(h), f0 = phi(2 * h);
    for (int i = 3; i <= grid_size; ++i) {
        const double fp = phi(i * h);
        if (fp - 2.0 * f0 + fm < -1e-14 * std::max(1.0, std::fabs(f0))) return false;
        fm = f0;
        f0 = fp;
    }
    return true;
}

} // namespace modwave
