#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "modwave/errors.hpp"

namespace modwave {

enum class clamp_mode { freeze, strict };

// Modulus of continuity built from the supported atom families, kept in the
// canonical form
//
//   mu(s) = s^p * prod_{i=1..m} (log^(i)(1/s))^(-a_i),   mu(0) = 0,
//
// where log^(i) is the i-fold iterated logarithm. Power atoms add to p,
// log-type atoms add elementwise to the exponent chain (a_1, ..., a_m), so
// products and real powers of moduli are exact exponent arithmetic.
class modulus {
  public:
    static modulus power(double alpha) {
        if (!(alpha > 0.0)) throw domain_error("modulus::power: alpha must be > 0");
        modulus m;
        m.pow_exp_ = alpha;
        m.s_max_ = 1.0;
        return m;
    }

    // (log 1/s)^(-alpha)
    static modulus log_pow(double alpha) {
        if (!(alpha > 0.0)) throw domain_error("modulus::log_pow: alpha must be > 0");
        modulus m;
        m.log_exps_ = {alpha};
        m.s_max_ = default_chain_smax(1);
        return m;
    }

    // (log 1/s)^(-1) (loglog 1/s)^(-1) ... (log^(m) 1/s)^(-alpha)
    static modulus iter_log(int depth, double alpha) {
        if (depth < 1) throw domain_error("modulus::iter_log: depth must be >= 1");
        if (!(alpha > 0.0)) throw domain_error("modulus::iter_log: alpha must be > 0");
        modulus m;
        m.log_exps_.assign(static_cast<std::size_t>(depth), 1.0);
        m.log_exps_.back() = alpha;
        m.s_max_ = default_chain_smax(depth);
        return m;
    }

    static modulus product(const modulus& a, const modulus& b) {
        modulus m;
        m.pow_exp_ = a.pow_exp_ + b.pow_exp_;
        m.log_exps_.assign(std::max(a.log_exps_.size(), b.log_exps_.size()), 0.0);
        for (std::size_t i = 0; i < a.log_exps_.size(); ++i) m.log_exps_[i] += a.log_exps_[i];
        for (std::size_t i = 0; i < b.log_exps_.size(); ++i) m.log_exps_[i] += b.log_exps_[i];
        m.trim();
        m.s_max_ = std::min(a.s_max_, b.s_max_);
        m.validate();
        return m;
    }

    // mu^beta for beta >= 0
    static modulus pow(const modulus& a, double beta) {
        if (!(beta >= 0.0)) throw domain_error("modulus::pow: beta must be >= 0");
        modulus m;
        m.pow_exp_ = a.pow_exp_ * beta;
        m.log_exps_ = a.log_exps_;
        for (double& e : m.log_exps_) e *= beta;
        m.trim();
        m.s_max_ = a.s_max_;
        m.validate();
        return m;
    }

    int chain_depth() const { return static_cast<int>(log_exps_.size()); }
    double power_exponent() const { return pow_exp_; }
    const std::vector<double>& log_exponents() const { return log_exps_; }
    bool is_pure_power() const { return log_exps_.empty(); }
    double s_max() const { return s_max_; }

    void set_s_max(double s) {
        if (!(s > 0.0)) throw domain_error("modulus: s_max must be > 0");
        if (!log_exps_.empty() && std::log(1.0 / s) <= chain_positivity_t(chain_depth()))
            throw domain_error("modulus: s_max leaves an iterated log nonpositive");
        if (log_exps_.empty() && s > 1.0) throw domain_error("modulus: s_max must be <= 1 for powers");
        s_max_ = s;
    }

    // mu(exp(-t)); valid for t >= log(1/s_max). Works for arbitrarily deep
    // tails without forming exp(-t).
    double eval_log(double t) const {
        if (std::isinf(t)) return 0.0;
        if (t < t_min() - 1e-12) throw domain_error("modulus: argument above s_max");
        double val = (pow_exp_ > 0.0) ? std::exp(-pow_exp_ * t) : 1.0;
        double l = t;
        for (double a : log_exps_) {
            if (!(l > 0.0)) throw domain_error("modulus: iterated log nonpositive");
            if (a != 0.0) val *= std::pow(l, -a);
            l = std::log(l);
        }
        return val;
    }

    double eval(double s) const {
        if (std::isnan(s) || s < 0.0) throw domain_error("modulus: s must be >= 0");
        if (s == 0.0) return 0.0;
        if (s > s_max_ * (1.0 + 1e-14)) throw domain_error("modulus: s above s_max");
        return eval_log(std::log(1.0 / s));
    }

    // eval with the freeze extension: mu held at mu(s_max) past the domain cap
    double eval_clamped(double s, clamp_mode mode = clamp_mode::freeze) const {
        if (mode == clamp_mode::strict || s <= s_max_) return eval(s);
        return eval_log(t_min());
    }

    // exact derivative of order 1 or 2 at s in (0, s_max]
    double deriv(double s, int order) const {
        if (!(s > 0.0)) throw domain_error("modulus::deriv: s must be > 0");
        if (s > s_max_ * (1.0 + 1e-14)) throw domain_error("modulus::deriv: s above s_max");
        if (order != 1 && order != 2) throw domain_error("modulus::deriv: order must be 1 or 2");

        const double t = std::log(1.0 / s);
        // P_i = L_1 L_2 ... L_i with L_1 = log(1/s), L_{i+1} = log(L_i):
        //   mu'/mu  = W = (p + sum_i a_i / P_i) / s
        //   W'      = (-p + sum_i a_i (sum_{j<=i} 1/P_j - 1) / P_i) / s^2
        double sum_w = pow_exp_, sum_wp = -pow_exp_;
        double l = t, prod = 1.0, inv_prefix = 0.0;
        for (double a : log_exps_) {
            if (!(l > 0.0)) throw domain_error("modulus::deriv: iterated log nonpositive");
            prod *= l;
            inv_prefix += 1.0 / prod;
            sum_w += a / prod;
            sum_wp += a * (inv_prefix - 1.0) / prod;
            l = std::log(l);
        }
        const double mu = eval_log(t);
        const double w = sum_w / s;
        if (order == 1) return mu * w;
        const double wp = sum_wp / (s * s);
        return mu * (w * w + wp);
    }

    // literal syntax: pow:A, logpow:A, iterlog:M:A, logchain:A1:A2:..., joined with '*'
    static modulus parse(const std::string& lit);
    std::string str() const;

  private:
    double pow_exp_ = 0.0;
    std::vector<double> log_exps_;
    double s_max_ = 1.0;

    double t_min() const { return std::log(1.0 / s_max_); }

    void trim() {
        while (!log_exps_.empty() && log_exps_.back() == 0.0) log_exps_.pop_back();
    }

    void validate() const {
        if (pow_exp_ < 0.0) throw domain_error("modulus: negative power exponent");
        for (double a : log_exps_)
            if (a < 0.0) throw domain_error("modulus: negative log exponent");
        if (pow_exp_ == 0.0 && log_exps_.empty())
            throw domain_error("modulus: empty expression");
    }

    // smallest t with log^(m)(t... ) > 0, i.e. t > e^^(m-1)
    static double chain_positivity_t(int depth) {
        double t = 0.0;
        for (int i = 1; i < depth; ++i) t = (i == 1) ? 1.0 : std::exp(t);
        return t;
    }

    static double default_chain_smax(int depth) {
        const double cap = 0.1;
        if (depth <= 2) return cap; // positivity bound is e^-1 = 0.37 for depth 2
        return std::min(cap, 0.5 * std::exp(-chain_positivity_t(depth)));
    }

    friend modulus make_log_chain(std::vector<double> exps);
};

inline modulus make_log_chain(std::vector<double> exps) {
    modulus m;
    m.log_exps_ = std::move(exps);
    m.trim();
    if (m.log_exps_.empty()) throw domain_error("modulus: empty log chain");
    m.s_max_ = modulus::default_chain_smax(m.chain_depth());
    m.validate();
    return m;
}

inline modulus modulus::parse(const std::string& lit) {
    std::vector<modulus> factors;
    std::stringstream ss(lit);
    std::string tok;
    while (std::getline(ss, tok, '*')) {
        // strip blanks
        std::string s;
        for (char c : tok)
            if (!std::isspace(static_cast<unsigned char>(c))) s += c;
        if (s.empty()) throw config_error("modulus literal: empty factor in '" + lit + "'");
        std::vector<std::string> parts;
        std::stringstream ps(s);
        std::string p;
        while (std::getline(ps, p, ':')) parts.push_back(p);
        try {
            if (parts[0] == "pow" && parts.size() == 2)
                factors.push_back(modulus::power(std::stod(parts[1])));
            else if (parts[0] == "logpow" && parts.size() == 2)
                factors.push_back(modulus::log_pow(std::stod(parts[1])));
            else if (parts[0] == "iterlog" && parts.size() == 3)
                factors.push_back(modulus::iter_log(std::stoi(parts[1]), std::stod(parts[2])));
            else if (parts[0] == "logchain" && parts.size() >= 2) {
                std::vector<double> es;
                for (std::size_t i = 1; i < parts.size(); ++i) es.push_back(std::stod(parts[i]));
                factors.push_back(make_log_chain(std::move(es)));
            } else
                throw config_error("modulus literal: unknown factor '" + s + "'");
        } catch (const std::invalid_argument&) {
            throw config_error("modulus literal: bad number in '" + s + "'");
        }
    }
    if (factors.empty()) throw config_error("modulus literal: empty");
    modulus out = factors[0];
    for (std::size_t i = 1; i < factors.size(); ++i) out = modulus::product(out, factors[i]);
    return out;
}

inline std::string modulus::str() const {
    auto fmt = [](double x) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.12g", x);
        return std::string(buf);
    };
    std::string out;
    if (pow_exp_ > 0.0) out = "pow:" + fmt(pow_exp_);
    if (!log_exps_.empty()) {
        bool iter_shape = true;
        for (std::size_t i = 0; i + 1 < log_exps_.size(); ++i)
            if (log_exps_[i] != 1.0) iter_shape = false;
        std::string chain;
        if (log_exps_.size() == 1)
            chain = "logpow:" + fmt(log_exps_[0]);
        else if (iter_shape)
            chain = "iterlog:" + std::to_string(log_exps_.size()) + ":" + fmt(log_exps_.back());
        else {
            chain = "logchain";
            for (double a : log_exps_) chain += ":" + fmt(a);
        }
        out = out.empty() ? chain : out + "*" + chain;
    }
    return out;
}

} // namespace modwave
