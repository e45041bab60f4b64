#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "modwave/critical.hpp"
#include "modwave/errors.hpp"
#include "modwave/solver.hpp"

namespace modwave {

using kv_map = std::map<std::string, std::string>;

struct config_section {
    std::string name; // empty for the defaults / flat section
    kv_map values;
};

// Flat key = value format, '#' comments, optional [run <name>] sections for
// sweep specs. Keys before the first section header form the defaults.
inline std::vector<config_section> parse_config_text(std::istream& in) {
    std::vector<config_section> out;
    out.push_back({"", {}});
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            const auto b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw config_error("config line " + std::to_string(lineno) + ": bad section");
            std::string head = trim(line.substr(1, line.size() - 2));
            if (head.rfind("run", 0) == 0) head = trim(head.substr(3));
            else if (head == "defaults") head.clear();
            if (!head.empty() || out.size() > 1 || !out[0].values.empty())
                out.push_back({head, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw config_error("config line " + std::to_string(lineno) + ": empty key or value");
        out.back().values[key] = val;
    }
    return out;
}

inline std::vector<config_section> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    return parse_config_text(in);
}

namespace detail {

inline double to_double(const std::string& key, const std::string& val) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(val, &pos);
        if (pos != val.size()) throw std::invalid_argument(val);
        return x;
    } catch (...) {
        throw config_error("config key '" + key + "': not a number: " + val);
    }
}

} // namespace detail

// SimConfig keys (all optional except n and p): n, p, q, mu1, mu2, profile,
// radius, amp_u0, amp_u1, amp_v0, amp_v1, dt, t_max, probe_dt, snapshot_dt,
// blowup_threshold, box_half_length, grid_points, nonlinearity, clamp,
// plus blow-up scan keys nu, r0, ladder_ratio, ladder_count, c0_scale.
inline sim_config sim_config_from(const kv_map& kv) {
    auto get = [&](const char* key) -> const std::string* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };
    static const std::set<std::string> known = {
        "n", "p", "q", "mu1", "mu2", "profile", "radius", "amp_u0", "amp_u1", "amp_v0",
        "amp_v1", "dt", "t_max", "probe_dt", "snapshot_dt", "blowup_threshold",
        "box_half_length", "grid_points", "nonlinearity", "clamp", "nu", "r0",
        "ladder_ratio", "ladder_count", "c0_scale", "iterations", "picard_t",
        "time_nodes"};
    for (const auto& [k, v] : kv)
        if (!known.count(k)) throw config_error("unknown config key: " + k);

    const std::string* pn = get("n");
    const std::string* pp = get("p");
    if (!pn || !pp) throw config_error("config requires keys n and p");
    const int n = static_cast<int>(detail::to_double("n", *pn));
    const double p = detail::to_double("p", *pp);

    sim_config cfg;
    if (const auto* pq = get("q")) {
        const double q = detail::to_double("q", *pq);
        cfg.pair = critical_pair{n, p, q, (q - p) / (p * q - 1.0)};
        cfg.pair.validate();
    } else {
        cfg.pair = curve_qc(n, p);
    }
    if (const auto* s = get("mu1")) cfg.mu1 = modulus::parse(*s);
    if (const auto* s = get("mu2")) cfg.mu2 = modulus::parse(*s);
    if (const auto* s = get("profile")) {
        if (*s == "gaussian") cfg.data.profile = profile_kind::gaussian;
        else if (*s == "bump") cfg.data.profile = profile_kind::bump;
        else if (*s == "dgaussian") cfg.data.profile = profile_kind::dgaussian;
        else throw config_error("unknown profile: " + *s);
    }
    auto setd = [&](const char* key, double& slot) {
        if (const auto* s = get(key)) slot = detail::to_double(key, *s);
    };
    setd("radius", cfg.data.radius);
    setd("amp_u0", cfg.data.amp_u0);
    setd("amp_u1", cfg.data.amp_u1);
    setd("amp_v0", cfg.data.amp_v0);
    setd("amp_v1", cfg.data.amp_v1);
    setd("dt", cfg.dt);
    setd("t_max", cfg.t_max);
    setd("probe_dt", cfg.probe_dt);
    setd("snapshot_dt", cfg.snapshot_dt);
    setd("blowup_threshold", cfg.blowup_threshold);
    setd("box_half_length", cfg.box_half_length);
    if (const auto* s = get("grid_points"))
        cfg.grid_points = static_cast<int>(detail::to_double("grid_points", *s));
    if (const auto* s = get("nonlinearity")) {
        if (*s == "on") cfg.nonlinearity_on = true;
        else if (*s == "off") cfg.nonlinearity_on = false;
        else throw config_error("nonlinearity must be on or off");
    }
    if (const auto* s = get("clamp")) {
        if (*s == "freeze") cfg.clamp = clamp_mode::freeze;
        else if (*s == "strict") cfg.clamp = clamp_mode::strict;
        else throw config_error("clamp must be freeze or strict");
    }
    cfg.validate();
    return cfg;
}

} // namespace modwave
