#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "modwave/blowup.hpp"
#include "modwave/dini.hpp"
#include "modwave/errors.hpp"
#include "modwave/fitting.hpp"
#include "modwave/solver.hpp"

namespace modwave {

// deterministic float formatting for all CSV output
inline std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_probes_csv(const std::string& path, const std::vector<norm_probe>& probes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot write " + path);
    out << "t,unknown,l1,l2,linf,h1\n";
    for (const auto& p : probes)
        out << fmt_g17(p.t) << ',' << p.unknown << ',' << fmt_g17(p.n.l1) << ','
            << fmt_g17(p.n.l2) << ',' << fmt_g17(p.n.linf) << ',' << fmt_g17(p.n.h1) << '\n';
}

inline void write_ledger_csv(const std::string& path, const blowup_ledger& led) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot write " + path);
    out << "R,I_R,J_R,g_p,g_q,G_p,G_q,res1,res2,C_emp\n";
    for (const auto& r : led.rows)
        out << fmt_g17(r.R) << ',' << fmt_g17(r.I) << ',' << fmt_g17(r.J) << ','
            << fmt_g17(r.g_p) << ',' << fmt_g17(r.g_q) << ',' << fmt_g17(r.G_p) << ','
            << fmt_g17(r.G_q) << ',' << fmt_g17(r.res1) << ',' << fmt_g17(r.res2) << ','
            << fmt_g17(r.c_emp) << '\n';
}

inline void write_decay_csv(const std::string& path, const std::vector<decay_report>& reps) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot write " + path);
    out << "unknown,kind,t1,t2,fitted,ci95,predicted,compensated,verdict\n";
    for (const auto& r : reps)
        out << r.unknown << ',' << r.kind << ',' << fmt_g17(r.t1) << ',' << fmt_g17(r.t2) << ','
            << fmt_g17(r.fitted) << ',' << fmt_g17(r.ci95) << ',' << fmt_g17(r.predicted) << ','
            << (r.compensated ? fmt_g17(*r.compensated) : std::string()) << ','
            << (r.pass ? "Pass" : "Fail") << '\n';
}

inline nlohmann::json verdict_json(const dini_verdict& v) {
    nlohmann::json j;
    j["status"] = to_string(v.status);
    j["rule"] = v.rule;
    if (v.estimate) j["estimate"] = *v.estimate;
    j["evidence"] = v.evidence;
    return j;
}

inline nlohmann::json outcome_json(const sim_outcome& out, const std::string& probes_path,
                                   const kv_map& config_echo) {
    nlohmann::json j;
    j["status"] = to_string(out.status);
    if (out.status != sim_status::reached_tmax) j["t_star"] = out.t_star;
    j["probes_csv_path"] = probes_path;
    j["config_echo"] = config_echo;
    j["wall_time_s"] = out.wall_seconds;
    j["dt_halvings"] = out.halvings;
    j["data_norm"] = out.data_norm;
    return j;
}

// flat binary snapshot: header n, N, L, t as little-endian 64-bit slots
// (ints for n, N), then N^n values; JSON sidecar mirrors the header.
inline void save_field(const std::string& path, const grid_field& f, double t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot write " + path);
    const std::int64_t n = f.g.n, N = f.g.points;
    const double L = f.g.half_length;
    out.write(reinterpret_cast<const char*>(&n), 8);
    out.write(reinterpret_cast<const char*>(&N), 8);
    out.write(reinterpret_cast<const char*>(&L), 8);
    out.write(reinterpret_cast<const char*>(&t), 8);
    out.write(reinterpret_cast<const char*>(f.v.data()),
              static_cast<std::streamsize>(f.v.size() * sizeof(double)));

    nlohmann::json side;
    side["n"] = n;
    side["N"] = N;
    side["L"] = L;
    side["t"] = t;
    side["values"] = std::string(path).substr(path.find_last_of('/') + 1);
    std::ofstream sj(path + ".json", std::ios::binary);
    sj << side.dump(2) << '\n';
}

inline std::pair<grid_field, double> load_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot read " + path);
    std::int64_t n = 0, N = 0;
    double L = 0.0, t = 0.0;
    in.read(reinterpret_cast<char*>(&n), 8);
    in.read(reinterpret_cast<char*>(&N), 8);
    in.read(reinterpret_cast<char*>(&L), 8);
    in.read(reinterpret_cast<char*>(&t), 8);
    grid_field f(grid(static_cast<int>(n), L, static_cast<int>(N)));
    in.read(reinterpret_cast<char*>(f.v.data()),
            static_cast<std::streamsize>(f.v.size() * sizeof(double)));
    if (!in) throw config_error("snapshot truncated: " + path);
    return {std::move(f), t};
}

inline std::vector<norm_probe> read_probes_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot read " + path);
    std::string line;
    if (!std::getline(in, line) || line != "t,unknown,l1,l2,linf,h1")
        throw config_error("bad probes CSV header in " + path);
    std::vector<norm_probe> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        norm_probe p;
        std::getline(ss, tok, ',');
        p.t = std::stod(tok);
        std::getline(ss, p.unknown, ',');
        std::getline(ss, tok, ',');
        p.n.l1 = std::stod(tok);
        std::getline(ss, tok, ',');
        p.n.l2 = std::stod(tok);
        std::getline(ss, tok, ',');
        p.n.linf = std::stod(tok);
        std::getline(ss, tok, ',');
        p.n.h1 = std::stod(tok);
        out.push_back(std::move(p));
    }
    return out;
}

} // namespace modwave
