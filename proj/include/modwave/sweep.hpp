#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "modwave/config.hpp"
#include "modwave/dini.hpp"
#include "modwave/fitting.hpp"
#include "modwave/io.hpp"
#include "modwave/plot.hpp"
#include "modwave/solver.hpp"

namespace modwave {

struct sweep_spec {
    std::vector<config_section> runs; // named sections, defaults already folded in
    std::string out_dir;
    std::uint64_t seed = 0;
    int threads = 1;

    static sweep_spec from_file(const std::string& path, const std::string& out_dir,
                                std::uint64_t seed, int threads) {
        auto sections = parse_config_file(path);
        sweep_spec spec;
        spec.out_dir = out_dir;
        spec.seed = seed;
        spec.threads = std::max(1, threads);
        const kv_map defaults = sections.front().values;
        std::set<std::string> names;
        for (std::size_t i = 1; i < sections.size(); ++i) {
            if (sections[i].name.empty())
                throw config_error("sweep spec: unnamed run section");
            if (!names.insert(sections[i].name).second)
                throw config_error("sweep spec: duplicate run name " + sections[i].name);
            kv_map merged = defaults;
            for (const auto& [k, v] : sections[i].values) merged[k] = v;
            spec.runs.push_back({sections[i].name, std::move(merged)});
        }
        if (spec.runs.empty()) throw config_error("sweep spec: no runs");
        return spec;
    }
};

struct sweep_row {
    std::string name;
    std::string verdict;   // classifier verdict for (mu1, mu2, q)
    std::string status;    // simulation status or "Error: ..."
    double t_star = 0.0;
    double u_linf_fit = 0.0, v_linf_fit = 0.0;
    bool fits_valid = false;
    bool inconsistent = false; // Converges verdict but no global run at small amplitude
};

struct sweep_result {
    std::vector<sweep_row> rows;
    std::string summary_csv;
};

// Executes the runs concurrently; per-run outputs land in distinct
// directories, aggregation happens once after all joins, rows sorted by name.
inline sweep_result run_sweep(const sweep_spec& spec) {
    namespace fs = std::filesystem;
    fs::create_directories(spec.out_dir);
    std::vector<sweep_row> rows(spec.runs.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= spec.runs.size()) return;
            const auto& run = spec.runs[i];
            sweep_row row;
            row.name = run.name;
            const fs::path dir = fs::path(spec.out_dir) / run.name;
            try {
                fs::create_directories(dir);
                sim_config cfg = sim_config_from(run.values);
                const auto verdict = classify_dini(cfg.mu1, cfg.mu2, cfg.pair.q, 0.0, false);
                row.verdict = to_string(verdict.status);

                sim_outcome out = simulate(cfg);
                row.status = to_string(out.status);
                row.t_star = out.t_star;
                write_probes_csv((dir / "probes.csv").string(), out.probes);
                std::ofstream oj(dir / "outcome.json", std::ios::binary);
                oj << outcome_json(out, (dir / "probes.csv").string(), run.values).dump(2) << '\n';

                const double win2 = 0.75 * cfg.t_max;
                if (out.status == sim_status::reached_tmax && win2 >= 100.0) {
                    try {
                        auto fu = fit_decay(probe_series(out.probes, "u", norm_kind::linf), 10.0,
                                            win2,
                                            predicted_exponent(cfg.pair, unknown_kind::u,
                                                               norm_kind::linf));
                        auto fv = fit_decay(probe_series(out.probes, "v", norm_kind::linf), 10.0,
                                            win2,
                                            predicted_exponent(cfg.pair, unknown_kind::v,
                                                               norm_kind::linf));
                        row.u_linf_fit = fu.fitted;
                        row.v_linf_fit = fv.fitted;
                        row.fits_valid = true;
                    } catch (const std::exception&) {
                        // short or degenerate series: no fit columns
                    }
                }
                plot_probes((dir / "norms.svg").string(), run.name, out.probes,
                            {{"u predicted", predicted_exponent(cfg.pair, unknown_kind::u,
                                                                norm_kind::linf)},
                             {"v predicted", predicted_exponent(cfg.pair, unknown_kind::v,
                                                                norm_kind::linf)}});

                const bool small_amp = cfg.data.max_amp() <= 0.1;
                row.inconsistent = verdict.status == dini_status::converges && small_amp &&
                                   out.status != sim_status::reached_tmax;
            } catch (const std::exception& e) {
                row.status = std::string("Error: ") + e.what();
            }
            rows[i] = std::move(row);
        }
    };
    std::vector<std::thread> pool;
    for (int k = 0; k < spec.threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    std::sort(rows.begin(), rows.end(),
              [](const sweep_row& a, const sweep_row& b) { return a.name < b.name; });

    const std::string csv = (fs::path(spec.out_dir) / "summary.csv").string();
    std::ofstream out(csv, std::ios::binary);
    out << "name,verdict,status,t_star,u_linf_fit,v_linf_fit,flag\n";
    for (const auto& r : rows) {
        out << r.name << ',' << r.verdict << ',' << r.status << ',' << fmt_g17(r.t_star) << ',';
        if (r.fits_valid) out << fmt_g17(r.u_linf_fit) << ',' << fmt_g17(r.v_linf_fit);
        else out << ',';
        out << ',' << (r.inconsistent ? "INCONSISTENT" : "") << '\n';
    }
    out.close();
    return {std::move(rows), csv};
}

} // namespace modwave
