#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "modwave/blowup.hpp"
#include "modwave/config.hpp"
#include "modwave/dini.hpp"
#include "modwave/io.hpp"
#include "modwave/estimates.hpp"
#include "modwave/plot.hpp"
#include "modwave/solver.hpp"
#include "modwave/sweep.hpp"

namespace fs = std::filesystem;
using namespace modwave;

namespace {

kv_map flat_config(const std::string& path) {
    auto sections = parse_config_file(path);
    if (sections.size() != 1)
        throw config_error("expected a flat config file (no [run] sections): " + path);
    return sections.front().values;
}

double opt_key(const kv_map& kv, const char* key, double fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : std::stod(it->second);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"modwave: numerical laboratory for weakly coupled damped wave systems "
                 "with modulus-of-continuity nonlinearities"};
    app.require_subcommand(1);

    std::string out_dir = "out";
    int threads = 1;
    std::uint64_t seed = 0;
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads for sweeps");
    app.add_option("--seed", seed, "random seed recorded in outputs");

    // classify
    auto* cls = app.add_subcommand("classify", "Dini classification of a modulus pair");
    std::string mu1_lit = "logpow:1", mu2_lit = "logpow:1";
    double qc = 2.0, c_upper = 0.0;
    cls->add_option("--mu1", mu1_lit, "first modulus literal")->required();
    cls->add_option("--mu2", mu2_lit, "second modulus literal")->required();
    cls->add_option("--qc", qc, "critical exponent q_c")->required();
    cls->add_option("--c", c_upper, "upper integration limit (default: domain cap)");

    // curve
    auto* crv = app.add_subcommand("curve", "solve the critical curve for q given (n, p)");
    int curve_n = 1;
    double curve_p = 2.5;
    crv->add_option("--n", curve_n, "space dimension (1 or 2)")->required();
    crv->add_option("--p", curve_p, "exponent p_c > 1")->required();

    // linear-decay
    auto* lin = app.add_subcommand("linear-decay", "Matsumura-rate check of the linear flow");
    matsumura_config mcfg;
    lin->add_option("--n", mcfg.n, "space dimension")->required();
    lin->add_option("--t-max", mcfg.t_max, "horizon");
    lin->add_option("--radius", mcfg.radius, "data support radius");
    lin->add_option("--amplitude", mcfg.amplitude, "data amplitude");
    lin->add_option("--grid-points", mcfg.grid_points, "grid points per axis");
    lin->add_option("--box", mcfg.box_half_length, "box half-length (0 = auto)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "nonlinear run from a config file");
    std::string sim_cfg_path;
    bool sim_save_fields = false;
    sim->add_option("--config", sim_cfg_path, "flat key=value config")->required();
    sim->add_flag("--save-fields", sim_save_fields,
                  "persist trajectory snapshots as binary fields (needs snapshot_dt > 0)");

    // picard
    auto* pic = app.add_subcommand("picard", "fixed-point iteration diagnostics");
    std::string pic_cfg_path;
    int pic_iters = 6;
    double pic_T = 10.0;
    int pic_nodes = 48;
    pic->add_option("--config", pic_cfg_path, "flat key=value config")->required();
    pic->add_option("--iterations", pic_iters, "number of map applications");
    pic->add_option("--t-end", pic_T, "iteration horizon T");
    pic->add_option("--time-nodes", pic_nodes, "quadrature nodes on [0, T]");

    // blowup-scan
    auto* scan = app.add_subcommand("blowup-scan", "test-function functionals over an R ladder");
    std::string scan_cfg_path, ladder_str = "4,1.25,8";
    scan->add_option("--config", scan_cfg_path, "flat key=value config")->required();
    scan->add_option("--ladder", ladder_str, "R0,ratio,count");

    // sweep
    auto* swp = app.add_subcommand("sweep", "run a spec of configs and aggregate");
    std::string sweep_path;
    swp->add_option("--spec", sweep_path, "sweep spec file with [run ...] sections")->required();

    // report
    auto* rpt = app.add_subcommand("report", "decay fits for an existing probes.csv");
    std::string rpt_probes, rpt_cfg_path;
    double rpt_t1 = 10.0, rpt_t2 = 0.0;
    rpt->add_option("--probes", rpt_probes, "probes.csv path")->required();
    rpt->add_option("--config", rpt_cfg_path, "config used for the run")->required();
    rpt->add_option("--t1", rpt_t1, "fit window start");
    rpt->add_option("--t2", rpt_t2, "fit window end (0 = last probe)");

    CLI11_PARSE(app, argc, argv);

    try {
        fs::create_directories(out_dir);

        if (*cls) {
            auto v = classify_dini(modulus::parse(mu1_lit), modulus::parse(mu2_lit), qc, c_upper);
            std::cout << verdict_json(v).dump(2) << '\n';
            return 0;
        }

        if (*crv) {
            auto pair = curve_qc(curve_n, curve_p);
            nlohmann::json j{{"n", pair.n}, {"p_c", pair.p}, {"q_c", pair.q}, {"sigma", pair.sigma}};
            std::cout << j.dump(2) << '\n';
            return 0;
        }

        if (*lin) {
            auto reports = matsumura_check(mcfg);
            const std::string csv = (fs::path(out_dir) / "linear_decay.csv").string();
            write_decay_csv(csv, reports);
            for (const auto& r : reports)
                std::cout << r.kind << ": fitted " << r.fitted << " predicted " << r.predicted
                          << (r.pass ? " Pass" : " Fail") << '\n';
            std::cout << "wrote " << csv << '\n';
            return 0;
        }

        if (*sim) {
            const kv_map kv = flat_config(sim_cfg_path);
            sim_config cfg = sim_config_from(kv);
            sim_outcome out = simulate(cfg);
            const std::string probes_csv = (fs::path(out_dir) / "probes.csv").string();
            write_probes_csv(probes_csv, out.probes);
            std::ofstream oj(fs::path(out_dir) / "outcome.json", std::ios::binary);
            oj << outcome_json(out, probes_csv, kv).dump(2) << '\n';
            if (sim_save_fields) {
                const fs::path fdir = fs::path(out_dir) / "fields";
                fs::create_directories(fdir);
                char name[64];
                for (std::size_t i = 0; i < out.trajectory.size(); ++i) {
                    const auto& sn = out.trajectory[i];
                    grid_field f(out.g);
                    f.v = sn.u;
                    std::snprintf(name, sizeof name, "u_%05zu.bin", i);
                    save_field((fdir / name).string(), f, sn.t);
                    f.v = sn.v;
                    std::snprintf(name, sizeof name, "v_%05zu.bin", i);
                    save_field((fdir / name).string(), f, sn.t);
                }
            }
            plot_probes((fs::path(out_dir) / "norms.svg").string(), "simulate", out.probes);
            std::cout << to_string(out.status);
            if (out.status != sim_status::reached_tmax) std::cout << " at t* = " << out.t_star;
            std::cout << "  (wall " << out.wall_seconds << " s)\n";
            return 0;
        }

        if (*pic) {
            const kv_map kv = flat_config(pic_cfg_path);
            sim_config cfg = sim_config_from(kv);
            pic_iters = static_cast<int>(opt_key(kv, "iterations", pic_iters));
            pic_T = opt_key(kv, "picard_t", pic_T);
            pic_nodes = static_cast<int>(opt_key(kv, "time_nodes", pic_nodes));
            auto res = picard_iterate(cfg, pic_iters, pic_T, pic_nodes);
            nlohmann::json j;
            j["distances"] = res.distances;
            j["no_contraction"] = res.no_contraction;
            j["nonfinite"] = res.nonfinite;
            j["worst_factor"] = res.worst_factor;
            std::ofstream oj(fs::path(out_dir) / "picard.json", std::ios::binary);
            oj << j.dump(2) << '\n';
            std::cout << j.dump(2) << '\n';
            return 0;
        }

        if (*scan) {
            const kv_map kv = flat_config(scan_cfg_path);
            sim_config cfg = sim_config_from(kv);
            if (cfg.data.amp_u0 != 0.0 || cfg.data.amp_v0 != 0.0)
                throw config_error("blowup-scan requires u0 = v0 = 0 data");
            if (!(cfg.data.amp_u1 > 0.0) || !(cfg.data.amp_v1 > 0.0) ||
                cfg.data.profile == profile_kind::dgaussian)
                throw config_error("blowup-scan requires positive-mean u1, v1 data");
            double R0 = 4.0, ratio = 1.25;
            int count = 8;
            std::sscanf(ladder_str.c_str(), "%lf,%lf,%d", &R0, &ratio, &count);
            R0 = opt_key(kv, "r0", R0);
            ratio = opt_key(kv, "ladder_ratio", ratio);
            count = static_cast<int>(opt_key(kv, "ladder_count", count));
            auto ladder = geometric_ladder(R0, ratio, count);
            // cadence must resolve the smallest rung's window [0, R0^2]
            if (cfg.snapshot_dt <= 0.0) cfg.snapshot_dt = std::min(0.5, R0 * R0 / 40.0);
            if (cfg.t_max < ladder.back() * ladder.back())
                throw config_error("t_max must cover the largest R^2 = " +
                                   std::to_string(ladder.back() * ladder.back()));
            sim_outcome out = simulate(cfg);
            if (out.status != sim_status::reached_tmax)
                throw coverage_error("trajectory ended early: " + std::string(to_string(out.status)));
            auto tr = trajectory_from(out);
            const test_function tf{opt_key(kv, "nu", default_nu(cfg.pair))};
            tf.validate(cfg.pair);
            const double nu = tf.nu;
            auto led = g_and_G(tr, cfg.pair, cfg.mu1, cfg.mu2, nu, ladder, cfg.clamp);
            auto rep = ode_inequality_check(led, cfg.pair, cfg.mu1, cfg.mu2,
                                            opt_key(kv, "c0_scale", 1.0));
            const std::string csv = (fs::path(out_dir) / "ledger.csv").string();
            write_ledger_csv(csv, led);
            nlohmann::json j;
            j["nu"] = nu;
            j["applicable"] = rep.applicable;
            j["c0"] = rep.c0;
            j["min_c_emp"] = rep.applicable ? rep.min_c : 0.0;
            j["deriv_residual_p"] = led.deriv_residual_p;
            j["deriv_residual_q"] = led.deriv_residual_q;
            std::ofstream oj(fs::path(out_dir) / "scan.json", std::ios::binary);
            oj << j.dump(2) << '\n';
            std::cout << j.dump(2) << "\nwrote " << csv << '\n';
            return 0;
        }

        if (*swp) {
            auto spec = sweep_spec::from_file(sweep_path, out_dir, seed, threads);
            auto res = run_sweep(spec);
            std::cout << "wrote " << res.summary_csv << " (" << res.rows.size() << " runs)\n";
            for (const auto& r : res.rows)
                std::cout << "  " << r.name << ": " << r.verdict << " / " << r.status
                          << (r.inconsistent ? "  ** INCONSISTENT **" : "") << '\n';
            return 0;
        }

        if (*rpt) {
            const kv_map kv = flat_config(rpt_cfg_path);
            sim_config cfg = sim_config_from(kv);
            auto probes = read_probes_csv(rpt_probes);
            double t2 = rpt_t2;
            if (t2 <= 0.0)
                for (const auto& p : probes) t2 = std::max(t2, p.t);
            const auto ell = loss_weight_config::make(cfg.mu1, cfg.mu2, cfg.pair.q, 0.01, 0.1);
            std::vector<decay_report> reports;
            for (const char* who : {"u", "v"}) {
                const auto kind_u = std::string(who) == "u";
                for (auto [kind, name] : {std::pair{norm_kind::l2, "l2"},
                                          {norm_kind::linf, "linf"},
                                          {norm_kind::grad_l2, "grad_l2"}}) {
                    auto series = probe_series(probes, who, kind);
                    if (series.empty()) continue;
                    auto rep = fit_decay(series, rpt_t1, t2,
                                         predicted_exponent(cfg.pair,
                                                            kind_u ? unknown_kind::u
                                                                   : unknown_kind::v,
                                                            kind),
                                         kind_u ? &ell : nullptr);
                    rep.unknown = who;
                    rep.kind = name;
                    reports.push_back(rep);
                }
            }
            const std::string csv = (fs::path(out_dir) / "report.csv").string();
            write_decay_csv(csv, reports);
            for (const auto& r : reports)
                std::cout << r.unknown << ' ' << r.kind << ": fitted " << r.fitted
                          << " predicted " << r.predicted << (r.pass ? " Pass" : " Fail") << '\n';
            std::cout << "wrote " << csv << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
