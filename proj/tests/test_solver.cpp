#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "modwave/solver.hpp"

using namespace modwave;

namespace {

sim_config base_config_1d() {
    sim_config cfg;
    cfg.pair = curve_qc(1, 2.5); // q = 6
    cfg.mu1 = modulus::power(0.5);
    cfg.mu2 = modulus::power(0.5);
    cfg.data.profile = profile_kind::gaussian;
    cfg.data.radius = 2.0;
    return cfg;
}

double l2_diff(const grid_field& a, const grid_field& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) {
        const double d = a.v[i] - b.v[i];
        acc += d * d;
    }
    return std::sqrt(acc * a.g.cell());
}

// dense RK4 on the flat-mode system a'' + a' = f(b), b'' + b' = g(a)
struct flat_oracle {
    double au, aut, av, avt;
    void advance(double T, int steps, double p, double q, const modulus& mu1,
                 const modulus& mu2) {
        const double h = T / steps;
        auto fu = [&](double b) { return std::pow(std::fabs(b), p) * mu1.eval_clamped(std::fabs(b)); };
        auto fv = [&](double a) { return std::pow(std::fabs(a), q) * mu2.eval_clamped(std::fabs(a)); };
        auto deriv = [&](std::array<double, 4> y) {
            return std::array<double, 4>{y[1], -y[1] + fu(y[2]), y[3], -y[3] + fv(y[0])};
        };
        std::array<double, 4> y{au, aut, av, avt};
        for (int i = 0; i < steps; ++i) {
            auto k1 = deriv(y);
            std::array<double, 4> y2, y3, y4;
            for (int j = 0; j < 4; ++j) y2[j] = y[j] + 0.5 * h * k1[j];
            auto k2 = deriv(y2);
            for (int j = 0; j < 4; ++j) y3[j] = y[j] + 0.5 * h * k2[j];
            auto k3 = deriv(y3);
            for (int j = 0; j < 4; ++j) y4[j] = y[j] + h * k3[j];
            auto k4 = deriv(y4);
            for (int j = 0; j < 4; ++j) y[j] += h / 6.0 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
        }
        au = y[0];
        aut = y[1];
        av = y[2];
        avt = y[3];
    }
};

} // namespace

TEST_CASE("nonlinearity evaluation", "[solver]") {
    const grid g(1, 5.0, 64);
    grid_field zero(g);
    CHECK(nonlinearity(zero, 2.0, modulus::power(1)).max_abs() == 0.0);

    grid_field f(g, 0.1);
    auto a = nonlinearity(f, 2.0, modulus::power(1));
    CHECK(a.v[5] == Catch::Approx(0.001).epsilon(1e-13));

    auto b = nonlinearity(f, 2.0, modulus::log_pow(1));
    CHECK(b.v[5] == Catch::Approx(0.01 / std::log(10.0)).epsilon(1e-13));

    // freeze clamp above s_max: mu held at mu(0.1) = 1/ln 10
    grid_field big(g, 0.5);
    auto c = nonlinearity(big, 2.0, modulus::log_pow(1), clamp_mode::freeze);
    CHECK(c.v[5] == Catch::Approx(0.25 / std::log(10.0)).epsilon(1e-13));
    CHECK_THROWS_AS(nonlinearity(big, 2.0, modulus::log_pow(1), clamp_mode::strict), domain_error);

    grid_field bad(g, 1.0);
    bad.v[3] = std::nan("");
    CHECK_THROWS_AS(nonlinearity(bad, 2.0, modulus::power(1)), nonfinite_input);
}

TEST_CASE("step with nonlinearity off equals the exact linear flow", "[solver]") {
    sim_config cfg = base_config_1d();
    cfg.nonlinearity_on = false;
    cfg.box_half_length = 20.0;
    cfg.grid_points = 256;
    cfg.data.amp_u0 = 0.3;
    cfg.data.amp_u1 = -0.2;
    cfg.data.amp_v0 = 0.1;
    cfg.data.amp_v1 = 0.4;

    sim_state s = make_initial_state(cfg);
    const grid_field u0 = s.u, u1 = s.ut;
    const double dt = 0.37;
    step(s, cfg, dt);
    auto [w, wt] = linear_evolve(u0, u1, dt);
    CHECK(l2_diff(s.u, w) <= 1e-12);
    CHECK(l2_diff(s.ut, wt) <= 1e-12);
}

TEST_CASE("manufactured solution: second order in dt", "[solver]") {
    // u* = v* = e^-t g(x), g Gaussian; forcing makes it exact for the full system
    sim_config cfg = base_config_1d();
    cfg.pair = curve_qc(1, 3.0); // symmetric pair q = 3
    cfg.mu1 = modulus::power(1.0);
    cfg.mu2 = modulus::power(1.0);
    cfg.box_half_length = 10.0;
    cfg.grid_points = 256;
    cfg.data.amp_u0 = 0.0; // state built manually below

    const grid g(1, cfg.box_half_length, cfg.grid_points);
    auto gauss = [](double x) { return std::exp(-x * x); };
    auto lap_gauss = [](double x) { return (4.0 * x * x - 2.0) * std::exp(-x * x); };
    auto nl = [&](double w) { return std::pow(std::fabs(w), 4.0); }; // |w|^3 * |w| power mu

    cfg.forcing_u = [&](double t, double x, double) {
        const double w = std::exp(-t) * gauss(x);
        return -std::exp(-t) * lap_gauss(x) - nl(w);
    };
    cfg.forcing_v = cfg.forcing_u;

    auto exact_state = [&](double t) {
        sim_state s;
        s.u = grid_field(g);
        for (int j = 0; j < g.points; ++j) s.u.v[j] = std::exp(-t) * gauss(g.coord(j));
        s.ut = s.u;
        for (double& x : s.ut.v) x = -x;
        s.v = s.u;
        s.vt = s.ut;
        s.t = t;
        return s;
    };

    const double T = 1.0;
    std::vector<double> errors;
    for (double dt : {0.1, 0.05, 0.025, 0.0125}) {
        sim_state s = exact_state(0.0);
        detail::mode_tables tab;
        const int steps = static_cast<int>(std::round(T / dt));
        for (int i = 0; i < steps; ++i) step(s, cfg, dt, tab);
        errors.push_back(l2_diff(s.u, exact_state(T).u));
    }
    for (std::size_t i = 1; i < errors.size(); ++i) {
        const double order = std::log2(errors[i - 1] / errors[i]);
        INFO("halving " << i << ": order " << order);
        CHECK(order >= 1.9);
        CHECK(order <= 3.0);
    }
}

TEST_CASE("flat data reduces to the zero-mode ODE", "[solver]") {
    sim_config cfg = base_config_1d();
    cfg.pair = curve_qc(1, 3.0);
    cfg.mu1 = modulus::power(1.0);
    cfg.mu2 = modulus::power(1.0);
    cfg.box_half_length = 5.0;
    cfg.grid_points = 64;

    const grid g(1, cfg.box_half_length, cfg.grid_points);
    sim_state s;
    s.u = grid_field(g, 0.1);
    s.ut = grid_field(g, 0.0);
    s.v = grid_field(g, 0.1);
    s.vt = grid_field(g, 0.0);

    detail::mode_tables tab;
    const double dt = 2.5e-4, T = 5.0;
    const int steps = static_cast<int>(std::round(T / dt));
    for (int i = 0; i < steps; ++i) step(s, cfg, dt, tab);

    flat_oracle oracle{0.1, 0.0, 0.1, 0.0};
    oracle.advance(T, 50000, cfg.pair.p, cfg.pair.q, cfg.mu1, cfg.mu2);
    CHECK(std::fabs(s.u.v[7] - oracle.au) <= 1e-6);
    CHECK(std::fabs(s.v.v[7] - oracle.av) <= 1e-6);
}

TEST_CASE("self-convergence on smooth data", "[solver]") {
    sim_config cfg = base_config_1d();
    cfg.box_half_length = 15.0;
    cfg.grid_points = 256;
    cfg.data.amp_u1 = 0.5;
    cfg.data.amp_v1 = 0.5;

    auto run = [&](double dt) {
        sim_state s = make_initial_state(cfg);
        detail::mode_tables tab;
        const int steps = static_cast<int>(std::round(4.0 / dt));
        for (int i = 0; i < steps; ++i) step(s, cfg, dt, tab);
        return s;
    };
    auto a = run(0.1), b = run(0.05), c = run(0.025);
    const double d1 = l2_diff(a.u, b.u), d2 = l2_diff(b.u, c.u);
    CHECK(d1 / d2 >= 3.5);
}

TEST_CASE("simulate: zero amplitude", "[solver]") {
    sim_config cfg = base_config_1d();
    cfg.t_max = 5.0;
    cfg.dt = 0.1;
    cfg.probe_dt = 1.0;
    cfg.grid_points = 64;
    cfg.box_half_length = 10.0;
    auto out = simulate(cfg);
    CHECK(out.status == sim_status::reached_tmax);
    for (const auto& p : out.probes) {
        CHECK(p.n.l2 == 0.0);
        CHECK(p.n.linf == 0.0);
    }
    // probes strictly increasing in t per unknown
    double prev = -1.0;
    for (const auto& p : out.probes)
        if (p.unknown == "u") {
            CHECK(p.t > prev);
            prev = p.t;
        }
}

TEST_CASE("simulate: symmetric configs give u == v", "[solver]") {
    sim_config cfg = base_config_1d();
    cfg.pair = curve_qc(1, 3.0); // p = q = 3
    cfg.mu1 = modulus::power(0.5);
    cfg.mu2 = modulus::power(0.5);
    cfg.data.amp_u1 = 0.05;
    cfg.data.amp_v1 = 0.05;
    cfg.t_max = 10.0;
    cfg.dt = 0.05;
    cfg.probe_dt = 1.0;
    cfg.box_half_length = 20.0;
    cfg.grid_points = 256;
    cfg.snapshot_dt = 2.0;
    auto out = simulate(cfg);
    REQUIRE(out.status == sim_status::reached_tmax);
    for (const auto& sn : out.trajectory) {
        double diff = 0.0;
        for (std::size_t i = 0; i < sn.u.size(); ++i)
            diff = std::max(diff, std::fabs(sn.u[i] - sn.v[i]));
        CHECK(diff <= 1e-10);
    }
}

TEST_CASE("simulate: large-amplitude divergent-mu run blows up", "[solver]") {
    sim_config cfg = base_config_1d();
    cfg.mu1 = modulus::log_pow(1);
    cfg.mu2 = modulus::log_pow(1);
    cfg.data.amp_u1 = 50.0;
    cfg.data.amp_v1 = 50.0;
    cfg.t_max = 10.0;
    cfg.dt = 1e-3;
    cfg.probe_dt = 0.1;
    cfg.box_half_length = 15.0;
    cfg.grid_points = 256;

    auto out = simulate(cfg);
    REQUIRE(out.status == sim_status::blowup_detected);
    CHECK(out.t_star < cfg.t_max);
    CHECK(out.t_star > 0.0);

    // t* robust under dt halving
    sim_config half = cfg;
    half.dt = 5e-4;
    auto out2 = simulate(half);
    REQUIRE(out2.status == sim_status::blowup_detected);
    CHECK(std::fabs(out2.t_star - out.t_star) <= 0.05 * out.t_star);
}

TEST_CASE("comparison smoke test: amplitude doubling", "[solver]") {
    sim_config cfg = base_config_1d();
    cfg.t_max = 2.0;
    cfg.dt = 0.05;
    cfg.probe_dt = 1.0;
    cfg.box_half_length = 10.0;
    cfg.grid_points = 128;

    double prev_u = -1.0, prev_v = -1.0;
    for (double amp : {0.01, 0.02, 0.04, 0.08}) {
        cfg.data.amp_u1 = amp;
        cfg.data.amp_v1 = amp;
        auto out = simulate(cfg);
        double first_u = 0.0, first_v = 0.0;
        for (const auto& p : out.probes)
            if (p.t >= 1.0 - 1e-9) {
                if (p.unknown == "u" && first_u == 0.0) first_u = p.n.linf;
                if (p.unknown == "v" && first_v == 0.0) first_v = p.n.linf;
            }
        CHECK(first_u >= prev_u);
        CHECK(first_v >= prev_v);
        prev_u = first_u;
        prev_v = first_v;
    }
}

TEST_CASE("2D flat data reduces to the zero-mode ODE", "[solver]") {
    sim_config cfg;
    cfg.pair = curve_qc(2, 2.0); // p = q = 2
    cfg.mu1 = modulus::power(1.0);
    cfg.mu2 = modulus::power(1.0);
    cfg.box_half_length = 4.0;
    cfg.grid_points = 16;

    const grid g(2, cfg.box_half_length, cfg.grid_points);
    sim_state s;
    s.u = grid_field(g, 0.1);
    s.ut = grid_field(g, 0.0);
    s.v = grid_field(g, 0.08);
    s.vt = grid_field(g, 0.0);

    detail::mode_tables tab;
    const double dt = 5e-4, T = 3.0;
    for (int i = 0; i < static_cast<int>(std::round(T / dt)); ++i) step(s, cfg, dt, tab);

    flat_oracle oracle{0.1, 0.0, 0.08, 0.0};
    oracle.advance(T, 30000, cfg.pair.p, cfg.pair.q, cfg.mu1, cfg.mu2);
    CHECK(std::fabs(s.u.v[5] - oracle.au) <= 1e-6);
    CHECK(std::fabs(s.v.v[5] - oracle.av) <= 1e-6);
}

TEST_CASE("2D symmetric simulate keeps u == v", "[solver]") {
    sim_config cfg;
    cfg.pair = curve_qc(2, 2.0);
    cfg.mu1 = modulus::power(0.5);
    cfg.mu2 = modulus::power(0.5);
    cfg.data.profile = profile_kind::gaussian;
    cfg.data.radius = 1.5;
    cfg.data.amp_u1 = 0.05;
    cfg.data.amp_v1 = 0.05;
    cfg.dt = 0.05;
    cfg.t_max = 5.0;
    cfg.probe_dt = 1.0;
    cfg.snapshot_dt = 1.0;
    cfg.box_half_length = 8.0;
    cfg.grid_points = 64;
    auto out = simulate(cfg);
    REQUIRE(out.status == sim_status::reached_tmax);
    for (const auto& sn : out.trajectory) {
        double diff = 0.0;
        for (std::size_t i = 0; i < sn.u.size(); ++i)
            diff = std::max(diff, std::fabs(sn.u[i] - sn.v[i]));
        CHECK(diff <= 1e-10);
    }
}

TEST_CASE("persistent non-finite steps at small norms report numerical failure", "[solver]") {
    sim_config cfg = base_config_1d();
    cfg.data.amp_v1 = 0.01;
    cfg.dt = 0.1;
    cfg.t_max = 5.0;
    cfg.probe_dt = 0.5;
    cfg.box_half_length = 10.0;
    cfg.grid_points = 64;
    cfg.forcing_u = [](double t, double, double) {
        return t > 1.0 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
    };
    auto out = simulate(cfg);
    CHECK(out.status == sim_status::numerical_failure);
    CHECK(out.t_star <= 1.0 + 0.1 + 1e-9);
    CHECK(out.halvings == 6);
}

TEST_CASE("config validation", "[solver]") {
    sim_config cfg = base_config_1d();
    cfg.dt = -0.1;
    CHECK_THROWS_AS(cfg.validate(), config_error);
    cfg.dt = 0.05;
    cfg.blowup_threshold = 1.0;
    cfg.data.amp_u1 = 2.0;
    CHECK_THROWS_AS(cfg.validate(), config_error);

    // horizon caps follow the box-memory rule
    sim_config long1d = base_config_1d();
    long1d.t_max = 1500.0;
    CHECK_THROWS_AS(long1d.validate(), config_error);
    sim_config long2d = base_config_1d();
    long2d.pair = curve_qc(2, 1.5);
    long2d.t_max = 500.0;
    CHECK_THROWS_AS(long2d.validate(), config_error);
}
