#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "modwave/kernels.hpp"
#include "modwave/quadrature.hpp"

using namespace modwave;

namespace {

// independent oracle: RK4 on m'' + m' + xi^2 m = 0
struct mode_state {
    double m, mp;
};

mode_state ode_oracle(double t, double xi, bool k1) {
    mode_state s{k1 ? 0.0 : 1.0, k1 ? 1.0 : 0.0};
    const int steps = 50000;
    const double h = t / steps;
    auto f = [xi](mode_state y) { return mode_state{y.mp, -y.mp - xi * xi * y.m}; };
    for (int i = 0; i < steps; ++i) {
        const auto a = f(s);
        const auto b = f({s.m + 0.5 * h * a.m, s.mp + 0.5 * h * a.mp});
        const auto c = f({s.m + 0.5 * h * b.m, s.mp + 0.5 * h * b.mp});
        const auto d = f({s.m + h * c.m, s.mp + h * c.mp});
        s.m += h / 6.0 * (a.m + 2 * b.m + 2 * c.m + d.m);
        s.mp += h / 6.0 * (a.mp + 2 * b.mp + 2 * c.mp + d.mp);
    }
    return s;
}

} // namespace

TEST_CASE("zero-mode identities", "[kernels]") {
    for (double t : {0.0, 0.3, 1.0, 5.0, 40.0}) {
        CHECK(kernel_multiplier(t, 0.0, kernel_kind::k0) == Catch::Approx(1.0).margin(1e-12));
        CHECK(kernel_multiplier(t, 0.0, kernel_kind::k1) ==
              Catch::Approx(1.0 - std::exp(-t)).margin(1e-12));
    }
    CHECK(kernel_multiplier(1.0, 0.0, kernel_kind::k1) ==
          Catch::Approx(0.6321205588285577).epsilon(1e-12));
}

TEST_CASE("double-root value", "[kernels]") {
    CHECK(kernel_multiplier(2.0, 0.5, kernel_kind::k1) ==
          Catch::Approx(2.0 * std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("branch continuity at |xi| = 1/2", "[kernels]") {
    for (double t : {0.5, 2.0, 7.0}) {
        const double at = kernel_multiplier(t, 0.5, kernel_kind::k1);
        // smooth in xi: differences shrink like d * dK1/dxi, agreeing to 1e-9
        // once d reaches 1e-9
        for (double d : {1e-3, 1e-5, 1e-7, 1e-9}) {
            const double slack = 4.0 * d * t * t * (1.0 + t) + 1e-13;
            CHECK(kernel_multiplier(t, 0.5 - d, kernel_kind::k1) == Catch::Approx(at).margin(slack));
            CHECK(kernel_multiplier(t, 0.5 + d, kernel_kind::k1) == Catch::Approx(at).margin(slack));
        }
        CHECK(kernel_multiplier(t, 0.5 - 1e-9, kernel_kind::k1) == Catch::Approx(at).margin(1e-9));
        CHECK(kernel_multiplier(t, 0.5 + 1e-9, kernel_kind::k1) == Catch::Approx(at).margin(1e-9));
    }
}

TEST_CASE("multipliers match the ODE oracle at random points", "[kernels]") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> ut(0.0, 5.0), uxi(0.0, 10.0);
    for (int i = 0; i < 200; ++i) {
        const double t = ut(rng), xi = uxi(rng);
        const auto s0 = ode_oracle(t, xi, false);
        const auto s1 = ode_oracle(t, xi, true);
        auto close = [](double a, double b) {
            return std::fabs(a - b) <= 1e-9 * std::max(1.0, std::fabs(b));
        };
        CHECK(close(kernel_multiplier(t, xi, kernel_kind::k0), s0.m));
        CHECK(close(kernel_multiplier(t, xi, kernel_kind::dtk0), s0.mp));
        CHECK(close(kernel_multiplier(t, xi, kernel_kind::k1), s1.m));
        CHECK(close(kernel_multiplier(t, xi, kernel_kind::dtk1), s1.mp));
    }
}

TEST_CASE("time derivatives match finite differences", "[kernels]") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> ut(0.1, 4.0), uxi(0.0, 6.0);
    for (int i = 0; i < 50; ++i) {
        const double t = ut(rng), xi = uxi(rng), h = 1e-6;
        const double fd0 = (kernel_multiplier(t + h, xi, kernel_kind::k0) -
                            kernel_multiplier(t - h, xi, kernel_kind::k0)) /
                           (2 * h);
        const double fd1 = (kernel_multiplier(t + h, xi, kernel_kind::k1) -
                            kernel_multiplier(t - h, xi, kernel_kind::k1)) /
                           (2 * h);
        CHECK(kernel_multiplier(t, xi, kernel_kind::dtk0) == Catch::Approx(fd0).margin(1e-7));
        CHECK(kernel_multiplier(t, xi, kernel_kind::dtk1) == Catch::Approx(fd1).margin(1e-7));
    }
}

TEST_CASE("Duhamel weight equals the integral of K1", "[kernels]") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> ut(0.05, 4.0), uxi(0.0, 8.0);
    for (int i = 0; i < 60; ++i) {
        const double t = ut(rng), xi = uxi(rng);
        const double direct = quad_adaptive(
            [xi](double s) { return kernel_multiplier(s, xi, kernel_kind::k1); }, 0.0, t, 1e-12);
        CHECK(kernel_duhamel_weight(t, xi) == Catch::Approx(direct).margin(1e-10));
    }
    // small-xi stability (the cancellation-prone corner)
    for (double xi : {0.0, 1e-6, 1e-3, 0.05, 0.299, 0.3, 0.45, 0.5, 0.500001}) {
        const double t = 1.7;
        const double direct = quad_adaptive(
            [xi](double s) { return kernel_multiplier(s, xi, kernel_kind::k1); }, 0.0, t, 1e-13);
        CHECK(kernel_duhamel_weight(t, xi) == Catch::Approx(direct).margin(1e-10));
    }
}
