#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "relent/builtins.hpp"
#include "relent/rng.hpp"
#include "test_oracles.hpp"

using namespace relent;

namespace {
Vec scalar(double v) {
    Vec u(1);
    u[0] = v;
    return u;
}
Vec state2(double a, double b) {
    Vec u(2);
    u << a, b;
    return u;
}
}  // namespace

TEST_CASE("scalar baseline structure") {
    const SystemSpec s = make_scalar_sanity();
    CHECK(s.A(scalar(2.0), 0, 0)[0] == doctest::Approx(2.0));
    CHECK(s.G(scalar(2.0), 0, 0)[0] == doctest::Approx(2.0));
    CHECK(s.q[0](scalar(3.0), 0, 0) == doctest::Approx(9.0));
    CHECK(s.B[0][0](scalar(0.0), 0, 0)(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("duct gas entropy and multiplier at reference states") {
    const SystemSpec s = make_duct_gas(1.0, 2.0, sin_profile(2.0, 0.3));
    CHECK(s.eta(state2(1.0, 0.0), 0, 0) == doctest::Approx(1.0));  // kappa rho^2/(gamma-1)

    // grad eta against a finite-difference oracle, and the frozen value (4, 0)
    const Vec G = s.G(state2(2.0, 0.0), 0.3, 0.0);
    const Vec G_o = oracle::gradient(
        [&](const Vec& U) { return s.eta(U, 0.3, 0.0); }, state2(2.0, 0.0));
    CHECK(G[0] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(G[1] == doctest::Approx(0.0));
    CHECK((G - G_o).norm() <= 1e-6);
}

TEST_CASE("constant duct profile recovers the homogeneous gas system") {
    const SystemSpec s = make_duct_gas(1.0, 2.0, constant_profile(3.0));
    Rng rng(5);
    for (int k = 0; k < 100; ++k) {
        const Vec U = state2(rng.uniform(0.2, 3.0), rng.uniform(-2.0, 2.0));
        const double x = rng.uniform(0.0, 6.28), t = rng.uniform(0.0, 2.0);
        CHECK(s.P(U, x, t).norm() == doctest::Approx(0.0));
        CHECK(eval_Z(s, U, x, t) == doctest::Approx(0.0));
    }
}

TEST_CASE("duct gas rejects vacuum states") {
    const SystemSpec s = make_duct_gas(1.0, 2.0, constant_profile(1.0), 1e-8);
    CHECK_THROWS_AS((void)s.eta(state2(0.0, 1.0), 0, 0), DomainError);
    CHECK(s.inadmissible(state2(-0.5, 0.0)).find("rho") != std::string::npos);
}

TEST_CASE("resolvent of the unit-rate exponential kernel is exp(-2t)") {
    const double dt = 1e-3, T = 10.0;
    const int m = static_cast<int>(std::llround(T / dt)) + 1;
    std::vector<double> k(m);
    for (int i = 0; i < m; ++i) k[i] = std::exp(-i * dt);

    const ResolventTable table = resolvent_kernel(k, dt);
    double err = 0.0;
    for (int i = 0; i < m; ++i)
        err = std::max(err, std::abs(table.r[i] - std::exp(-2.0 * i * dt)));
    CHECK(err <= 1e-4);
    CHECK(err <= 1e-6);  // trapezoid does much better than the contract asks

    // halving dt cuts the error by the quadrature order
    const double dt2 = dt / 2.0;
    std::vector<double> k2(2 * (m - 1) + 1);
    for (std::size_t i = 0; i < k2.size(); ++i) k2[i] = std::exp(-static_cast<double>(i) * dt2);
    const ResolventTable table2 = resolvent_kernel(k2, dt2);
    double err2 = 0.0;
    for (std::size_t i = 0; i < k2.size(); ++i)
        err2 = std::max(err2, std::abs(table2.r[i] - std::exp(-2.0 * i * dt2)));
    CHECK(err / err2 >= 3.5);
}

TEST_CASE("resolvent of the zero kernel vanishes") {
    std::vector<double> k(101, 0.0);
    const ResolventTable table = resolvent_kernel(k, 0.01);
    for (double v : table.r) CHECK(v == 0.0);
}

TEST_CASE("resolvent of a small kernel matches its first Picard iterate") {
    const double c = 1e-2, dt = 1e-3, T = 5.0;
    const int m = static_cast<int>(std::llround(T / dt)) + 1;
    std::vector<double> k(m);
    for (int i = 0; i < m; ++i) k[i] = c * std::exp(-i * dt);
    const ResolventTable table = resolvent_kernel(k, dt);

    // r1 = k - k*k by trapezoid, an independent quadrature in test code
    double worst = 0.0;
    for (int i = 0; i < m; i += 50) {
        double conv = 0.0;
        for (int j = 0; j <= i; ++j) {
            const double w = (j == 0 || j == i) ? 0.5 : 1.0;
            conv += w * k[i - j] * k[j];
        }
        conv *= dt;
        worst = std::max(worst, std::abs(table.r[i] - (k[i] - conv)));
    }
    CHECK(worst <= c * c * c * 2.0);
}

TEST_CASE("resolvent rejects the singular trapezoid diagonal") {
    const double dt = 0.01;
    std::vector<double> k(100, 1.0);
    k[0] = -2.0 / dt;  // 1 + dt k(0)/2 = 0
    CHECK_THROWS_AS((void)resolvent_kernel(k, dt), QuadratureError);
}

TEST_CASE("memory source vanishes with no history and at t=0") {
    const SystemSpec s = make_memory_scalar([](double t) { return std::exp(-t); }, 4.0, 1e-3);
    CHECK(s.P(scalar(0.0), 0.1, 1.0)[0] == doctest::Approx(0.0));
    CHECK(s.P(scalar(1.0), 0.1, 0.0)[0] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("memory source obeys the fundamental theorem on constant history") {
    const SystemSpec s = make_memory_scalar([](double t) { return std::exp(-t); }, 4.0, 1e-3);
    auto& mem = *s.memory;

    const int cells = 8;
    mem.history.cells = cells;
    mem.domain_length = 6.283185307179586;
    std::vector<Vec> ones(cells, scalar(1.0));
    for (int j = 0; j <= 1000; ++j) mem.history.append(j * 0.001, ones);
    mem.freeze(1.0);

    // P = r(0) - r(1) + int_0^1 r'(s) ds = 0 up to the two quadratures
    CHECK(std::abs(s.P(scalar(1.0), 0.5, 1.0)[0]) <= 1e-5);
}

TEST_CASE("memory freeze demands history coverage") {
    const SystemSpec s = make_memory_scalar([](double t) { return std::exp(-t); }, 4.0, 1e-3);
    auto& mem = *s.memory;
    mem.history.cells = 4;
    mem.domain_length = 1.0;
    std::vector<Vec> snap(4, scalar(0.5));
    mem.history.append(0.0, snap);
    mem.history.append(0.2, snap);
    CHECK_THROWS_AS(mem.freeze(0.5), HistoryGapError);
}

TEST_CASE("self-similar wrapper scales the viscosity linearly in time") {
    BtildeSpec quad;
    quad.B = {{[](const Vec& U, double, double) {
        return Mat{(1.0 + U[0] * U[0]) * Mat::Identity(1, 1)};
    }}};
    quad.dB = {{[](const Vec& U, double, double) {
        return Tensor3{Mat{2.0 * U[0] * Mat::Identity(1, 1)}};
    }}};
    const SystemSpec s = make_selfsimilar(make_scalar_sanity(), quad);

    CHECK(s.B[0][0](scalar(3.0), 0, 0.0)(0, 0) == doctest::Approx(0.0));
    CHECK(s.B[0][0](scalar(0.0), 0, 2.0)(0, 0) == doctest::Approx(2.0));
    CHECK(s.dB[0][0](scalar(1.0), 0, 2.0)[0](0, 0) == doctest::Approx(4.0));
    CHECK(s.B_x[0][0](scalar(1.0), 0.3, 2.0)(0, 0) == doctest::Approx(0.0));
}
