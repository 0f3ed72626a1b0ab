#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "relent/builtins.hpp"
#include "relent/rng.hpp"
#include "relent/system.hpp"
#include "test_oracles.hpp"
#include "test_systems.hpp"

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

TEST_CASE("eval_R vanishes for the homogeneous scalar baseline") {
    const SystemSpec s = make_scalar_sanity();
    for (double u : {-2.0, 0.0, 0.7, 3.0}) {
        const Vec R = eval_R(s, scalar(u), 1.3, 0.4);
        CHECK(R.norm() == doctest::Approx(0.0).epsilon(1e-15));
    }
}

TEST_CASE("eval_R reproduces the duct source at x=0 with a=2+sin x") {
    const SystemSpec s = make_duct_gas(1.0, 2.0, sin_profile(2.0, 1.0));
    const Vec R = eval_R(s, state2(1.0, 1.0), 0.0, 7.0);
    // a'(0)/a(0) = 1/2 against (m, m^2/rho) = (1, 1)
    CHECK(R[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(R[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("the self-similar wrapper leaves R unchanged") {
    const SystemSpec s = make_selfsimilar(make_scalar_sanity(), identity_btilde(1));
    CHECK(eval_R(s, scalar(0.8), 0.2, 1.5).norm() == doctest::Approx(0.0));
}

TEST_CASE("eval_Z on the duct system is G.R for the (x,t)-free entropy pair") {
    const SystemSpec s = make_duct_gas(1.0, 2.0, sin_profile(2.0, 1.0));
    const Vec U = state2(1.0, 1.0);
    // G(U) = (-1/2 + 2, 1), R = (1/2, 1/2), so G.R = 0.75 + 0.5
    CHECK(eval_Z(s, U, 0.0, 0.0) == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(eval_Z(make_scalar_sanity(), scalar(1.7), 0.3, 0.9) ==
          doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("eval_Z on the memory system vanishes at u=0 with empty history") {
    const SystemSpec s = make_memory_scalar([](double t) { return std::exp(-t); }, 5.0, 1e-3);
    CHECK(eval_Z(s, scalar(0.0), 0.1, 2.0) == doctest::Approx(0.0));
}

TEST_CASE("inadmissible density names the offending component") {
    const SystemSpec s = make_duct_gas(1.0, 2.0, constant_profile(1.0));
    CHECK_THROWS_WITH_AS(eval_R(s, state2(-1.0, 0.0), 0.0, 0.0),
                         doctest::Contains("density"), DomainError);
}

TEST_CASE("invert_A: identity map returns the target") {
    const SystemSpec s = make_scalar_sanity();
    CHECK(invert_A(s, scalar(3.0), 0.0, 0.0, scalar(0.0))[0] == doctest::Approx(3.0));
}

TEST_CASE("invert_A: componentwise weighted map divides by a(x)") {
    SystemSpec s = make_duct_gas(1.0, 2.0, constant_profile(1.0));
    // weighted variant A = a(x) U with a(0) = 2; used as an inversion case only
    s.A = [](const Vec& U, double x, double) { return Vec{(2.0 + std::sin(x)) * U}; };
    s.dA = [](const Vec&, double x, double) {
        return Mat{(2.0 + std::sin(x)) * Mat::Identity(2, 2)};
    };
    s.inadmissible = nullptr;
    const Vec U = invert_A(s, state2(4.0, 2.0), 0.0, 0.0, state2(1.0, 1.0));
    CHECK(U[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(U[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("invert_A: cubic map agrees with a bisection oracle") {
    const SystemSpec s = testsys::make_nonlinear_A();
    auto Afun = [](double u) { return u + u * u * u / 3.0; };

    for (double target : {2.0, 0.3, -1.1}) {
        const double expected = oracle::bisect([&](double u) { return Afun(u) - target; },
                                               -4.0, 4.0);
        const Vec U = invert_A(s, scalar(target), 0.0, 0.0, scalar(0.5));
        CHECK(U[0] == doctest::Approx(expected).epsilon(1e-10));
        CHECK(std::abs(Afun(U[0]) - target) <= 1e-12 * (1.0 + std::abs(target)));
    }
}

TEST_CASE("invert_A: out-of-range target reports the last iterate") {
    SystemSpec s = make_scalar_sanity();
    s.A = [](const Vec& U, double, double) {
        Vec v(1);
        v[0] = std::atan(U[0]);
        return v;
    };
    s.dA = [](const Vec& U, double, double) {
        return Mat{1.0 / (1.0 + U[0] * U[0]) * Mat::Identity(1, 1)};
    };
    CHECK_THROWS_AS((void)invert_A(s, scalar(10.0), 0.0, 0.0, scalar(0.0)), InversionError);
    try {
        (void)invert_A(s, scalar(10.0), 0.0, 0.0, scalar(0.0));
    } catch (const InversionError& e) {
        CHECK(e.residual > 1.0);
        CHECK(e.last_iterate.size() == 1);
    }
}

TEST_CASE("synthesized first and second derivatives hit the spec tolerances") {
    SystemSpec core;
    core.n = 1;
    core.d = 1;
    core.name = "synth_probe";
    core.A = [](const Vec& U, double x, double) { return Vec{std::exp(x) * U}; };
    core.f = {[](const Vec& U, double, double) {
        Vec v(1);
        v[0] = 0.5 * U[0] * U[0];
        return v;
    }};
    core.P = [](const Vec&, double, double) { return Vec::Zero(1); };
    core.eta = [](const Vec& U, double, double) { return 0.5 * U[0] * U[0]; };
    core.q = {[](const Vec& U, double, double) { return U[0] * U[0] * U[0] / 3.0; }};
    core.G = [](const Vec& U, double, double) { return U; };
    core.B = {{[](const Vec&, double, double) { return Mat::Identity(1, 1); }}};

    const SystemSpec s = synthesize_derivatives(core);
    CHECK(s.derivative_mode == DerivativeMode::Synthesized);

    CHECK(s.df[0](scalar(3.0), 0.0, 0.0)(0, 0) == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(s.hess_eta(scalar(1.0), 0.0, 0.0)(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(s.dA(scalar(1.0), 0.0, 0.0)(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(s.A_t(scalar(1.0), 0.0, 0.0)[0] == doctest::Approx(0.0).epsilon(1e-8));
    // explicit x-derivative of A = e^x u at x = 0, u = 1
    CHECK(s.d2A(scalar(0.7), 0.0, 0.0)[0](0, 0) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("analytic derivatives of every builtin match a finite-difference oracle") {
    std::vector<SystemSpec> specs;
    specs.push_back(make_scalar_sanity());
    specs.push_back(make_duct_gas(1.0, 2.0, sin_profile(2.0, 0.3)));
    specs.push_back(make_duct_gas(0.7, 1.4, sin_profile(2.0, 0.3)));
    specs.push_back(testsys::make_rich_inhomogeneous());
    specs.push_back(testsys::make_nonlinear_A());

    Rng rng(20240817);
    for (const SystemSpec& s : specs) {
        int checked = 0;
        while (checked < 1000) {
            Vec U(s.n);
            for (int i = 0; i < s.n; ++i) U[i] = rng.uniform(-0.9, 0.9);
            if (s.n == 2) U[0] = rng.uniform(0.5, 2.0);  // stay clear of vacuum
            if (s.inadmissible && !s.inadmissible(U).empty()) continue;
            const double x = rng.uniform(0.0, 6.28), t = rng.uniform(0.0, 1.0);
            ++checked;

            const Mat dA_o = oracle::jacobian(
                [&](const Vec& V) { return s.A(V, x, t); }, U);
            CHECK((s.dA(U, x, t) - dA_o).norm() <= 1e-6 * (1.0 + dA_o.norm()));

            const Mat df_o = oracle::jacobian(
                [&](const Vec& V) { return s.f[0](V, x, t); }, U);
            CHECK((s.df[0](U, x, t) - df_o).norm() <= 1e-6 * (1.0 + df_o.norm()));

            const Vec ge_o = oracle::gradient(
                [&](const Vec& V) { return s.eta(V, x, t); }, U);
            CHECK((s.grad_eta(U, x, t) - ge_o).norm() <= 1e-6 * (1.0 + ge_o.norm()));

            const Mat dG_o = oracle::jacobian(
                [&](const Vec& V) { return s.G(V, x, t); }, U);
            CHECK((s.dG(U, x, t) - dG_o).norm() <= 1e-6 * (1.0 + dG_o.norm()));

            const double qx_o = oracle::deriv(
                [&](double xx) { return s.q[0](U, xx, t); }, x);
            CHECK(s.q_x[0](U, x, t) == doctest::Approx(qx_o).epsilon(1e-6));

            const Mat hess_o = oracle::jacobian(
                [&](const Vec& V) { return s.grad_eta(V, x, t); }, U);
            CHECK((s.hess_eta(U, x, t) - hess_o).norm() <= 1e-6 * (1.0 + hess_o.norm()));

            // rank-3 blocks, contracted against a random direction
            Vec dir(s.n);
            for (int i = 0; i < s.n; ++i) dir[i] = rng.uniform(-1.0, 1.0);
            const Tensor3 d2G = s.d2G(U, x, t);
            const Mat d2G_dir_o = oracle::jacobian(
                [&](const Vec& V) -> Vec { return s.dG(V, x, t) * dir; }, U);
            for (int i = 0; i < s.n; ++i) {
                const Vec row = d2G[i].transpose() * dir;  // sum_k d2G[i](j,k) dir_k over j
                CHECK((row.transpose() - d2G_dir_o.row(i)).norm() <=
                      2e-5 * (1.0 + d2G_dir_o.norm()));
            }
        }
    }
}

TEST_CASE("invert_A composed with A is the identity on random samples") {
    std::vector<SystemSpec> specs;
    specs.push_back(make_scalar_sanity());
    specs.push_back(make_duct_gas(1.0, 2.0, sin_profile(2.0, 0.3)));
    specs.push_back(testsys::make_nonlinear_A());

    Rng rng(777);
    for (const SystemSpec& s : specs) {
        for (int k = 0; k < 200; ++k) {
            Vec U(s.n);
            for (int i = 0; i < s.n; ++i) U[i] = rng.uniform(-0.9, 0.9);
            if (s.n == 2) U[0] = rng.uniform(0.5, 2.0);
            const double x = rng.uniform(0.0, 6.28), t = rng.uniform(0.0, 1.0);
            const Vec V = s.A(U, x, t);
            const Vec back = invert_A(s, V, x, t, U * 0.9 + Vec::Constant(s.n, 0.01));
            CHECK((back - U).lpNorm<Eigen::Infinity>() <= 1e-10);
        }
    }
}

TEST_CASE("history buffer rejects stale or mismatched snapshots") {
    HistoryBuffer buf;
    buf.cells = 4;
    std::vector<Vec> snap(4, Vec::Zero(1));
    buf.append(0.0, snap);
    buf.append(0.5, snap);
    CHECK(buf.covers(0.4));
    CHECK(!buf.covers(0.6));
    CHECK_THROWS_AS(buf.append(0.5, snap), HistoryGapError);
    std::vector<Vec> bad(3, Vec::Zero(1));
    CHECK_THROWS_AS(buf.append(1.0, bad), HistoryGapError);
}
