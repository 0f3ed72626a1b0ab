#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "relent/builtins.hpp"
#include "relent/relative.hpp"
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

std::vector<SystemSpec> pointwise_specs() {
    std::vector<SystemSpec> specs;
    specs.push_back(make_scalar_sanity());
    specs.push_back(make_duct_gas(1.0, 2.0, sin_profile(2.0, 0.3)));
    specs.push_back(make_memory_scalar([](double t) { return std::exp(-t); }, 2.0, 1e-3));
    specs.push_back(make_selfsimilar(make_scalar_sanity(), identity_btilde(1)));
    specs.push_back(testsys::make_rich_inhomogeneous());
    specs.push_back(testsys::make_nonlinear_A());
    return specs;
}

Vec random_state(const SystemSpec& s, Rng& rng) {
    Vec U(s.n);
    for (int i = 0; i < s.n; ++i) U[i] = rng.uniform(-0.8, 0.8);
    if (s.n == 2) U[0] = rng.uniform(0.5, 2.0);
    return U;
}
}  // namespace

TEST_CASE("every relative quantity vanishes at coinciding states") {
    Rng rng(31);
    for (const SystemSpec& s : pointwise_specs()) {
        for (int k = 0; k < 50; ++k) {
            const Vec U = random_state(s, rng);
            const double x = rng.uniform(0.0, 6.28), t = rng.uniform(0.0, 1.0);
            const RelativeQuantities rq = relative_quantities(s, U, U, x, t);
            CHECK(std::abs(rq.rel_eta) <= 1e-14);
            CHECK(std::abs(rq.rel_q[0]) <= 1e-14);
            CHECK(rq.rel_f[0].norm() <= 1e-14);
            CHECK(rq.rel_G.norm() <= 1e-14);
            CHECK(rq.phi.norm() <= 1e-14);
            CHECK(rq.G1.norm() <= 1e-14);
            CHECK(rq.G2[0].norm() <= 1e-14);
        }
    }
}

TEST_CASE("scalar baseline relative quantities in closed form") {
    const SystemSpec s = make_scalar_sanity();
    CHECK(rel_entropy(s, scalar(2.0), scalar(1.0), 0, 0) == doctest::Approx(0.5));
    CHECK(rel_entropy_flux(s, scalar(2.0), scalar(1.0), 0, 0)[0] ==
          doctest::Approx(5.0 / 6.0));
    CHECK(rel_flux(s, scalar(2.0), scalar(1.0), 0, 0)[0][0] == doctest::Approx(0.5));
    CHECK(rel_multiplier(s, scalar(2.0), scalar(1.0), 0, 0).norm() ==
          doctest::Approx(0.0));
}

TEST_CASE("duct gas relative entropy and flux at zero momentum") {
    const SystemSpec s = make_duct_gas(1.0, 2.0, sin_profile(2.0, 0.3));
    CHECK(rel_entropy(s, state2(2.0, 0.0), state2(1.0, 0.0), 0.2, 0.0) ==
          doctest::Approx(1.0).epsilon(1e-13));
    // q and G(Ubar).(f - fbar) both vanish at m = mbar = 0
    CHECK(rel_entropy_flux(s, state2(2.0, 0.0), state2(1.5, 0.0), 0.2, 0.0)[0] ==
          doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("duct gas relative multiplier against a finite-difference expansion oracle") {
    const SystemSpec s = make_duct_gas(1.0, 2.0, sin_profile(2.0, 0.3));
    Rng rng(99);
    for (int k = 0; k < 50; ++k) {
        const Vec U = state2(rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0));
        const Vec Ub = state2(rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0));
        const double x = rng.uniform(0.0, 6.28);

        const Mat dG_o = oracle::jacobian(
            [&](const Vec& V) { return s.G(V, x, 0.0); }, Ub);
        const Vec expected =
            s.G(U, x, 0.0) - s.G(Ub, x, 0.0) - dG_o * (s.A(U, x, 0.0) - s.A(Ub, x, 0.0));
        const Vec got = rel_multiplier(s, U, Ub, x, 0.0);
        CHECK((got - expected).norm() <= 1e-6 * (1.0 + expected.norm()));
    }
    // frozen case from the gamma = 2 algebra: quadratic h means zero remainder at m = 0
    const Vec g = rel_multiplier(s, state2(2.0, 0.0), state2(1.0, 0.0), 0.0, 0.0);
    CHECK(g.norm() <= 1e-13);
}

TEST_CASE("phi vanishes identically when A is the identity") {
    const SystemSpec s = make_duct_gas(1.0, 2.0, sin_profile(2.0, 0.3));
    Vec phi;
    Mat G1;
    std::vector<Vec> G2;
    rel_remainders(s, state2(1.7, 0.4), state2(0.9, -0.2), 0.3, 0.1, phi, G1, G2);
    CHECK(phi.norm() <= 1e-15);
    CHECK(G2[0].norm() <= 1e-15);  // G carries no explicit x
}

TEST_CASE("quadratic scaling of the relative entropy via Richardson extrapolation") {
    Rng rng(2024);
    for (const SystemSpec& s : pointwise_specs()) {
        for (int rep = 0; rep < 5; ++rep) {
            const Vec Ub = random_state(s, rng);
            Vec dir(s.n);
            for (int i = 0; i < s.n; ++i) dir[i] = rng.normal();
            dir.normalize();
            const double x = rng.uniform(0.0, 6.28), t = rng.uniform(0.0, 1.0);

            Mat H = s.hess_eta(Ub, x, t);
            const Vec G = s.G(Ub, x, t);
            const Tensor3 d2A = s.d2A(Ub, x, t);
            for (int i = 0; i < s.n; ++i) H -= G[i] * d2A[i];
            const double quad = 0.5 * dir.dot(H * dir);

            const double svals[3] = {1e-2, 5e-3, 2.5e-3};
            double E[3];
            for (int i = 0; i < 3; ++i)
                E[i] = rel_entropy(s, Ub + svals[i] * dir, Ub, x, t) / (svals[i] * svals[i]);
            const double w1 = 2.0 * E[1] - E[0];
            const double w2 = 2.0 * E[2] - E[1];
            const double extrapolated = (4.0 * w2 - w1) / 3.0;
            CHECK(extrapolated == doctest::Approx(quad).epsilon(1e-4));
        }
    }
}

TEST_CASE("relative flux, multiplier and remainders are quadratically small") {
    Rng rng(17);
    for (const SystemSpec& s : pointwise_specs()) {
        const Vec Ub = random_state(s, rng);
        Vec dir(s.n);
        for (int i = 0; i < s.n; ++i) dir[i] = rng.normal();
        dir.normalize();
        const double x = 0.77, t = 0.21;

        std::vector<double> logs_s;
        std::vector<double> logf, logg, logphi, logg1, logg2;
        for (double sc : {4e-2, 2e-2, 1e-2, 5e-3}) {
            const Vec U = Ub + sc * dir;
            const RelativeQuantities rq = relative_quantities(s, U, Ub, x, t);
            logs_s.push_back(std::log(sc));
            logf.push_back(std::log(std::max(rq.rel_f[0].norm(), 1e-300)));
            logg.push_back(std::log(std::max(rq.rel_G.norm(), 1e-300)));
            logphi.push_back(std::log(std::max(rq.phi.norm(), 1e-300)));
            logg1.push_back(std::log(std::max(rq.G1.norm(), 1e-300)));
            logg2.push_back(std::log(std::max(rq.G2[0].norm(), 1e-300)));
        }
        auto check_quadratic = [&](const std::vector<double>& logv) {
            if (logv.back() < std::log(1e-250)) return;  // identically zero path
            const double slope = oracle::ls_slope(logs_s, logv);
            CHECK(slope == doctest::Approx(2.0).epsilon(0.1));
        };
        check_quadratic(logf);
        check_quadratic(logg);
        check_quadratic(logphi);
        check_quadratic(logg1);
        check_quadratic(logg2);
    }
}

TEST_CASE("relative entropy agrees with the conserved-variable route") {
    // eta~(V) = eta(A^{-1}(V)) evaluated through Newton inversion; the two
    // routes must coincide to solver precision on analytic systems.
    Rng rng(4);
    for (const SystemSpec& s : pointwise_specs()) {
        for (int k = 0; k < 20; ++k) {
            const Vec U = random_state(s, rng);
            const Vec Ub = random_state(s, rng);
            const double x = rng.uniform(0.0, 6.28), t = rng.uniform(0.0, 1.0);

            const Vec V = s.A(U, x, t);
            const Vec Vb = s.A(Ub, x, t);
            auto eta_tilde = [&](const Vec& vv, const Vec& guess) {
                return s.eta(invert_A(s, vv, x, t, guess), x, t);
            };
            const Vec Ub_back = invert_A(s, Vb, x, t, Ub);
            const double via_V =
                eta_tilde(V, U) - eta_tilde(Vb, Ub) - s.G(Ub_back, x, t).dot(V - Vb);
            CHECK(rel_entropy(s, U, Ub, x, t) == doctest::Approx(via_V).epsilon(1e-10));
        }
    }
}

TEST_CASE("lemma audit: exact constant for the scalar baseline") {
    const SystemSpec s = make_scalar_sanity();
    StateSampler sampler(1, s.inadmissible, 11);
    LemmaAuditConfig cfg;
    cfg.M = 1.0;
    cfg.U_max = 20.0;
    cfg.shells = 5;
    cfg.samples_per_shell = 200;
    cfg.ball_samples = 200;
    const LemmaAuditReport rep = lemma_bounds_audit(s, sampler, cfg);
    // eta(u|ubar) = (u-ubar)^2/2 exactly, so the near-field ratios are 1/2
    CHECK(rep.c1 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rep.c1p == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rep.equiv_upper == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rep.c3 > 0.0);
    CHECK(rep.violations.empty());
    CHECK(rep.r1 >= cfg.M);
}

TEST_CASE("lemma audit: duct gas has finite flux-vs-entropy ratio out to |U| = 50") {
    const SystemSpec s = make_duct_gas(1.0, 2.0, sin_profile(2.0, 0.3), 1e-3);
    StateSampler sampler(2, s.inadmissible, 12);
    LemmaAuditConfig cfg;
    cfg.M = 2.0;
    cfg.U_max = 50.0;
    cfg.shells = 6;
    cfg.samples_per_shell = 300;
    cfg.ball_samples = 300;
    const LemmaAuditReport rep = lemma_bounds_audit(s, sampler, cfg);
    CHECK(std::isfinite(rep.c3));
    CHECK(rep.c3 > 0.0);
    CHECK(rep.c1 > 0.0);
    CHECK(rep.c2 > 0.0);
    CHECK(rep.c2p > 0.0);
    CHECK(rep.sample_count > 1000);
}

TEST_CASE("lemma audit flags a concave entropy as a convexity violation") {
    const SystemSpec s = testsys::make_negated_entropy();
    StateSampler sampler(1, s.inadmissible, 13);
    LemmaAuditConfig cfg;
    cfg.M = 1.0;
    cfg.U_max = 4.0;
    cfg.shells = 2;
    cfg.samples_per_shell = 50;
    cfg.ball_samples = 50;
    CHECK_THROWS_AS((void)lemma_bounds_audit(s, sampler, cfg), ConvexityViolation);
}
