#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "relent/builtins.hpp"
#include "relent/experiments.hpp"
#include "relent/report_io.hpp"
#include "test_systems.hpp"

using namespace relent;

namespace {

ExperimentConfig scalar_config() {
    ExperimentConfig c;
    c.system = make_scalar_sanity();
    c.grids = {48};
    c.epsilons = {1e-2, 3e-2};
    c.t_end = 0.25;
    c.snapshots = 15;
    c.initial.preset = "sine";
    c.initial.base = {0.8};
    c.initial.amplitude = {0.15};
    c.delta = 1e-3;
    return c;
}

ManufacturedTarget scalar_wave(double base, double amp) {
    ManufacturedTarget t;
    t.value = [=](double x, double s) { return Vec::Constant(1, base + amp * std::sin(x - s)); };
    t.ddt = [=](double x, double s) { return Vec::Constant(1, -amp * std::cos(x - s)); };
    t.ddx = [=](double x, double s) { return Vec::Constant(1, amp * std::cos(x - s)); };
    t.ddxx = [=](double x, double s) { return Vec::Constant(1, -amp * std::sin(x - s)); };
    return t;
}

}  // namespace

TEST_CASE("stability: scalar twin runs stay inside the Gronwall envelope") {
    const ExperimentReport rep = run_stability(scalar_config());
    CHECK(rep.verdict == "pass");
    CHECK(rep.metrics.at("S_ratio") <= 2.0);
    CHECK(rep.metrics.at("S_max") < 10.0);
    REQUIRE(rep.series.size() == 2);
    CHECK(rep.series[0].columns.size() == 4);
    CHECK(!rep.series[0].rows.empty());
}

TEST_CASE("stability: delta = 0 degenerates gracefully") {
    ExperimentConfig c = scalar_config();
    c.delta = 0.0;
    const ExperimentReport rep = run_stability(c);
    CHECK(rep.verdict == "degenerate");
}

TEST_CASE("convergence: fewer than three viscosities is a config error") {
    ExperimentConfig c = scalar_config();
    c.epsilons = {1e-2};
    c.has_target = true;
    c.target = scalar_wave(1.0, 0.1);
    CHECK_THROWS_AS((void)run_convergence(c), ConfigError);
}

TEST_CASE("convergence: equal viscosities route to inconclusive") {
    ExperimentConfig c = scalar_config();
    c.epsilons = {1e-2, 1e-2, 1e-2};
    c.grids = {32};
    c.grid_budget = 64;
    c.has_target = true;
    c.target = scalar_wave(1.0, 0.1);
    const ExperimentReport rep = run_convergence(c);
    CHECK(rep.verdict == "inconclusive");
}

TEST_CASE("convergence: mismatched data plateaus at the initial relative entropy") {
    ExperimentConfig c = scalar_config();
    c.epsilons = {4e-3, 2e-3, 1e-3};
    c.grids = {64};
    c.grid_budget = 256;
    c.t_end = 0.25;
    c.mismatch = 0.05;
    c.has_target = true;
    c.target = scalar_wave(1.0, 0.1);
    const ExperimentReport rep = run_convergence(c);
    CHECK(rep.verdict == "pass");
    CHECK(rep.metrics.at("plateau_ok") == 1.0);
}

TEST_CASE("weak-strong: refinement against the 4x reference shrinks the gap") {
    ExperimentConfig c = scalar_config();
    c.grids = {32, 64};
    c.t_end = 0.2;
    c.snapshots = 11;
    const ExperimentReport rep = run_weak_strong(c);
    CHECK(rep.verdict == "pass");
    CHECK(rep.metrics.at("order") >= 0.8);
    const double m32 = rep.metrics.at("sup[32]");
    const double m64 = rep.metrics.at("sup[64]");
    CHECK(m64 < m32);
}

TEST_CASE("identity: residual order on a coarse pair of grids") {
    ExperimentConfig c = scalar_config();
    c.grids = {48, 96};
    c.epsilons = {1e-2};
    c.t_end = 0.25;
    c.snapshots = 13;
    const ExperimentReport rep = run_identity_check(c);
    CHECK(rep.verdict == "pass");
    CHECK(rep.metrics.at("order") >= 1.5);
    CHECK(rep.metrics.at("min_epsD") >= -1e-12);
    CHECK(rep.metrics.at("max_absQ789") <= 1e-13);
}

TEST_CASE("identity: the anti-dissipative toy is flagged") {
    ExperimentConfig c = scalar_config();
    c.system = testsys::make_negative_B();
    c.system_factory = nullptr;
    c.grids = {48, 96};
    c.epsilons = {1e-2};
    c.t_end = 0.1;
    c.snapshots = 13;
    const ExperimentReport rep = run_identity_check(c);
    CHECK(rep.metrics.at("min_epsD") < 0.0);
    CHECK(rep.verdict == "fail");
}

TEST_CASE("identity: memory systems are rejected up front") {
    ExperimentConfig c = scalar_config();
    c.system_factory = [] {
        return make_memory_scalar([](double t) { return std::exp(-t); }, 1.0, 1e-3);
    };
    c.system = c.system_factory();
    CHECK_THROWS_AS((void)run_identity_check(c), Error);
}

TEST_CASE("hypothesis audit wrapper aggregates over the required list") {
    ExperimentConfig c = scalar_config();
    c.system = make_duct_gas(1.0, 2.0, sin_profile(2.0, 0.3));
    c.system_factory = nullptr;
    c.cloud.state_samples = 1000;
    c.cloud.state_box = std::vector<std::array<double, 2>>{{0.5, 2.0}, {-2.0, 2.0}};
    c.cloud.M = 2.0;
    c.cloud.pair_samples = 300;
    c.cloud.seed = 4;
    const ExperimentReport rep = run_hypothesis_audit(c);
    CHECK(rep.verdict == "pass");
    CHECK(!rep.hypothesis_records.empty());
    CHECK(rep.metrics.count("lemma_c1") == 1);

    // demanding the dissipative source for the duct system must fail
    ExperimentConfig hard = c;
    hard.required_hypotheses = {"H1", "H2", "H3", "HR2"};
    CHECK(run_hypothesis_audit(hard).verdict == "fail");
}

TEST_CASE("hypothesis audit flags the concave-entropy toy") {
    ExperimentConfig c = scalar_config();
    c.system = testsys::make_negated_entropy();
    c.system_factory = nullptr;
    c.cloud.state_samples = 200;
    c.cloud.M = 1.0;
    c.cloud.U_max = 5.0;
    c.cloud.shells = 2;
    c.cloud.pair_samples = 100;
    const ExperimentReport rep = run_hypothesis_audit(c);
    CHECK(rep.verdict == "fail");
}

TEST_CASE("experiments are deterministic: byte-identical report bodies") {
    const std::string a = report_body_json(run_stability(scalar_config()), "{}");
    const std::string b = report_body_json(run_stability(scalar_config()), "{}");
    CHECK(a == b);
    CHECK(fnv1a_hex(a) == fnv1a_hex(b));
}

TEST_CASE("stability ratio S grows with the time horizon") {
    ExperimentConfig shorter = scalar_config();
    shorter.epsilons = {1e-2};
    shorter.t_end = 0.15;
    ExperimentConfig longer = shorter;
    longer.t_end = 0.3;
    const double s_short = run_stability(shorter).metrics.at("S_max");
    const double s_long = run_stability(longer).metrics.at("S_max");
    CHECK(s_long >= s_short - 1e-12);  // sup over a larger window
}
