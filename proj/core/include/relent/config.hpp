#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relent/experiments.hpp"

namespace relent {

struct SystemConfig {
    std::string kind = "scalar_sanity";  // scalar_sanity | duct_gas | memory_scalar | selfsimilar
    double kappa = 1.0;
    double gamma = 2.0;
    std::string a_preset = "sin";  // constant | sin
    double a_base = 2.0;
    double a_amplitude = 0.3;
    double rho_min = 1e-8;
    std::string kernel_preset = "exp";
    double kernel_rate = 1.0;
    double kernel_T = 10.0;
    double kernel_dt = 1e-3;
    std::string base_kind = "scalar_sanity";  // selfsimilar wrapped system
};

struct SolverBlock {
    int N = 128;
    double L = 6.283185307179586;
    double cfl = 0.4;
    std::string scheme = "central";
    std::string integrator = "ssp-rk2";
    double t_end = 0.5;
    int snapshots = 17;
    double newton_tol = 1e-12;
    int newton_iters = 50;
    double epsilon = 0.0;
    InitialData initial;
};

struct ExperimentBlock {
    std::vector<double> epsilons;
    std::vector<int> grids = {64, 128, 256};
    double delta = 1e-3;
    double t_end = 0.5;
    int snapshots = 33;
    double ratio_cap = 2.0;
    double gronwall_tol = 0.05;
    double slope_lo = 0.8, slope_hi = 1.2;
    double plateau_tol = 0.10;
    double mismatch = 0.0;
    int grid_budget = 4096;
    double saturation_tol = 0.05;
    double order_min = 1.7;
    double ws_order_min = 0.8;
    double shock_gradient_factor = 50.0;
    // audit sampling
    int samples = 10000;
    std::optional<std::vector<std::array<double, 2>>> state_box;
    double M = 2.0;
    double U_max = 40.0;
    int shells = 4;
    int pair_samples = 512;
    int xt_points = 8;
    double T = 1.0;
    int hp2_directions = 64;
    double growth_p = 2.0;
    std::vector<std::string> required = {"H1", "H2", "H3", "HB"};
};

struct ToleranceOverrides {
    double h1_min_det = 1e-8;
    double h2_residual = 1e-8;
    double uniformity_spread_cap = 10.0;
};

struct RunConfig {
    std::string version = "1";
    std::string command;  // optional in the file; the CLI argument wins
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    SystemConfig system;
    SolverBlock solver;
    ExperimentBlock experiment;
    ToleranceOverrides tolerances;
    std::string echo_json;  // canonical echo of the validated config
};

/// Parses and validates a JSON config. Unknown keys are rejected; error
/// messages cite the JSON path of the offending key.
RunConfig parse_config(const std::string& text);

/// Canonical JSON for a RunConfig (the round-trip image of parse_config).
std::string serialize_config(const RunConfig& config);

/// Applies one `--set key.path=value` override onto raw JSON text.
std::string apply_override(const std::string& text, const std::string& assignment);

/// Builds the system named by the config. Memory systems get fresh state.
SystemSpec build_system(const SystemConfig& config);

/// Runs the command named in the config, emitting report.json / CSVs / plot
/// scripts into out_dir. Exit status: 0 pass, 1 fail, 2 inconclusive,
/// 3 runtime error. Writes a report whenever computation started.
int dispatch(const RunConfig& config);

}  // namespace relent
