#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "relent/grid.hpp"
#include "relent/system.hpp"

namespace relent {

enum class Scheme { Central, LocalLaxFriedrichs };
enum class Integrator { SspRk2, Rk4 };

struct SolverConfig {
    double epsilon = 0.0;
    double cfl = 0.4;
    Scheme scheme = Scheme::Central;       // central needs eps > 0 or a smooth manufactured regime
    Integrator integrator = Integrator::SspRk2;
    double t_end = 1.0;
    int snapshots = 17;
    double newton_tol = 1e-12;
    int newton_iters = 50;
    double max_dt_fraction = 1.0 / 16.0;   // dt cap when neither wave speed nor viscosity binds
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Field> fields;
    std::vector<double> dt_log;

    struct Failure {
        double time = 0.0;
        std::string what;
    };
    std::optional<Failure> failure;

    bool ok() const { return !failure.has_value(); }
};

/// Semidiscrete right-hand side for dV/dt with V_i = A(U_i, x_i, t):
/// flux divergence (second-order central or local Lax-Friedrichs with
/// per-interface speed max |eig(dA^{-1} df)|), minus the source, plus the
/// conservative viscous stencil with arithmetic-mean interface B evaluated
/// at the interface midpoint.
std::vector<Vec> semidiscrete_rhs(const SystemSpec& spec, const Field& field, double epsilon,
                                  Scheme scheme);

/// cfl * min( dx/lambda_max, dx^2/(2 eps beta_max + tiny) ), capped by
/// t_end*max_dt_fraction when neither bound binds. lambda_max is the largest
/// cell spectral radius of dA^{-1} df, beta_max the largest spectral norm of
/// dA^{-1} B.
double stable_dt(const SystemSpec& spec, const Field& field, double epsilon,
                 const SolverConfig& config);

/// One explicit step of the chosen integrator on V = A(U,x,t), followed by
/// per-cell Newton recovery of U at the new time. Appends to the history
/// buffer of fading-memory systems after acceptance.
Field time_step(const SystemSpec& spec, const Field& field, double dt, const SolverConfig& config);

/// Method-of-lines run to t_end with snapshots at uniform cadence. Step
/// errors abort with a partial trajectory and a failure record.
Trajectory solve(const SystemSpec& spec, const Field& initial, const SolverConfig& config,
                 const std::function<void(const Field&)>& on_snapshot = {});

/// Smooth periodic target with the derivatives the forcing construction needs.
struct ManufacturedTarget {
    std::function<Vec(double, double)> value;
    std::function<Vec(double, double)> ddt;
    std::function<Vec(double, double)> ddx;
    std::function<Vec(double, double)> ddxx;
};

Field sample_target(const Grid1D& grid, const ManufacturedTarget& target, double t);

/// Returns the spec with P replaced by P - F, where F is the residual of the
/// target in the epsilon-viscous equation, so the target becomes an exact
/// solution.
SystemSpec manufactured_forcing(const SystemSpec& spec, const ManufacturedTarget& target,
                                double epsilon);

/// Initial-data presets used by configs: constant, sine, gaussian-bump,
/// two-state-smooth.
struct InitialData {
    std::string preset = "constant";
    std::vector<double> base;        // per component
    std::vector<double> amplitude;   // per component
    double wavenumber = 1.0;
    double phase = 0.0;
    double center = 0.0;   // gaussian bump / transition location
    double width = 0.0;    // bump width or transition sharpness
};
Field make_initial(const Grid1D& grid, int n, const InitialData& data);

}  // namespace relent
