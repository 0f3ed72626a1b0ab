#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "relent/diagnostics.hpp"
#include "relent/hypotheses.hpp"
#include "relent/solver.hpp"

namespace relent {

/// Tabular payload destined for one CSV file.
struct Series {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Declarative figure; the emitter turns it into a plot script.
struct Figure {
    std::string name;
    std::string series;  // Series::name it reads
    std::string xcol;
    std::vector<std::string> ycols;
    bool loglog = false;
    std::string groupby;   // optional column splitting the series into curves
    bool scatter = false;  // point cloud instead of connected lines
};

struct ExperimentReport {
    std::string kind;
    std::string verdict;  // pass | fail | inconclusive | degenerate | error
    std::map<std::string, double> metrics;
    std::vector<std::string> notes;
    std::vector<Series> series;
    std::vector<Figure> figures;
    std::vector<HypothesisRecord> hypothesis_records;  // audit runs only
};

struct ExperimentConfig {
    SystemSpec system;                 // pre-built system (fresh per run for memory systems)
    std::function<SystemSpec()> system_factory;  // rebuilds the system when runs must not share state

    std::vector<double> epsilons;
    std::vector<int> grids;
    double L = 6.283185307179586;
    double t_end = 0.5;
    int snapshots = 33;
    double cfl = 0.4;
    Integrator integrator = Integrator::SspRk2;

    InitialData initial;
    double delta = 1e-3;  ///< twin-run perturbation amplitude

    double ratio_cap = 2.0;          ///< stability: max S / min S
    double gronwall_tol = 0.05;
    double slope_lo = 0.8, slope_hi = 1.2;  ///< convergence slope window
    double plateau_tol = 0.10;
    double mismatch = 0.0;           ///< convergence: constant initial-data offset
    int grid_budget = 4096;          ///< convergence: N cap for grid saturation
    double saturation_tol = 0.05;
    double order_min = 1.7;          ///< identity: residual convergence order
    double ws_order_min = 0.8;       ///< weak-strong refinement order
    double shock_gradient_factor = 50.0;

    ManufacturedTarget target;       ///< convergence / manufactured runs
    bool has_target = false;

    CloudConfig cloud;
    AuditConfig audit;
    std::vector<std::string> required_hypotheses = {"H1", "H2", "H3", "HB"};

    std::uint64_t seed = 0;
};

/// Twin viscous runs per epsilon; S(eps) = sup_t ||U-Ubar|| / ||U0-Ubar0||.
/// Pass iff every S is finite, max/min S <= ratio_cap, and each relative
/// entropy series stays inside its fitted Gronwall envelope.
ExperimentReport run_stability(const ExperimentConfig& config);

/// Viscous runs against a manufactured inviscid solution with matched data;
/// fits the log-log slope of sup_t int eta(U^eps | target) against eps on a
/// saturation-chosen grid. With config.mismatch != 0 instead checks the
/// plateau at the initial relative entropy.
ExperimentReport run_convergence(const ExperimentConfig& config);

/// eps = 0 Lax-Friedrichs runs against a 4x-resolution reference with equal
/// data; sup_t int eta(U|Ubar) must shrink with N at order >= ws_order_min.
ExperimentReport run_weak_strong(const ExperimentConfig& config);

/// Identity-ledger residuals over a refinement sweep; fits the convergence
/// order and checks the sign structure of eps int D.
ExperimentReport run_identity_check(const ExperimentConfig& config);

/// Wraps audit_sampled; aggregate verdict requires every hypothesis named in
/// required_hypotheses to pass, everything else is informational.
ExperimentReport run_hypothesis_audit(const ExperimentConfig& config);

}  // namespace relent
