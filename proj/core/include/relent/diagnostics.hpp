#pragma once

#include <array>
#include <vector>

#include "relent/solver.hpp"

namespace relent {

/// Midpoint-rule integral of eta over the torus.
double total_entropy(const SystemSpec& spec, const Field& field);

/// Midpoint-rule integral of eta(U|Ubar); fields must share the grid.
double rel_entropy_total(const SystemSpec& spec, const Field& U, const Field& Ubar);

/// Integral of the dissipation form D = dG dx(U-Ubar) . B dx(U-Ubar)
/// (gradients by central differences). Nonnegative whenever HP1 holds.
double D_total(const SystemSpec& spec, const Field& U, const Field& Ubar);

/// The nine quadratic error terms of the viscous relative entropy identity
/// at one point. lapUbar is the second x-derivative of the reference state,
/// needed by the product rule inside Q1.
std::array<double, 9> Q_terms(const SystemSpec& spec, const Vec& U, const Vec& Ubar,
                              const Vec& gradU, const Vec& gradUbar, const Vec& lapUbar,
                              double x, double t);

/// Per-snapshot discrete evaluation of every term in the relative entropy
/// identity. The residual collects LHS - RHS and converges at second order
/// for smooth viscous twin runs.
struct IdentityLedgerRow {
    double time = 0.0;
    double dEdt = 0.0;         ///< centered-difference d/dt of int eta(U|Ubar)
    double source_diff = 0.0;  ///< int (G-Gbar).(R-Rbar)
    double flux_rel = 0.0;     ///< int dGbar dxUbar . f(U|Ubar)
    double mult_rel = 0.0;     ///< int Rbar . G(U|Ubar)
    double inhom = 0.0;        ///< int [ (eta_t+q_x - bar) - Gbar.(A_t+f_x - bar) - Gbar_t.(A-Abar) - Gbar_x.(f-fbar) ]
    double epsD = 0.0;         ///< eps int D
    std::array<double, 9> epsQ{};  ///< eps int Q_i
    double epsQ_total = 0.0;
    double j_divergence = 0.0;     ///< torus integral of the discrete divergence of j (records ~0)
    double residual = 0.0;         ///< dEdt + source_diff + epsD + flux_rel + mult_rel - inhom - epsQ_total
};

/// Assembles the ledger over matching snapshots of two trajectories on the
/// same grid; end snapshots are skipped (centered time differences).
std::vector<IdentityLedgerRow> identity_ledger(const SystemSpec& spec, const Trajectory& U,
                                               const Trajectory& Ubar, double epsilon);

struct GronwallFit {
    double rate = 0.0;     ///< fitted envelope exponent
    double initial = 0.0;  ///< series[0]
    bool violation = false;
    double tol = 0.05;
};

/// Fits log(series) against time on the increasing envelope (anchored at the
/// first sample) and flags samples exceeding series[0]*exp(rate*t)*(1+tol)
/// beyond an absolute floor. Needs at least 10 snapshots.
GronwallFit gronwall_fit(const std::vector<double>& series, const std::vector<double>& times,
                         double tol = 0.05, double abs_floor = 1e-12);

}  // namespace relent
