#pragma once

#include <memory>

#include "relent/system.hpp"

namespace relent {

/// Smooth positive periodic duct profile a(x) with its derivative.
struct DuctProfile {
    std::function<double(double)> a;
    std::function<double(double)> da;
};

DuctProfile constant_profile(double value);
DuctProfile sin_profile(double base, double amplitude);  // a(x) = base + amplitude*sin(x)

/// Homogeneous scalar baseline: A=u, f=u^2/2, P=0, eta=u^2/2, q=u^3/3, G=u, B=1.
SystemSpec make_scalar_sanity();

/// Isentropic duct flow in the rewritten source form: U=(rho,m), A=U,
/// f=(m, m^2/rho + kappa*rho^gamma), P=(a'/a)(m, m^2/rho), with the standard
/// gas-dynamics entropy pair and G = grad eta. States with rho < rho_min are
/// inadmissible (error, not clamp).
SystemSpec make_duct_gas(double kappa, double gamma, DuctProfile profile, double rho_min = 1e-8);

/// Solves r + k*r = k on stamps 0, dt, ..., T by trapezoidal quadrature of
/// the convolution; also returns r' by second-order finite differences.
struct ResolventTable {
    double dt = 0.0;
    std::vector<double> t;
    std::vector<double> r;
    std::vector<double> rprime;

    double eval_r(double s) const;       // linear interpolation
    double eval_rprime(double s) const;  // linear interpolation
};
ResolventTable resolvent_kernel(const std::vector<double>& k_samples, double dt);

/// Mutable side of a fading-memory system: the history buffer plus the
/// per-cell frozen history integral the source closure reads. The time loop
/// freezes at the start of each step and appends after acceptance.
struct MemoryState {
    ResolventTable resolvent;
    HistoryBuffer history;

    double domain_length = 0.0;  // needed to map x to a cell
    std::vector<double> frozen;  // per-cell int_0^t r'(t-tau) u(x,tau) dtau
    double frozen_time = 0.0;

    /// Recomputes `frozen` at time t from the history buffer (trapezoid over
    /// the recorded stamps). Throws HistoryGapError if the buffer does not
    /// cover [0, t].
    void freeze(double t);

    /// History term at position x; 0 when no history has been recorded.
    double history_term(double x) const;
};

/// Scalar fading-memory law in resolvent form. The source is
///   P(u,x,t) = r(0) u - r(t) u + int_0^t r'(t-tau) u(x,tau) dtau
/// with the integral frozen per time step, so P keeps the (U,x,t) signature.
/// Entropy pair of the homogeneous flux u^2/2 (eta=u^2/2, q=u^3/3, G=u).
/// Each run needs its own instance: the memory state is per-trajectory.
SystemSpec make_memory_scalar(std::function<double(double)> kernel, double T, double dt);

/// State-dependent viscosity factor for the self-similar wrapper.
struct BtildeSpec {
    std::vector<std::vector<MatFn>> B;       // Btilde[a][b](U, x, t); built-ins ignore x,t
    std::vector<std::vector<Tensor3Fn>> dB;
};
BtildeSpec identity_btilde(int n, int d = 1);

/// Replaces the viscosity with B_ab(U,x,t) = t * Btilde_ab(U); dB and B_x
/// scale the same way.
SystemSpec make_selfsimilar(SystemSpec spec, BtildeSpec btilde);

}  // namespace relent
