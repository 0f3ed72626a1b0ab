#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "relent/types.hpp"

namespace relent {

enum class DerivativeMode { Analytic, Synthesized };

struct MemoryState;

/// Bundle of constitutive closures for one balance-law system
///
///     d/dt A(U,x,t) + d/dx f_a(U,x,t) + P(U,x,t) = eps d/dx (B_ab(U,x,t) d/dx U)
///
/// together with an entropy pair (eta, q_a), multiplier G and all the state /
/// space / time derivatives the pointwise algebra needs. Every closure is a
/// pure total function on the admissible region; specs may be shared
/// read-only across threads.
struct SystemSpec {
    int n = 0;  ///< state dimension
    int d = 1;  ///< number of flux directions (the reference solver uses 1)
    std::string name;
    DerivativeMode derivative_mode = DerivativeMode::Analytic;

    /// Empty string when U is admissible, else a message naming the
    /// offending component. Null means everything is admissible.
    std::function<std::string(const Vec&)> inadmissible;

    VecFn A;         ///< conserved-variable map
    MatFn dA;        ///< dA(i,j) = dA_i/dU_j
    Tensor3Fn d2A;   ///< d2A[i](j,k) = d^2 A_i / dU_j dU_k
    VecFn A_t;       ///< explicit t-derivative

    std::vector<VecFn> f;    ///< fluxes, one per direction
    std::vector<MatFn> df;
    std::vector<VecFn> f_x;  ///< explicit x_a-derivative of f_a

    VecFn P;  ///< source

    ScalarFn eta;
    VecFn grad_eta;
    MatFn hess_eta;
    ScalarFn eta_t;

    std::vector<ScalarFn> q;    ///< entropy fluxes
    std::vector<ScalarFn> q_x;  ///< explicit x_a-derivative of q_a

    VecFn G;                     ///< multiplier
    MatFn dG;                    ///< dG(i,j) = dG_i/dU_j
    Tensor3Fn d2G;
    VecFn G_t;
    std::vector<VecFn> G_x;      ///< explicit x_a-derivative of G
    std::vector<MatFn> dG_x;     ///< state gradient of G_x[a]

    std::vector<std::vector<MatFn>> B;       ///< viscosity matrices B[a][b]
    std::vector<std::vector<Tensor3Fn>> dB;  ///< dB[a][b] as [k](i,j) = dB_ij/dU_k
    std::vector<std::vector<MatFn>> B_x;     ///< explicit x_a-derivative of B[a][b]

    /// Present only for fading-memory systems; holds the history buffer the
    /// source closure reads. Single writer (the time loop), many readers.
    std::shared_ptr<MemoryState> memory;
};

/// Throws DomainError when U is outside the admissible region.
void require_admissible(const SystemSpec& spec, const Vec& U);

/// R := P + A_t + sum_a f_{a,x_a}
Vec eval_R(const SystemSpec& spec, const Vec& U, double x, double t);

/// Z := G.R - eta_t - sum_a q_{a,x_a}
double eval_Z(const SystemSpec& spec, const Vec& U, double x, double t);

/// Newton inversion of V = A(U,x,t). Converges when
/// |A(U)-V|_inf <= tol*(1+|V|_inf); throws InversionError after max_iters.
Vec invert_A(const SystemSpec& spec, const Vec& V, double x, double t, const Vec& guess,
             double tol = 1e-12, int max_iters = 50);

/// Fills every missing derivative closure with central finite differences.
/// First-order slots use step eps_mach^(1/3)*(1+|component|); second-order
/// and mixed slots use eps_mach^(1/4)*(1+|component|), which keeps the
/// rounding error of second differences below 1e-6 on O(1) data. Sets
/// derivative_mode = Synthesized when anything was filled.
SystemSpec synthesize_derivatives(SystemSpec core);

/// Strictly increasing past time stamps with per-cell state snapshots.
/// Grid layout is owned by the caller; `cells` is the number of spatial
/// samples each snapshot must carry.
struct HistoryBuffer {
    int cells = 0;
    std::vector<double> times;
    std::vector<std::vector<Vec>> snapshots;

    void append(double t, const std::vector<Vec>& snap);
    bool covers(double t) const { return !times.empty() && times.back() >= t - 1e-12; }
};

}  // namespace relent
