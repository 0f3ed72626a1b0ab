#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "relent/rng.hpp"
#include "relent/system.hpp"

namespace relent {

/// Pointwise relative quantities at a fixed (U, Ubar, x, t). All fields
/// vanish (quadratically) at U = Ubar.
struct RelativeQuantities {
    double rel_eta = 0.0;
    std::vector<double> rel_q;  // per direction
    std::vector<Vec> rel_f;     // per direction
    Vec rel_G;
    Vec phi;
    Mat G1;
    std::vector<Vec> G2;  // per direction
};

/// eta(U|Ubar) = eta(U) - eta(Ubar) - G(Ubar).(A(U) - A(Ubar))
double rel_entropy(const SystemSpec& spec, const Vec& U, const Vec& Ubar, double x, double t);

/// q_a(U|Ubar) = q_a(U) - q_a(Ubar) - G(Ubar).(f_a(U) - f_a(Ubar))
std::vector<double> rel_entropy_flux(const SystemSpec& spec, const Vec& U, const Vec& Ubar,
                                     double x, double t);

/// f_a(U|Ubar) = f_a(U) - f_a(Ubar) - df_a(Ubar) dA(Ubar)^{-1} (A(U) - A(Ubar))
std::vector<Vec> rel_flux(const SystemSpec& spec, const Vec& U, const Vec& Ubar, double x,
                          double t);

/// G(U|Ubar) = G(U) - G(Ubar) - dG(Ubar) dA(Ubar)^{-1} (A(U) - A(Ubar))
Vec rel_multiplier(const SystemSpec& spec, const Vec& U, const Vec& Ubar, double x, double t);

/// Quadratic remainders phi, G1, G2 of the expansions of U, dG and G_x along
/// the conserved variable.
void rel_remainders(const SystemSpec& spec, const Vec& U, const Vec& Ubar, double x, double t,
                    Vec& phi, Mat& G1, std::vector<Vec>& G2);

RelativeQuantities relative_quantities(const SystemSpec& spec, const Vec& U, const Vec& Ubar,
                                       double x, double t);

struct LemmaAuditConfig {
    double M = 1.0;        ///< reference states live in the ball B_M
    double U_max = 50.0;   ///< outermost shell radius
    int shells = 6;        ///< geometric shells between M and U_max
    int samples_per_shell = 400;
    int ball_samples = 400;
    double p = 2.0;        ///< growth exponent of the far-field lower bound
    double stabilize_tol = 0.05;  ///< shell-ratio stabilization threshold
    int xt_points = 4;
    double T = 1.0;
    double domain_length = 6.283185307179586;
    std::uint64_t seed = 0;
};

/// Worst-case sample ratios realizing the lower/upper bounds that make the
/// relative entropy a distance. Constants are empirical falsifiers, not
/// proven bounds.
struct LemmaAuditReport {
    int sample_count = 0;
    double c1 = 0.0;   ///< eta(U|Ubar) >= c1 |A-Abar|^2 on |U| <= r1
    double c2 = 0.0;   ///< eta(U|Ubar) >= c2 eta(U)     on |U| >= r1
    double c1p = 0.0;  ///< eta(U|Ubar) >= c1p |U-Ubar|^2 on |U| <= r2
    double c2p = 0.0;  ///< eta(U|Ubar) >= c2p |U-Ubar|^p on |U| >= r2
    double equiv_upper = 0.0;  ///< eta(U|Ubar) <= equiv_upper |U-Ubar|^2 on B_M pairs
    double c3 = 0.0;           ///< |f_a(U|Ubar)| <= c3 eta(U|Ubar)
    double c3_source = 0.0;    ///< |(G-Gbar).(R-Rbar)| <= c3_source eta(U|Ubar)
    double c3_mult = 0.0;      ///< |G(U|Ubar)| <= c3_mult eta(U|Ubar)
    double r1 = 0.0, r2 = 0.0, M = 0.0;
    double p = 2.0;

    struct Violation {
        Vec U, Ubar;
        double x = 0.0, t = 0.0;
        double value = 0.0;
        std::string what;
    };
    std::vector<Violation> violations;

    /// Per-sample rows: |U|, |U-Ubar|, eta(U|Ubar), eta(U), max_a |f_a(U|Ubar)|, |G(U|Ubar)|.
    std::vector<std::array<double, 6>> samples;
};

/// Samples Ubar in B_M and U over widening shells; grows r1, r2 until the
/// shell ratios stabilize. Throws ConvexityViolation when the relative
/// entropy is nonpositive at U != Ubar.
LemmaAuditReport lemma_bounds_audit(const SystemSpec& spec, StateSampler& sampler,
                                    const LemmaAuditConfig& config);

}  // namespace relent
