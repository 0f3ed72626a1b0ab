#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "relent/system.hpp"

namespace relent {

enum class Verdict { Pass, Fail, TrendPass, NotApplicable };
std::string to_string(Verdict v);

/// Pointwise structural record: invertibility of dA, compatibility residuals
/// of the entropy pair, and the smallest eigenvalue of the symmetrized
/// relative Hessian hess_eta - G.d2A.
struct PointAudit {
    double det_dA = 0.0;
    double h2_residual_eta = 0.0;  // |grad_eta - dA^T G|_inf
    double h2_residual_q = 0.0;    // max_a |grad q_a - df_a^T G|_inf
    double h3_lambda_min = 0.0;
};
PointAudit audit_pointwise(const SystemSpec& spec, const Vec& U, double x, double t);

struct CloudConfig {
    int state_samples = 2000;
    /// When set, states are drawn uniformly from this box; otherwise from
    /// |U| shells up to U_max.
    std::optional<std::vector<std::array<double, 2>>> state_box;
    double M = 2.0;      ///< ball radius for sup-type bounds and pair draws
    double U_max = 40.0;
    int shells = 4;
    int pair_samples = 512;
    int xt_points = 8;
    double T = 1.0;
    double domain_length = 6.283185307179586;
    std::uint64_t seed = 0;
};

/// Deterministic sample cloud: a B_M stratum for sup-type bounds, |U| shells
/// for decay trends (box mode replaces both with box draws), (U, Ubar) pairs
/// in B_M, and (x,t) points on the torus.
struct SampleCloud {
    std::vector<Vec> states;                      // [0, ball_count) lies in B_M
    int ball_count = 0;
    std::vector<std::vector<int>> shell_members;  // indices into states, per shell
    std::vector<double> shell_radii;              // geometric centers, per shell
    std::vector<std::pair<Vec, Vec>> pairs;
    std::vector<std::pair<double, double>> points;  // (x, t)
    double M = 0.0;
    std::uint64_t seed = 0;
};
SampleCloud make_cloud(const SystemSpec& spec, const CloudConfig& config);

struct AuditConfig {
    double h1_min_det = 1e-8;
    double h2_residual_tol = 1e-8;
    double uniformity_spread_cap = 10.0;  ///< flags (x,t)-non-uniform constants
    int hp2_directions = 64;
    double zero_tol = 1e-13;  ///< numerators below this count as identically zero
    double growth_p = 2.0;
};

struct HypothesisRecord {
    std::string id;
    Verdict verdict = Verdict::NotApplicable;
    double constant = 0.0;  ///< mu, C, lambda1, lambda2 or decay slope
    /// (x,t)-uniformity: absolute max-min spread for H1-H3, max/min ratio for
    /// the sup-type bounds; 0 when not tracked.
    double spread = 0.0;
    std::string witness;  ///< worst sample, printable
};

struct HypothesisReport {
    std::vector<HypothesisRecord> records;
    std::uint64_t seed = 0;
    int sample_count = 0;

    /// Per-(state, point) pointwise rows: |U|, x, t, H2 residual, H3 lambda_min.
    std::vector<std::array<double, 5>> samples;

    const HypothesisRecord& find(const std::string& id) const;
    bool has(const std::string& id) const;
};

/// Audits H1-H3, HB, Hgr1-3, Hxt1-3, HBxt, Hgr4-5, HR1-3, HP1-2 and HBpar
/// over the cloud. Decay-at-infinity hypotheses become finite-shell trend
/// fits (TrendPass, never Pass); ratio tests whose paired identity
/// coefficients vanish identically report NotApplicable.
HypothesisReport audit_sampled(const SystemSpec& spec, const SampleCloud& cloud,
                               const AuditConfig& config);

struct DecayFit {
    double slope = 0.0;
    Verdict verdict = Verdict::Fail;
    double first_ratio = 0.0, last_ratio = 0.0;
};

/// Least-squares slope of log(ratio) against log(|U|); trend-pass iff
/// slope < -0.1 and the last shell ratio is below the first. Requires at
/// least 4 shells.
DecayFit fit_decay(const std::vector<std::pair<double, double>>& shell_ratios);

}  // namespace relent
