#include "relent/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "relent/parallel.hpp"
#include "relent/rng.hpp"

namespace relent {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::TrendPass: return "trend-pass";
        case Verdict::NotApplicable: return "not-applicable";
    }
    return "?";
}

namespace {

const double kStep5 = std::pow(std::numeric_limits<double>::epsilon(), 0.25);

/// Fourth-order central gradient of a scalar closure; accurate enough to
/// audit analytic entropy-flux compatibility at 1e-10.
Vec grad5(const ScalarFn& fn, const Vec& U, double x, double t) {
    const int n = static_cast<int>(U.size());
    Vec g(n);
    for (int j = 0; j < n; ++j) {
        const double h = kStep5 * (1.0 + std::abs(U[j]));
        Vec up2 = U, up1 = U, dn1 = U, dn2 = U;
        up2[j] += 2 * h;
        up1[j] += h;
        dn1[j] -= h;
        dn2[j] -= 2 * h;
        g[j] = (-fn(up2, x, t) + 8.0 * fn(up1, x, t) - 8.0 * fn(dn1, x, t) + fn(dn2, x, t)) /
               (12.0 * h);
    }
    return g;
}

std::string describe(const Vec& U, double x, double t, double value) {
    char buf[160];
    std::string u = "(";
    for (int i = 0; i < U.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%s%.6g", i ? ", " : "", U[i]);
        u += buf;
    }
    u += ")";
    std::snprintf(buf, sizeof(buf), " x=%.4g t=%.4g value=%.6g", x, t, value);
    return "U=" + u + buf;
}

struct Extremum {
    double value = 0.0;
    int state = -1, point = -1, partner = -1;
    bool set = false;

    void take_min(double v, int s, int p, int q = -1) {
        if (!set || v < value) {
            value = v;
            state = s;
            point = p;
            partner = q;
            set = true;
        }
    }
    void take_max(double v, int s, int p, int q = -1) {
        if (!set || v > value) {
            value = v;
            state = s;
            point = p;
            partner = q;
            set = true;
        }
    }
};

double frob(const Mat& m) { return m.norm(); }

double tensor_norm(const Tensor3& t) {
    double acc = 0.0;
    for (const Mat& m : t) acc += m.squaredNorm();
    return std::sqrt(acc);
}

}  // namespace

PointAudit audit_pointwise(const SystemSpec& spec, const Vec& U, double x, double t) {
    require_admissible(spec, U);
    PointAudit rec;

    const Mat dA = spec.dA(U, x, t);
    rec.det_dA = std::abs(dA.determinant());

    const Vec G = spec.G(U, x, t);
    rec.h2_residual_eta = (spec.grad_eta(U, x, t) - dA.transpose() * G).lpNorm<Eigen::Infinity>();

    rec.h2_residual_q = 0.0;
    for (int a = 0; a < spec.d; ++a) {
        const Vec gq = grad5(spec.q[a], U, x, t);
        const Vec rhs = spec.df[a](U, x, t).transpose() * G;
        rec.h2_residual_q = std::max(rec.h2_residual_q, (gq - rhs).lpNorm<Eigen::Infinity>());
    }

    Mat S = spec.hess_eta(U, x, t);
    const Tensor3 d2A = spec.d2A(U, x, t);
    for (int i = 0; i < spec.n; ++i) S -= G[i] * d2A[i];
    const Mat sym = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(sym);
    rec.h3_lambda_min = es.eigenvalues().minCoeff();
    return rec;
}

SampleCloud make_cloud(const SystemSpec& spec, const CloudConfig& config) {
    SampleCloud cloud;
    cloud.seed = config.seed;
    cloud.M = config.M;
    StateSampler sampler(spec.n, spec.inadmissible, config.seed);

    if (config.state_box) {
        for (int i = 0; i < config.state_samples; ++i)
            cloud.states.push_back(sampler.draw_box(*config.state_box));
        cloud.ball_count = static_cast<int>(cloud.states.size());
    } else {
        const int shells = std::max(config.shells, 1);
        const int per_shell = std::max(config.state_samples / (shells + 1), 1);
        for (int i = 0; i < per_shell; ++i) cloud.states.push_back(sampler.draw_ball(config.M));
        cloud.ball_count = static_cast<int>(cloud.states.size());

        const double growth = std::pow(config.U_max / config.M, 1.0 / shells);
        cloud.shell_members.resize(shells);
        for (int k = 0; k < shells; ++k) {
            const double lo = config.M * std::pow(growth, k);
            const double hi = config.M * std::pow(growth, k + 1);
            cloud.shell_radii.push_back(std::sqrt(lo * hi));
            for (int i = 0; i < per_shell; ++i) {
                cloud.shell_members[k].push_back(static_cast<int>(cloud.states.size()));
                cloud.states.push_back(sampler.draw_shell(lo, hi));
            }
            if (cloud.shell_members[k].empty())
                throw AuditError("cloud: empty shell " + std::to_string(k));
        }
    }

    for (int i = 0; i < config.pair_samples; ++i) {
        Vec a = sampler.draw_ball(config.M);
        Vec b = sampler.draw_ball(config.M);
        if ((a - b).squaredNorm() == 0.0) continue;
        cloud.pairs.emplace_back(std::move(a), std::move(b));
    }

    for (int j = 0; j < std::max(config.xt_points, 1); ++j) {
        cloud.points.emplace_back(sampler.rng().uniform(0.0, config.domain_length),
                                  sampler.rng().uniform(0.0, config.T));
    }
    return cloud;
}

const HypothesisRecord& HypothesisReport::find(const std::string& id) const {
    for (const auto& r : records)
        if (r.id == id) return r;
    throw AuditError("hypothesis report: no record for " + id);
}

bool HypothesisReport::has(const std::string& id) const {
    for (const auto& r : records)
        if (r.id == id) return true;
    return false;
}

DecayFit fit_decay(const std::vector<std::pair<double, double>>& shell_ratios) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& [r, v] : shell_ratios)
        if (v > 0.0 && r > 0.0) pts.emplace_back(std::log(r), std::log(v));
    if (pts.size() < 4)
        throw AuditError("fit_decay: insufficient data, need at least 4 shells with positive "
                         "ratios, got " +
                         std::to_string(pts.size()));

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(pts.size());
    for (const auto& [lx, ly] : pts) {
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    DecayFit fit;
    fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    fit.first_ratio = shell_ratios.front().second;
    fit.last_ratio = shell_ratios.back().second;
    fit.verdict = (fit.slope < -0.1 && fit.last_ratio < fit.first_ratio) ? Verdict::TrendPass
                                                                         : Verdict::Fail;
    return fit;
}

namespace {

/// Everything the sampled audit needs at one (state, point) evaluation.
struct SPRecord {
    PointAudit pa;
    double hb = 0.0, hbxt = 0.0, hbpar = 0.0;
    double eta = 0.0;
    double normA = 0.0, normf = 0.0, normR = 0.0, normGR = 0.0, normG = 0.0;
    double num_gr4 = 0.0, num_gr5 = 0.0;
    double hp1 = 0.0, hp2 = std::numeric_limits<double>::infinity();
    bool has_B = false;
    double coeff_Gt_Gx = 0.0;  // |G_t| + sum_a |G_x|, Hxt1 applicability
};

struct PairRecord {
    double den = 0.0;  // |U - Ubar|^2
    double num_xt1 = 0.0, num_xt2 = 0.0, num_xt3 = 0.0;
    double hr2 = 0.0;
};

}  // namespace

HypothesisReport audit_sampled(const SystemSpec& spec, const SampleCloud& cloud,
                               const AuditConfig& config) {
    HypothesisReport report;
    report.seed = cloud.seed;

    const int S = static_cast<int>(cloud.states.size());
    const int P = static_cast<int>(cloud.points.size());
    const int R = static_cast<int>(cloud.pairs.size());
    if (S == 0 || P == 0) throw AuditError("audit: empty sample cloud");
    report.sample_count = S * P;

    const bool has_B = !spec.B.empty() && static_cast<bool>(spec.B[0][0]);

    // HP2 directions, drawn once so every (state, point) sees the same set.
    std::vector<std::vector<Vec>> dirs;  // [dir][alpha]
    if (has_B) {
        Rng dir_rng(cloud.seed ^ 0x9e3779b97f4a7c15ull);
        dirs.resize(config.hp2_directions);
        for (auto& d : dirs) {
            d.resize(spec.d);
            for (int a = 0; a < spec.d; ++a) {
                d[a] = Vec(spec.n);
                for (int i = 0; i < spec.n; ++i) d[a][i] = dir_rng.normal();
            }
        }
    }

    std::vector<SPRecord> rec(static_cast<std::size_t>(S) * P);
    parallel_for(rec.size(), [&](std::size_t idx) {
        const int s = static_cast<int>(idx / P);
        const int p = static_cast<int>(idx % P);
        const Vec& U = cloud.states[s];
        const auto [x, t] = cloud.points[p];
        SPRecord& r = rec[idx];

        r.pa = audit_pointwise(spec, U, x, t);
        r.eta = spec.eta(U, x, t);
        r.normA = spec.A(U, x, t).norm();
        for (int a = 0; a < spec.d; ++a) r.normf = std::max(r.normf, spec.f[a](U, x, t).norm());

        const Vec G = spec.G(U, x, t);
        const Mat dG = spec.dG(U, x, t);
        r.normG = G.norm();
        r.hb = r.normA + frob(spec.dA(U, x, t)) + r.normG + frob(dG);
        for (int a = 0; a < spec.d; ++a)
            r.hb += spec.f[a](U, x, t).norm() + frob(spec.df[a](U, x, t));

        const Vec Rv = eval_R(spec, U, x, t);
        r.normR = Rv.norm();
        r.normGR = std::abs(G.dot(Rv));
        double gt_gx = spec.G_t(U, x, t).norm();
        for (int a = 0; a < spec.d; ++a) gt_gx += spec.G_x[a](U, x, t).norm();
        r.coeff_Gt_Gx = gt_gx;
        r.hbxt = r.normR + gt_gx;

        double gr4 = spec.eta_t(U, x, t);
        for (int a = 0; a < spec.d; ++a) gr4 += spec.q_x[a](U, x, t);
        r.num_gr4 = std::abs(gr4);
        Vec gr5 = spec.A_t(U, x, t);
        for (int a = 0; a < spec.d; ++a) gr5 += spec.f_x[a](U, x, t);
        r.num_gr5 = gr5.norm();

        if (has_B) {
            r.has_B = true;
            for (int a = 0; a < spec.d; ++a) {
                for (int b = 0; b < spec.d; ++b) {
                    r.hbpar += frob(spec.B[a][b](U, x, t)) +
                               tensor_norm(spec.dB[a][b](U, x, t)) +
                               frob(spec.B_x[a][b](U, x, t));
                }
            }

            // HP1: smallest eigenvalue of the symmetrized dn x dn block form.
            Mat M(spec.d * spec.n, spec.d * spec.n);
            for (int a = 0; a < spec.d; ++a)
                for (int b = 0; b < spec.d; ++b)
                    M.block(a * spec.n, b * spec.n, spec.n, spec.n) =
                        dG.transpose() * spec.B[a][b](U, x, t);
            Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (M + M.transpose()));
            r.hp1 = es.eigenvalues().minCoeff();

            // HP2: sampled quantifier over gradient directions.
            for (const auto& xi : dirs) {
                double num = 0.0, den = 0.0;
                std::vector<Vec> Bxi(spec.d, Vec::Zero(spec.n));
                for (int a = 0; a < spec.d; ++a)
                    for (int b = 0; b < spec.d; ++b) Bxi[a] += spec.B[a][b](U, x, t) * xi[b];
                for (int a = 0; a < spec.d; ++a) {
                    num += (dG * xi[a]).dot(Bxi[a]);
                    den += Bxi[a].squaredNorm();
                }
                if (den > 1e-14) r.hp2 = std::min(r.hp2, num / den);
            }
        }
    });

    std::vector<PairRecord> prec(static_cast<std::size_t>(R) * P);
    parallel_for(prec.size(), [&](std::size_t idx) {
        const int rr = static_cast<int>(idx / P);
        const int p = static_cast<int>(idx % P);
        const auto& [U, Ubar] = cloud.pairs[rr];
        const auto [x, t] = cloud.points[p];
        PairRecord& r = prec[idx];
        r.den = (U - Ubar).squaredNorm();

        double xt1 = (spec.A(U, x, t) - spec.A(Ubar, x, t)).norm();
        for (int a = 0; a < spec.d; ++a)
            xt1 += (spec.f[a](U, x, t) - spec.f[a](Ubar, x, t)).norm();
        r.num_xt1 = xt1;

        Vec xt2 = spec.A_t(U, x, t) - spec.A_t(Ubar, x, t);
        for (int a = 0; a < spec.d; ++a)
            xt2 += spec.f_x[a](U, x, t) - spec.f_x[a](Ubar, x, t);
        r.num_xt2 = xt2.norm();

        double xt3 = spec.eta_t(U, x, t) - spec.eta_t(Ubar, x, t);
        for (int a = 0; a < spec.d; ++a) xt3 += spec.q_x[a](U, x, t) - spec.q_x[a](Ubar, x, t);
        r.num_xt3 = std::abs(xt3);

        r.hr2 = (spec.G(U, x, t) - spec.G(Ubar, x, t))
                    .dot(eval_R(spec, U, x, t) - eval_R(spec, Ubar, x, t));
    });

    report.samples.reserve(rec.size());
    for (int s = 0; s < S; ++s) {
        for (int p = 0; p < P; ++p) {
            const auto& r = rec[static_cast<std::size_t>(s) * P + p];
            const auto [x, t] = cloud.points[p];
            report.samples.push_back({cloud.states[s].norm(), x, t,
                                      std::max(r.pa.h2_residual_eta, r.pa.h2_residual_q),
                                      r.pa.h3_lambda_min});
        }
    }

    auto witness_sp = [&](const Extremum& e) {
        if (!e.set) return std::string{};
        const auto [x, t] = cloud.points[e.point];
        return describe(cloud.states[e.state], x, t, e.value);
    };
    auto witness_pair = [&](const Extremum& e) {
        if (!e.set) return std::string{};
        const auto [x, t] = cloud.points[e.point];
        return describe(cloud.pairs[e.state].first, x, t, e.value) + " vs Ubar";
    };

    auto add = [&](std::string id, Verdict v, double constant, double spread,
                   std::string witness) {
        report.records.push_back(
            {std::move(id), v, constant, spread, std::move(witness)});
    };

    // ---- H1 / H2 / H3 with per-point constants for (x,t) uniformity ----
    {
        std::vector<double> h1_pt(P, std::numeric_limits<double>::infinity());
        std::vector<double> h2_pt(P, 0.0);
        std::vector<double> h3_pt(P, std::numeric_limits<double>::infinity());
        Extremum h1w, h2w, h3w;
        for (int s = 0; s < S; ++s) {
            for (int p = 0; p < P; ++p) {
                const auto& pa = rec[static_cast<std::size_t>(s) * P + p].pa;
                h1_pt[p] = std::min(h1_pt[p], pa.det_dA);
                h2_pt[p] = std::max(h2_pt[p], std::max(pa.h2_residual_eta, pa.h2_residual_q));
                h3_pt[p] = std::min(h3_pt[p], pa.h3_lambda_min);
                h1w.take_min(pa.det_dA, s, p);
                h2w.take_max(std::max(pa.h2_residual_eta, pa.h2_residual_q), s, p);
                h3w.take_min(pa.h3_lambda_min, s, p);
            }
        }
        auto abs_spread = [](const std::vector<double>& v) {
            return *std::max_element(v.begin(), v.end()) -
                   *std::min_element(v.begin(), v.end());
        };
        add("H1", h1w.value >= config.h1_min_det ? Verdict::Pass : Verdict::Fail, h1w.value,
            abs_spread(h1_pt), witness_sp(h1w));
        add("H2", h2w.value <= config.h2_residual_tol ? Verdict::Pass : Verdict::Fail, h2w.value,
            abs_spread(h2_pt), witness_sp(h2w));
        add("H3", h3w.value > 0.0 ? Verdict::Pass : Verdict::Fail, h3w.value, abs_spread(h3_pt),
            witness_sp(h3w));
    }

    // ---- sup-type bounds over the B_M stratum, ratio spread across (x,t) ----
    auto sup_bound = [&](const std::string& id, auto value_of, bool applicable) {
        if (!applicable) {
            add(id, Verdict::NotApplicable, 0.0, 0.0, "");
            return;
        }
        std::vector<double> per_pt(P, 0.0);
        Extremum w;
        for (int s = 0; s < cloud.ball_count; ++s) {
            for (int p = 0; p < P; ++p) {
                const double v = value_of(rec[static_cast<std::size_t>(s) * P + p]);
                per_pt[p] = std::max(per_pt[p], v);
                w.take_max(v, s, p);
            }
        }
        const double hi = *std::max_element(per_pt.begin(), per_pt.end());
        const double lo = *std::min_element(per_pt.begin(), per_pt.end());
        const double spread = hi / std::max(lo, 1e-300);
        const bool uniform = hi <= config.zero_tol || spread <= config.uniformity_spread_cap;
        add(id, std::isfinite(w.value) && uniform ? Verdict::Pass : Verdict::Fail, w.value,
            spread, witness_sp(w));
    };
    sup_bound("HB", [](const SPRecord& r) { return r.hb; }, true);
    sup_bound("HBxt", [](const SPRecord& r) { return r.hbxt; }, true);
    sup_bound("HBpar", [](const SPRecord& r) { return r.hbpar; }, has_B);

    // ---- growth / decay trends over shells ----
    const int shells = static_cast<int>(cloud.shell_members.size());
    auto shell_max_ratio = [&](auto num_of) {
        std::vector<std::pair<double, double>> out;
        for (int k = 0; k < shells; ++k) {
            double best = 0.0;
            for (int s : cloud.shell_members[k]) {
                for (int p = 0; p < P; ++p) {
                    const SPRecord& r = rec[static_cast<std::size_t>(s) * P + p];
                    if (r.eta > 0.0) best = std::max(best, num_of(r) / r.eta);
                }
            }
            out.emplace_back(cloud.shell_radii[k], best);
        }
        return out;
    };
    auto global_max = [&](auto num_of) {
        double v = 0.0;
        for (const auto& r : rec) v = std::max(v, num_of(r));
        return v;
    };
    auto decay_record = [&](const std::string& id, auto num_of) {
        if (global_max(num_of) <= config.zero_tol) {
            add(id, Verdict::Pass, 0.0, 0.0, "numerator vanishes identically on the cloud");
            return;
        }
        if (shells < 4) {
            add(id, Verdict::NotApplicable, 0.0, 0.0, "needs >= 4 shells");
            return;
        }
        const auto ratios = shell_max_ratio(num_of);
        const DecayFit fit = fit_decay(ratios);
        char buf[120];
        std::snprintf(buf, sizeof(buf), "shell ratios %.4g -> %.4g", fit.first_ratio,
                      fit.last_ratio);
        add(id, fit.verdict, fit.slope, 0.0, buf);
    };

    // Hgr1: eta comparable to |U|^p + 1 across shells.
    if (shells >= 4) {
        std::vector<std::pair<double, double>> lo_r, hi_r;
        for (int k = 0; k < shells; ++k) {
            double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
            for (int s : cloud.shell_members[k]) {
                const double pw = std::pow(cloud.states[s].norm(), config.growth_p) + 1.0;
                for (int p = 0; p < P; ++p) {
                    const double ratio = rec[static_cast<std::size_t>(s) * P + p].eta / pw;
                    lo = std::min(lo, ratio);
                    hi = std::max(hi, ratio);
                }
            }
            lo_r.emplace_back(cloud.shell_radii[k], lo);
            hi_r.emplace_back(cloud.shell_radii[k], hi);
        }
        double beta1 = std::numeric_limits<double>::infinity(), beta2 = 0.0;
        for (int k = shells / 2; k < shells; ++k) beta1 = std::min(beta1, lo_r[k].second);
        for (int k = 0; k < shells; ++k) beta2 = std::max(beta2, hi_r[k].second);
        const double slope_lo = fit_decay(lo_r).slope;
        const double slope_hi = fit_decay(hi_r).slope;
        const bool ok = beta1 > 0.0 && slope_lo > -0.1 && slope_hi < 0.1;
        char buf[160];
        std::snprintf(buf, sizeof(buf), "beta1=%.4g beta2=%.4g slopes [%.3f, %.3f] p=%.3g",
                      beta1, beta2, slope_lo, slope_hi, config.growth_p);
        add("Hgr1", ok ? Verdict::Pass : Verdict::Fail, beta1, 0.0, buf);
    } else {
        add("Hgr1", Verdict::NotApplicable, 0.0, 0.0, "needs >= 4 shells");
    }

    decay_record("Hgr2", [](const SPRecord& r) { return r.normf; });
    decay_record("Hgr3", [](const SPRecord& r) { return r.normA; });
    decay_record("Hgr4", [](const SPRecord& r) { return r.num_gr4; });
    decay_record("Hgr5", [](const SPRecord& r) { return r.num_gr5; });

    // ---- paired ratio tests ----
    auto pair_ratio = [&](const std::string& id, auto num_of, bool applicable,
                          const std::string& na_reason) {
        if (!applicable) {
            add(id, Verdict::NotApplicable, 0.0, 0.0, na_reason);
            return;
        }
        double num_max = 0.0;
        for (const auto& r : prec) num_max = std::max(num_max, num_of(r));
        if (num_max <= config.zero_tol) {
            add(id, Verdict::Pass, 0.0, 0.0, "numerator vanishes identically on the cloud");
            return;
        }
        if (prec.empty()) {
            add(id, Verdict::NotApplicable, 0.0, 0.0, "no pairs sampled");
            return;
        }
        Extremum w;
        std::vector<std::pair<double, double>> pts;  // (|U-Ubar|, ratio)
        for (std::size_t idx = 0; idx < prec.size(); ++idx) {
            const PairRecord& r = prec[idx];
            if (r.den <= 0.0) continue;
            const double ratio = num_of(r) / r.den;
            pts.emplace_back(std::sqrt(r.den), ratio);
            w.take_max(ratio, static_cast<int>(idx / P), static_cast<int>(idx % P));
        }
        // A bounded constant shows as a distance-independent ratio; blow-up
        // as U -> Ubar shows as a negative slope against |U-Ubar|.
        double slope = 0.0;
        try {
            slope = fit_decay(pts).slope;
        } catch (const AuditError&) {
        }
        const bool bounded = slope > -0.3;
        char buf[120];
        std::snprintf(buf, sizeof(buf), "C=%.4g ratio-vs-distance slope %.3f", w.value, slope);
        add(id, bounded ? Verdict::Pass : Verdict::Fail, w.value, 0.0,
            std::string(buf) + "; " + witness_pair(w));
    };

    double coeff = 0.0;
    for (const auto& r : rec) coeff = std::max(coeff, r.coeff_Gt_Gx);
    pair_ratio("Hxt1", [](const PairRecord& r) { return r.num_xt1; }, coeff > config.zero_tol,
               "G_t and G_x vanish, the paired identity terms are absent");
    pair_ratio("Hxt2", [](const PairRecord& r) { return r.num_xt2; }, true, "");
    pair_ratio("Hxt3", [](const PairRecord& r) { return r.num_xt3; }, true, "");

    // ---- source structure ----
    {
        double rmax = 0.0;
        for (const auto& r : rec) rmax = std::max(rmax, r.normR);
        if (rmax <= config.zero_tol) {
            add("HR1", Verdict::Pass, 0.0, 0.0, "source vanishes identically");
            add("HR2", Verdict::Pass, 0.0, 0.0, "source vanishes identically");
            add("HR3", Verdict::Pass, 0.0, 0.0, "source vanishes identically");
        } else {
            if (shells >= 4) {
                const auto fit_R = fit_decay(shell_max_ratio([](const SPRecord& r) { return r.normR; }));
                const auto fit_GR =
                    fit_decay(shell_max_ratio([](const SPRecord& r) { return r.normGR; }));
                const Verdict v = (fit_R.verdict == Verdict::TrendPass &&
                                   fit_GR.verdict == Verdict::TrendPass)
                                      ? Verdict::TrendPass
                                      : Verdict::Fail;
                char buf[120];
                std::snprintf(buf, sizeof(buf), "slopes |R|/eta %.3f, |G.R|/eta %.3f",
                              fit_R.slope, fit_GR.slope);
                add("HR1", v, std::max(fit_R.slope, fit_GR.slope), 0.0, buf);
            } else {
                add("HR1", Verdict::NotApplicable, 0.0, 0.0, "needs >= 4 shells");
            }

            if (!prec.empty()) {
                Extremum w;
                double scale = 0.0;
                for (std::size_t idx = 0; idx < prec.size(); ++idx) {
                    scale = std::max(scale, std::abs(prec[idx].hr2));
                    w.take_min(prec[idx].hr2, static_cast<int>(idx / P),
                               static_cast<int>(idx % P));
                }
                const bool ok = w.value >= -1e-12 * std::max(scale, 1.0);
                add("HR2", ok ? Verdict::Pass : Verdict::Fail, w.value, 0.0, witness_pair(w));
            } else {
                add("HR2", Verdict::NotApplicable, 0.0, 0.0, "no pairs sampled");
            }

            decay_record("HR3", [](const SPRecord& r) { return r.normG; });
        }
    }

    // ---- parabolic structure ----
    if (has_B) {
        Extremum w1, w2;
        for (int s = 0; s < S; ++s) {
            for (int p = 0; p < P; ++p) {
                const SPRecord& r = rec[static_cast<std::size_t>(s) * P + p];
                w1.take_min(r.hp1, s, p);
                if (std::isfinite(r.hp2)) w2.take_min(r.hp2, s, p);
            }
        }
        add("HP1", w1.value > 0.0 ? Verdict::Pass : Verdict::Fail, w1.value, 0.0,
            witness_sp(w1));
        add("HP2", w2.set && w2.value > 0.0 ? Verdict::Pass : Verdict::Fail,
            w2.set ? w2.value : 0.0, 0.0, witness_sp(w2));
    } else {
        add("HP1", Verdict::NotApplicable, 0.0, 0.0, "no viscosity matrices");
        add("HP2", Verdict::NotApplicable, 0.0, 0.0, "no viscosity matrices");
    }

    return report;
}

}  // namespace relent
