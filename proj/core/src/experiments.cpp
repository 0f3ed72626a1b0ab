#include "relent/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "relent/parallel.hpp"
#include "relent/relative.hpp"

namespace relent {

namespace {

SystemSpec fresh_system(const ExperimentConfig& c) {
    return c.system_factory ? c.system_factory() : c.system;
}

SolverConfig solver_config(const ExperimentConfig& c, double epsilon, Scheme scheme, int snapshots) {
    SolverConfig sc;
    sc.epsilon = epsilon;
    sc.cfl = c.cfl;
    sc.scheme = scheme;
    sc.integrator = c.integrator;
    sc.t_end = c.t_end;
    sc.snapshots = snapshots;
    sc.max_dt_fraction = 1.0;  // order studies need dt tied to dx only
    return sc;
}

Field perturbed(const Field& base, double delta, int n) {
    InitialData bump;
    bump.preset = "gaussian-bump";
    bump.base.assign(n, 0.0);
    bump.amplitude.assign(n, delta);
    Field out = base;
    const Field b = make_initial(base.grid, n, bump);
    for (int i = 0; i < base.grid.N; ++i) out.U[i] += b.U[i];
    return out;
}

double least_squares_slope(const std::vector<double>& logx, const std::vector<double>& logy) {
    const double m = static_cast<double>(logx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < logx.size(); ++i) {
        sx += logx[i];
        sy += logy[i];
        sxx += logx[i] * logx[i];
        sxy += logx[i] * logy[i];
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

bool shocked(const Trajectory& traj, double factor) {
    if (traj.fields.empty()) return false;
    const double g0 = std::max(max_gradient(traj.fields.front()), 1e-12);
    for (const auto& f : traj.fields)
        if (max_gradient(f) > factor * g0) return true;
    return false;
}

double shock_time(const Trajectory& traj, double factor) {
    const double g0 = std::max(max_gradient(traj.fields.front()), 1e-12);
    for (std::size_t k = 0; k < traj.fields.size(); ++k)
        if (max_gradient(traj.fields[k]) > factor * g0) return traj.times[k];
    return -1.0;
}

}  // namespace

ExperimentReport run_stability(const ExperimentConfig& config) {
    ExperimentReport rep;
    rep.kind = "stability";

    const SystemSpec probe = fresh_system(config);
    const Grid1D grid = Grid1D::make(config.grids.front(), config.L);
    const Field U0 = make_initial(grid, probe.n, config.initial);

    if (config.delta == 0.0) {
        rep.verdict = "degenerate";
        rep.notes.push_back("delta = 0: twin runs coincide, S(eps) is 0/0");
        rep.metrics["delta"] = 0.0;
        return rep;
    }
    const Field Ubar0 = perturbed(U0, config.delta, probe.n);
    if (!(l2_distance(U0, Ubar0) > 0.0)) {
        rep.verdict = "degenerate";
        rep.notes.push_back("perturbation produced identical data");
        return rep;
    }

    struct Entry {
        double eps = 0.0, S = 0.0, rate = 0.0;
        bool violation = false, failed = false, shock = false;
        std::string note;
        std::vector<double> times, l2, rel;
    };
    std::vector<Entry> entries(config.epsilons.size());

    parallel_for(entries.size(), [&](std::size_t e) {
        Entry& ent = entries[e];
        ent.eps = config.epsilons[e];
        const SolverConfig sc = solver_config(config, ent.eps, Scheme::Central, config.snapshots);

        const SystemSpec sysU = fresh_system(config);
        const Trajectory tu = solve(sysU, U0, sc);
        const SystemSpec sysB = fresh_system(config);
        const Trajectory tb = solve(sysB, Ubar0, sc);
        if (!tu.ok() || !tb.ok()) {
            ent.failed = true;
            ent.note = !tu.ok() ? tu.failure->what : tb.failure->what;
            return;
        }
        ent.shock = shocked(tu, config.shock_gradient_factor);

        const double denom = l2_distance(tu.fields.front(), tb.fields.front());
        for (std::size_t k = 0; k < tu.fields.size(); ++k) {
            const double l2 = l2_distance(tu.fields[k], tb.fields[k]);
            const double re = rel_entropy_total(sysU, tu.fields[k], tb.fields[k]);
            ent.times.push_back(tu.times[k]);
            ent.l2.push_back(l2);
            ent.rel.push_back(re);
            ent.S = std::max(ent.S, l2 / denom);
        }
        const GronwallFit fit = gronwall_fit(ent.rel, ent.times, config.gronwall_tol);
        ent.rate = fit.rate;
        ent.violation = fit.violation;
    });

    Series series{"series", {"epsilon", "t", "l2_diff", "rel_entropy"}, {}};
    Series summary{"summary", {"epsilon", "S", "gronwall_rate", "envelope_violation"}, {}};
    bool any_fail = false, any_violation = false, any_shock = false;
    double smin = std::numeric_limits<double>::infinity(), smax = 0.0;
    for (const auto& ent : entries) {
        if (ent.failed) {
            any_fail = true;
            rep.notes.push_back("solver failure at eps=" + std::to_string(ent.eps) + ": " +
                                ent.note);
            continue;
        }
        any_shock = any_shock || ent.shock;
        any_violation = any_violation || ent.violation;
        smin = std::min(smin, ent.S);
        smax = std::max(smax, ent.S);
        for (std::size_t k = 0; k < ent.times.size(); ++k)
            series.rows.push_back({ent.eps, ent.times[k], ent.l2[k], ent.rel[k]});
        summary.rows.push_back({ent.eps, ent.S, ent.rate, ent.violation ? 1.0 : 0.0});
        rep.metrics["S[" + std::to_string(ent.eps) + "]"] = ent.S;
        rep.metrics["gronwall_rate[" + std::to_string(ent.eps) + "]"] = ent.rate;
    }
    rep.series.push_back(std::move(series));
    rep.series.push_back(std::move(summary));
    rep.figures.push_back({"stability_timeseries", "series", "t", {"l2_diff"}, false, "epsilon"});
    rep.figures.push_back({"stability_S", "summary", "epsilon", {"S"}, true, ""});

    const double ratio = smax / std::max(smin, 1e-300);
    rep.metrics["S_ratio"] = ratio;
    rep.metrics["S_max"] = smax;

    if (any_fail)
        rep.verdict = "fail";
    else if (any_shock)
        rep.verdict = "inconclusive";
    else if (std::isfinite(smax) && ratio <= config.ratio_cap && !any_violation)
        rep.verdict = "pass";
    else
        rep.verdict = "fail";
    return rep;
}

ExperimentReport run_convergence(const ExperimentConfig& config) {
    ExperimentReport rep;
    rep.kind = "convergence";
    if (config.epsilons.size() < 3)
        throw ConfigError(".experiment.epsilons: convergence needs at least 3 viscosity values");
    if (!config.has_target) throw ConfigError("convergence: no manufactured target configured");

    struct Entry {
        double eps = 0.0, E = 0.0, e0 = 0.0, dist = 0.0;
        int N = 0;
        bool saturated = false, failed = false;
        std::string note;
        std::vector<double> times, rel;
    };
    std::vector<Entry> entries(config.epsilons.size());

    parallel_for(entries.size(), [&](std::size_t e) {
        Entry& ent = entries[e];
        ent.eps = config.epsilons[e];

        double prevE = -1.0;
        for (int N = config.grids.front(); N <= config.grid_budget; N *= 2) {
            const SystemSpec base = fresh_system(config);
            const SystemSpec forced = manufactured_forcing(base, config.target, 0.0);
            const Grid1D grid = Grid1D::make(N, config.L);

            Field U0 = sample_target(grid, config.target, 0.0);
            if (config.mismatch != 0.0)
                for (auto& u : U0.U) u.array() += config.mismatch;

            const SolverConfig sc =
                solver_config(config, ent.eps, Scheme::Central, config.snapshots);
            const Trajectory traj = solve(forced, U0, sc);
            if (!traj.ok()) {
                ent.failed = true;
                ent.note = traj.failure->what;
                return;
            }

            double E = 0.0, dist = 0.0;
            std::vector<double> times, rel;
            for (std::size_t k = 0; k < traj.fields.size(); ++k) {
                const Field target_k = sample_target(grid, config.target, traj.times[k]);
                const double re = rel_entropy_total(forced, traj.fields[k], target_k);
                times.push_back(traj.times[k]);
                rel.push_back(re);
                E = std::max(E, re);
                dist = std::max(dist, l2_distance(traj.fields[k], target_k));
            }
            ent.dist = dist;
            ent.N = N;
            ent.times = std::move(times);
            ent.rel = std::move(rel);
            if (config.mismatch != 0.0) {
                const Field t0 = sample_target(grid, config.target, 0.0);
                ent.e0 = rel_entropy_total(forced, U0, t0);
            }
            if (prevE >= 0.0 && std::abs(E - prevE) <= config.saturation_tol * std::max(E, 1e-300)) {
                ent.E = E;
                ent.saturated = true;
                return;
            }
            prevE = E;
            ent.E = E;
        }
    });

    // int_0^T int |dx target|^2 dx dt, the gradient weight in the viscous
    // upper bound; reported so the bound constant is visible in the sweep
    double grad_weight = 0.0;
    {
        const int nx = 256, nt = 128;
        const double dx = config.L / nx, dt = config.t_end / nt;
        for (int k = 0; k < nt; ++k)
            for (int i = 0; i < nx; ++i)
                grad_weight +=
                    config.target.ddx((i + 0.5) * dx, (k + 0.5) * dt).squaredNorm() * dx * dt;
    }

    Series sweep{"sweep", {"epsilon", "N", "E_sup", "dist_sup", "e0", "bound_C"}, {}};
    Series series{"series", {"epsilon", "t", "rel_entropy"}, {}};
    bool all_saturated = true, any_fail = false;
    double bound_C_max = 0.0;
    std::vector<double> logeps, logE, logD;
    for (const auto& ent : entries) {
        if (ent.failed) {
            any_fail = true;
            rep.notes.push_back("solver failure at eps=" + std::to_string(ent.eps) + ": " +
                                ent.note);
            continue;
        }
        all_saturated = all_saturated && ent.saturated;
        const double bound_C = ent.E / std::max(ent.eps * grad_weight + ent.e0, 1e-300);
        bound_C_max = std::max(bound_C_max, bound_C);
        sweep.rows.push_back(
            {ent.eps, static_cast<double>(ent.N), ent.E, ent.dist, ent.e0, bound_C});
        for (std::size_t k = 0; k < ent.times.size(); ++k)
            series.rows.push_back({ent.eps, ent.times[k], ent.rel[k]});
        logeps.push_back(std::log(ent.eps));
        logE.push_back(std::log(std::max(ent.E, 1e-300)));
        logD.push_back(std::log(std::max(ent.dist, 1e-300)));
        rep.metrics["E[" + std::to_string(ent.eps) + "]"] = ent.E;
        rep.metrics["N[" + std::to_string(ent.eps) + "]"] = ent.N;
    }
    rep.series.push_back(std::move(sweep));
    rep.series.push_back(std::move(series));
    rep.figures.push_back({"convergence_sweep", "sweep", "epsilon", {"E_sup"}, true, ""});

    if (any_fail) {
        rep.verdict = "fail";
        return rep;
    }
    if (!all_saturated) {
        rep.verdict = "inconclusive";
        rep.notes.push_back("grid saturation not reached within the N budget");
        return rep;
    }

    if (config.mismatch != 0.0) {
        bool plateau_ok = true;
        for (const auto& ent : entries) {
            rep.metrics["e0[" + std::to_string(ent.eps) + "]"] = ent.e0;
            if (std::abs(ent.E - ent.e0) > config.plateau_tol * ent.e0) plateau_ok = false;
        }
        rep.metrics["plateau_ok"] = plateau_ok ? 1.0 : 0.0;
        rep.verdict = plateau_ok ? "pass" : "fail";
        return rep;
    }

    const auto [eps_lo, eps_hi] = std::minmax_element(logeps.begin(), logeps.end());
    if (*eps_hi - *eps_lo < 1e-12) {
        rep.metrics["slope"] = 0.0;
        rep.verdict = "inconclusive";
        rep.notes.push_back("all viscosities coincide: the slope fit is degenerate");
        return rep;
    }

    const double slope = least_squares_slope(logeps, logE);
    rep.metrics["slope"] = slope;
    rep.metrics["distance_slope"] = least_squares_slope(logeps, logD);
    rep.metrics["bound_C_max"] = bound_C_max;
    rep.verdict = (slope >= config.slope_lo && slope <= config.slope_hi) ? "pass" : "fail";
    if (slope > config.slope_hi) {
        rep.notes.push_back(
            "gap decays faster than the linear-in-eps upper bound; the bound constant "
            "sup_eps E/(eps*int|dx Ubar|^2) = " +
            std::to_string(bound_C_max) + " stays finite");
    }
    return rep;
}

ExperimentReport run_weak_strong(const ExperimentConfig& config) {
    ExperimentReport rep;
    rep.kind = "weakstrong";

    struct Entry {
        int N = 0;
        double sup = 0.0;
        bool failed = false, shock = false;
        double t_shock = -1.0;
        std::string note;
        std::vector<double> times, rel;
    };
    std::vector<Entry> entries(config.grids.size());

    parallel_for(entries.size(), [&](std::size_t g) {
        Entry& ent = entries[g];
        ent.N = config.grids[g];
        const Grid1D coarse = Grid1D::make(ent.N, config.L);
        const Grid1D fine = Grid1D::make(4 * ent.N, config.L);

        const SystemSpec sysC = fresh_system(config);
        const SystemSpec sysF = fresh_system(config);
        const SolverConfig sc =
            solver_config(config, 0.0, Scheme::LocalLaxFriedrichs, config.snapshots);

        const Trajectory tc = solve(sysC, make_initial(coarse, sysC.n, config.initial), sc);
        const Trajectory tf = solve(sysF, make_initial(fine, sysF.n, config.initial), sc);
        if (!tc.ok() || !tf.ok()) {
            ent.failed = true;
            ent.note = !tc.ok() ? tc.failure->what : tf.failure->what;
            return;
        }
        if (shocked(tc, config.shock_gradient_factor)) {
            ent.shock = true;
            ent.t_shock = shock_time(tc, config.shock_gradient_factor);
            return;
        }
        for (std::size_t k = 0; k < tc.fields.size(); ++k) {
            const Field ref = restrict_to(tf.fields[k], coarse);
            const double re = rel_entropy_total(sysC, tc.fields[k], ref);
            ent.times.push_back(tc.times[k]);
            ent.rel.push_back(re);
            ent.sup = std::max(ent.sup, re);
        }
    });

    Series refinement{"refinement", {"N", "sup_rel_entropy"}, {}};
    Series series{"series", {"N", "t", "rel_entropy"}, {}};
    std::vector<double> logN, logm;
    bool decreasing = true, any_fail = false, any_shock = false;
    double prev = -1.0;
    for (const auto& ent : entries) {
        if (ent.failed) {
            any_fail = true;
            rep.notes.push_back("solver failure at N=" + std::to_string(ent.N) + ": " + ent.note);
            continue;
        }
        if (ent.shock) {
            any_shock = true;
            rep.notes.push_back("gradient blow-up at N=" + std::to_string(ent.N) + ", t=" +
                                std::to_string(ent.t_shock));
            continue;
        }
        refinement.rows.push_back({static_cast<double>(ent.N), ent.sup});
        for (std::size_t k = 0; k < ent.times.size(); ++k)
            series.rows.push_back({static_cast<double>(ent.N), ent.times[k], ent.rel[k]});
        logN.push_back(std::log(ent.N));
        logm.push_back(std::log(std::max(ent.sup, 1e-300)));
        if (prev >= 0.0 && ent.sup >= prev) decreasing = false;
        prev = ent.sup;
        rep.metrics["sup[" + std::to_string(ent.N) + "]"] = ent.sup;
    }
    rep.series.push_back(std::move(refinement));
    rep.series.push_back(std::move(series));
    rep.figures.push_back({"weakstrong_refinement", "refinement", "N", {"sup_rel_entropy"}, true, ""});

    if (any_fail) {
        rep.verdict = "fail";
        return rep;
    }
    if (any_shock || logN.size() < 2) {
        rep.verdict = "inconclusive";
        return rep;
    }
    const double order = -least_squares_slope(logN, logm);
    rep.metrics["order"] = order;
    rep.verdict = (decreasing && order >= config.ws_order_min) ? "pass" : "fail";
    return rep;
}

ExperimentReport run_identity_check(const ExperimentConfig& config) {
    ExperimentReport rep;
    rep.kind = "identity";
    const SystemSpec probe = fresh_system(config);
    if (probe.memory)
        throw Error("identity ledger: fading-memory sources cannot be re-evaluated post hoc");
    const double eps = config.epsilons.empty() ? 1e-2 : config.epsilons.front();

    struct Entry {
        int N = 0;
        double res_integral = 0.0, minD = 0.0, maxQ789 = 0.0;
        bool failed = false;
        std::string note;
        std::vector<IdentityLedgerRow> rows;
    };
    std::vector<Entry> entries(config.grids.size());
    const int base_N = config.grids.front();

    parallel_for(entries.size(), [&](std::size_t g) {
        Entry& ent = entries[g];
        ent.N = config.grids[g];
        const Grid1D grid = Grid1D::make(ent.N, config.L);
        // snapshot cadence shrinks with dx so the centered dE/dt keeps order
        const int snaps = std::max(11, config.snapshots * ent.N / base_N + 1);
        const SolverConfig sc = solver_config(config, eps, Scheme::Central, snaps);

        const SystemSpec sys = fresh_system(config);
        const Field U0 = make_initial(grid, sys.n, config.initial);
        const Field Ubar0 = perturbed(U0, config.delta, sys.n);
        const Trajectory tu = solve(sys, U0, sc);
        const Trajectory tb = solve(sys, Ubar0, sc);
        if (!tu.ok() || !tb.ok()) {
            ent.failed = true;
            ent.note = !tu.ok() ? tu.failure->what : tb.failure->what;
            return;
        }

        ent.rows = identity_ledger(sys, tu, tb, eps);
        const double dt_snap = config.t_end / (snaps - 1);
        ent.minD = std::numeric_limits<double>::infinity();
        for (const auto& row : ent.rows) {
            ent.res_integral += std::abs(row.residual) * dt_snap;
            ent.minD = std::min(ent.minD, row.epsD);
            ent.maxQ789 = std::max({ent.maxQ789, std::abs(row.epsQ[6]), std::abs(row.epsQ[7]),
                                    std::abs(row.epsQ[8])});
        }
    });

    bool any_fail = false;
    std::vector<double> logN, logI;
    double minD = std::numeric_limits<double>::infinity();
    double maxQ789 = 0.0;
    Series orders{"orders", {"N", "residual_l1"}, {}};
    for (auto& ent : entries) {
        if (ent.failed) {
            any_fail = true;
            rep.notes.push_back("solver failure at N=" + std::to_string(ent.N) + ": " + ent.note);
            continue;
        }
        orders.rows.push_back({static_cast<double>(ent.N), ent.res_integral});
        logN.push_back(std::log(ent.N));
        logI.push_back(std::log(std::max(ent.res_integral, 1e-300)));
        minD = std::min(minD, ent.minD);
        maxQ789 = std::max(maxQ789, ent.maxQ789);
        rep.metrics["residual_l1[" + std::to_string(ent.N) + "]"] = ent.res_integral;

        Series ledger{"ledger_N" + std::to_string(ent.N),
                      {"t", "dEdt", "source_diff", "flux_rel", "mult_rel", "inhom", "epsD",
                       "epsQ1", "epsQ2", "epsQ3", "epsQ4", "epsQ5", "epsQ6", "epsQ7", "epsQ8",
                       "epsQ9", "j_divergence", "residual"},
                      {}};
        for (const auto& row : ent.rows) {
            std::vector<double> r{row.time,   row.dEdt,  row.source_diff, row.flux_rel,
                                  row.mult_rel, row.inhom, row.epsD};
            for (double qv : row.epsQ) r.push_back(qv);
            r.push_back(row.j_divergence);
            r.push_back(row.residual);
            ledger.rows.push_back(std::move(r));
        }
        rep.series.push_back(std::move(ledger));
    }
    rep.series.push_back(std::move(orders));
    rep.figures.push_back({"identity_orders", "orders", "N", {"residual_l1"}, true, ""});
    if (!entries.empty() && !entries.back().failed) {
        rep.figures.push_back({"identity_ledger", "ledger_N" + std::to_string(entries.back().N),
                               "t",
                               {"dEdt", "source_diff", "flux_rel", "mult_rel", "inhom", "epsD",
                                "residual"},
                               false,
                               ""});
    }

    if (any_fail || logN.size() < 2) {
        rep.verdict = "fail";
        return rep;
    }
    const double order = -least_squares_slope(logN, logI);
    rep.metrics["order"] = order;
    rep.metrics["min_epsD"] = minD;
    rep.metrics["max_absQ789"] = maxQ789;

    const bool d_sign_ok = minD >= -1e-12;
    rep.verdict = (order >= config.order_min && d_sign_ok) ? "pass" : "fail";
    if (!d_sign_ok) rep.notes.push_back("eps*int D went negative: dissipative structure violated");
    return rep;
}

ExperimentReport run_hypothesis_audit(const ExperimentConfig& config) {
    ExperimentReport rep;
    rep.kind = "audit";

    const SystemSpec sys = fresh_system(config);
    const SampleCloud cloud = make_cloud(sys, config.cloud);
    const HypothesisReport audit = audit_sampled(sys, cloud, config.audit);
    rep.hypothesis_records = audit.records;
    rep.metrics["samples"] = audit.sample_count;

    int trend_passes = 0;
    bool required_ok = true;
    for (const std::string& id : config.required_hypotheses) {
        if (!audit.has(id)) {
            required_ok = false;
            rep.notes.push_back("required hypothesis " + id + " was not audited");
            continue;
        }
        const auto& r = audit.find(id);
        if (r.verdict == Verdict::Fail) {
            required_ok = false;
            rep.notes.push_back("required hypothesis " + id + " failed: " + r.witness);
        }
    }
    for (const auto& r : audit.records)
        if (r.verdict == Verdict::TrendPass) ++trend_passes;
    rep.metrics["trend_passes"] = trend_passes;

    Series samples{"samples", {"absU", "x", "t", "h2_residual", "h3_lambda_min"}, {}};
    for (const auto& row : audit.samples)
        samples.rows.push_back({row[0], row[1], row[2], row[3], row[4]});
    rep.series.push_back(std::move(samples));
    rep.figures.push_back(
        {"audit_h3_spectrum", "samples", "absU", {"h3_lambda_min"}, false, "", true});

    // Lemma-style distance bounds, reported alongside the hypothesis audit.
    try {
        LemmaAuditConfig lc;
        lc.M = config.cloud.M;
        lc.U_max = config.cloud.U_max;
        lc.shells = std::max(config.cloud.shells, 2);
        lc.samples_per_shell = std::max(config.cloud.state_samples / std::max(lc.shells, 1), 32);
        lc.ball_samples = std::max(config.cloud.pair_samples, 32);
        lc.xt_points = config.cloud.xt_points;
        lc.T = config.cloud.T;
        lc.domain_length = config.cloud.domain_length;
        lc.seed = config.seed ^ 0xa5a5a5a5ull;
        StateSampler sampler(sys.n, sys.inadmissible, lc.seed);
        const LemmaAuditReport lemma = lemma_bounds_audit(sys, sampler, lc);
        rep.metrics["lemma_c1"] = lemma.c1;
        rep.metrics["lemma_c2"] = lemma.c2;
        rep.metrics["lemma_c1p"] = lemma.c1p;
        rep.metrics["lemma_c2p"] = lemma.c2p;
        rep.metrics["lemma_c3"] = lemma.c3;
        rep.metrics["lemma_equiv_upper"] = lemma.equiv_upper;
        rep.metrics["lemma_r1"] = lemma.r1;
        rep.metrics["lemma_r2"] = lemma.r2;
        Series ratios{"lemma_ratios",
                      {"absU", "dist", "rel_entropy", "eta", "rel_flux", "rel_multiplier"},
                      {}};
        for (const auto& row : lemma.samples)
            ratios.rows.push_back({row[0], row[1], row[2], row[3], row[4], row[5]});
        rep.series.push_back(std::move(ratios));
    } catch (const ConvexityViolation& e) {
        required_ok = false;
        rep.notes.push_back(std::string("lemma audit: ") + e.what());
    }

    rep.verdict = required_ok ? "pass" : "fail";
    return rep;
}

}  // namespace relent
