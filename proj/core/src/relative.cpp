#include "relent/relative.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace relent {

double rel_entropy(const SystemSpec& spec, const Vec& U, const Vec& Ubar, double x, double t) {
    return spec.eta(U, x, t) - spec.eta(Ubar, x, t) -
           spec.G(Ubar, x, t).dot(spec.A(U, x, t) - spec.A(Ubar, x, t));
}

std::vector<double> rel_entropy_flux(const SystemSpec& spec, const Vec& U, const Vec& Ubar,
                                     double x, double t) {
    const Vec Gbar = spec.G(Ubar, x, t);
    std::vector<double> out(spec.d);
    for (int a = 0; a < spec.d; ++a) {
        out[a] = spec.q[a](U, x, t) - spec.q[a](Ubar, x, t) -
                 Gbar.dot(spec.f[a](U, x, t) - spec.f[a](Ubar, x, t));
    }
    return out;
}

namespace {

/// dA(Ubar)^{-1} (A(U) - A(Ubar)), the expansion variable shared by the
/// quadratic remainders.
Vec conserved_increment(const SystemSpec& spec, const Vec& U, const Vec& Ubar, double x,
                        double t) {
    const Vec dV = spec.A(U, x, t) - spec.A(Ubar, x, t);
    return spec.dA(Ubar, x, t).partialPivLu().solve(dV);
}

}  // namespace

std::vector<Vec> rel_flux(const SystemSpec& spec, const Vec& U, const Vec& Ubar, double x,
                          double t) {
    const Vec w = conserved_increment(spec, U, Ubar, x, t);
    std::vector<Vec> out(spec.d);
    for (int a = 0; a < spec.d; ++a) {
        out[a] = spec.f[a](U, x, t) - spec.f[a](Ubar, x, t) - spec.df[a](Ubar, x, t) * w;
    }
    return out;
}

Vec rel_multiplier(const SystemSpec& spec, const Vec& U, const Vec& Ubar, double x, double t) {
    const Vec w = conserved_increment(spec, U, Ubar, x, t);
    return spec.G(U, x, t) - spec.G(Ubar, x, t) - spec.dG(Ubar, x, t) * w;
}

void rel_remainders(const SystemSpec& spec, const Vec& U, const Vec& Ubar, double x, double t,
                    Vec& phi, Mat& G1, std::vector<Vec>& G2) {
    const Vec w = conserved_increment(spec, U, Ubar, x, t);
    phi = w - (U - Ubar);

    const Tensor3 d2Gbar = spec.d2G(Ubar, x, t);
    G1 = spec.dG(U, x, t) - spec.dG(Ubar, x, t);
    for (int i = 0; i < spec.n; ++i) G1.row(i) -= (d2Gbar[i] * w).transpose();

    G2.resize(spec.d);
    for (int a = 0; a < spec.d; ++a) {
        G2[a] = spec.G_x[a](U, x, t) - spec.G_x[a](Ubar, x, t) - spec.dG_x[a](Ubar, x, t) * w;
    }
}

RelativeQuantities relative_quantities(const SystemSpec& spec, const Vec& U, const Vec& Ubar,
                                       double x, double t) {
    RelativeQuantities rq;
    rq.rel_eta = rel_entropy(spec, U, Ubar, x, t);
    rq.rel_q = rel_entropy_flux(spec, U, Ubar, x, t);
    rq.rel_f = rel_flux(spec, U, Ubar, x, t);
    rq.rel_G = rel_multiplier(spec, U, Ubar, x, t);
    rel_remainders(spec, U, Ubar, x, t, rq.phi, rq.G1, rq.G2);
    return rq;
}

namespace {

struct RatioTracker {
    double worst = std::numeric_limits<double>::infinity();  // for lower bounds (min)
    double best = 0.0;                                       // for upper bounds (max)
    void lower(double v) { worst = std::min(worst, v); }
    void upper(double v) { best = std::max(best, v); }
};

}  // namespace

LemmaAuditReport lemma_bounds_audit(const SystemSpec& spec, StateSampler& sampler,
                                    const LemmaAuditConfig& config) {
    if (config.shells < 1) throw AuditError("lemma audit: need at least one shell");
    LemmaAuditReport rep;
    rep.M = config.M;
    rep.p = config.p;

    std::vector<std::pair<double, double>> points;
    for (int j = 0; j < config.xt_points; ++j) {
        points.emplace_back(sampler.rng().uniform(0.0, config.domain_length),
                            sampler.rng().uniform(0.0, config.T));
    }
    if (points.empty()) points.emplace_back(0.0, 0.0);

    std::vector<Vec> refs;
    for (int i = 0; i < config.ball_samples; ++i) refs.push_back(sampler.draw_ball(config.M));

    // Shell edges grow geometrically from M to U_max.
    std::vector<double> edges{config.M};
    const double growth = std::pow(config.U_max / config.M, 1.0 / config.shells);
    for (int k = 1; k <= config.shells; ++k) edges.push_back(config.M * std::pow(growth, k));

    struct ShellStats {
        RatioTracker c2;        // eta(U|Ubar)/eta(U)
        RatioTracker c2p;       // eta(U|Ubar)/|U-Ubar|^p
        RatioTracker c3;        // |f(U|Ubar)|/eta(U|Ubar)
        RatioTracker c3_src;    // |(G-Gbar).(R-Rbar)|/eta(U|Ubar)
        RatioTracker c3_mult;   // |G(U|Ubar)|/eta(U|Ubar)
    };
    std::vector<ShellStats> shells(config.shells);

    RatioTracker near_c1, near_c1p, near_upper;

    auto visit = [&](const Vec& U, const Vec& Ubar, double x, double t, ShellStats* shell) {
        const double re = rel_entropy(spec, U, Ubar, x, t);
        const double du2 = (U - Ubar).squaredNorm();
        if (du2 == 0.0) return;
        if (re <= 0.0) {
            LemmaAuditReport::Violation v;
            v.U = U;
            v.Ubar = Ubar;
            v.x = x;
            v.t = t;
            v.value = re;
            v.what = "nonpositive relative entropy";
            rep.violations.push_back(v);
            throw ConvexityViolation(
                spec.name + ": relative entropy " + std::to_string(re) +
                    " <= 0 at distinct states (convexity hypothesis fails)",
                U, Ubar, re);
        }
        rep.sample_count++;

        const double dA2 = (spec.A(U, x, t) - spec.A(Ubar, x, t)).squaredNorm();
        double relf = 0.0;
        for (const Vec& rf : rel_flux(spec, U, Ubar, x, t)) relf = std::max(relf, rf.norm());
        const double relg = rel_multiplier(spec, U, Ubar, x, t).norm();
        rep.samples.push_back(
            {U.norm(), std::sqrt(du2), re, spec.eta(U, x, t), relf, relg});
        const double src = std::abs((spec.G(U, x, t) - spec.G(Ubar, x, t))
                                        .dot(eval_R(spec, U, x, t) - eval_R(spec, Ubar, x, t)));

        if (shell == nullptr) {
            if (dA2 > 0.0) near_c1.lower(re / dA2);
            near_c1p.lower(re / du2);
            near_upper.upper(re / du2);
        } else {
            const double etaU = spec.eta(U, x, t);
            if (etaU > 0.0) shell->c2.lower(re / etaU);
            shell->c2p.lower(re / std::pow(std::sqrt(du2), config.p));
            shell->c3.upper(relf / re);
            shell->c3_src.upper(src / re);
            shell->c3_mult.upper(relg / re);
        }
        // c3-type bounds hold for all U, so track them near the ball too.
        if (shell == nullptr) {
            shells.front().c3.upper(relf / re);
            shells.front().c3_src.upper(src / re);
            shells.front().c3_mult.upper(relg / re);
        }
    };

    // Near samples: pairs inside B_M.
    for (const Vec& Ubar : refs) {
        const auto& [x, t] = points[rep.sample_count % points.size()];
        const Vec U = sampler.draw_ball(config.M);
        if ((U - Ubar).squaredNorm() > 0.0) visit(U, Ubar, x, t, nullptr);
    }

    // Shell samples against ball references.
    for (int k = 0; k < config.shells; ++k) {
        int drawn = 0;
        for (int i = 0; i < config.samples_per_shell; ++i) {
            const Vec U = sampler.draw_shell(edges[k], edges[k + 1]);
            const Vec& Ubar = refs[(k * config.samples_per_shell + i) % refs.size()];
            const auto& [x, t] = points[i % points.size()];
            visit(U, Ubar, x, t, &shells[k]);
            ++drawn;
        }
        if (drawn == 0) throw AuditError("lemma audit: empty shell " + std::to_string(k));
    }

    // Grow r1 (and r2) until the shell ratios stabilize.
    auto pick_radius = [&](auto stat_of) {
        int chosen = config.shells - 1;
        for (int k = 0; k + 1 < config.shells; ++k) {
            const double here = stat_of(shells[k]);
            const double next = stat_of(shells[k + 1]);
            if (here > 0.0 && std::isfinite(here) &&
                std::abs(next - here) <= config.stabilize_tol * std::abs(here)) {
                chosen = k;
                break;
            }
        }
        return chosen;
    };
    const int k1 = pick_radius([](const ShellStats& s) { return s.c2.worst; });
    const int k2 = pick_radius([](const ShellStats& s) { return s.c2p.worst; });
    rep.r1 = edges[k1];
    rep.r2 = edges[k2];

    rep.c1 = near_c1.worst;
    rep.c1p = near_c1p.worst;
    rep.equiv_upper = near_upper.best;

    RatioTracker far_c2, far_c2p, all_c3, all_src, all_mult;
    for (int k = 0; k < config.shells; ++k) {
        if (k >= k1) far_c2.lower(shells[k].c2.worst);
        if (k >= k2) far_c2p.lower(shells[k].c2p.worst);
        all_c3.upper(shells[k].c3.best);
        all_src.upper(shells[k].c3_src.best);
        all_mult.upper(shells[k].c3_mult.best);
    }
    rep.c2 = far_c2.worst;
    rep.c2p = far_c2p.worst;
    rep.c3 = all_c3.best;
    rep.c3_source = all_src.best;
    rep.c3_mult = all_mult.best;
    return rep;
}

}  // namespace relent
