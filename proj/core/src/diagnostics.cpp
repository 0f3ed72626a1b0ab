#include "relent/diagnostics.hpp"

#include <cmath>

#include "relent/relative.hpp"

namespace relent {

double total_entropy(const SystemSpec& spec, const Field& field) {
    double acc = 0.0;
    for (int i = 0; i < field.grid.N; ++i)
        acc += spec.eta(field.U[i], field.grid.center(i), field.time);
    return acc * field.grid.dx();
}

double rel_entropy_total(const SystemSpec& spec, const Field& U, const Field& Ubar) {
    if (!(U.grid == Ubar.grid)) throw LedgerError("rel_entropy_total: grids differ");
    double acc = 0.0;
    for (int i = 0; i < U.grid.N; ++i)
        acc += rel_entropy(spec, U.U[i], Ubar.U[i], U.grid.center(i), U.time);
    return acc * U.grid.dx();
}

double D_total(const SystemSpec& spec, const Field& U, const Field& Ubar) {
    if (!(U.grid == Ubar.grid)) throw LedgerError("D_total: grids differ");
    const int N = U.grid.N;
    const double dx = U.grid.dx();
    double acc = 0.0;
    for (int i = 0; i < N; ++i) {
        const int ip = U.grid.wrap(i + 1), im = U.grid.wrap(i - 1);
        const Vec grad_diff =
            ((U.U[ip] - Ubar.U[ip]) - (U.U[im] - Ubar.U[im])) / (2.0 * dx);
        const double x = U.grid.center(i);
        const Mat dG = spec.dG(U.U[i], x, U.time);
        const Mat B = spec.B[0][0](U.U[i], x, U.time);
        acc += (dG * grad_diff).dot(B * grad_diff);
    }
    return acc * dx;
}

std::array<double, 9> Q_terms(const SystemSpec& spec, const Vec& U, const Vec& Ubar,
                              const Vec& gradU, const Vec& gradUbar, const Vec& lapUbar,
                              double x, double t) {
    if (spec.d != 1) throw Error("Q_terms: implemented for one flux direction");

    Vec phi;
    Mat G1;
    std::vector<Vec> G2;
    rel_remainders(spec, U, Ubar, x, t, phi, G1, G2);

    const Mat dG_U = spec.dG(U, x, t);
    const Mat dG_b = spec.dG(Ubar, x, t);
    const Mat B_U = spec.B[0][0](U, x, t);
    const Mat B_b = spec.B[0][0](Ubar, x, t);
    const Vec Gx_U = spec.G_x[0](U, x, t);
    const Vec Gx_b = spec.G_x[0](Ubar, x, t);

    const Vec Bb_gradUbar = B_b * gradUbar;
    const Vec grad_diff = gradU - gradUbar;

    // x-derivative (along Ubar) of dG(Ubar)^T B(Ubar) gradUbar, by the chain rule
    const Tensor3 d2G_b = spec.d2G(Ubar, x, t);
    Mat ddx_dGb = spec.dG_x[0](Ubar, x, t);
    for (int i = 0; i < spec.n; ++i) ddx_dGb.row(i) += (d2G_b[i] * gradUbar).transpose();
    Mat ddx_Bb = spec.B_x[0][0](Ubar, x, t);
    const Tensor3 dB_b = spec.dB[0][0](Ubar, x, t);
    for (int k = 0; k < spec.n; ++k) ddx_Bb += gradUbar[k] * dB_b[k];
    const Vec ddx_S = ddx_dGb.transpose() * Bb_gradUbar + dG_b.transpose() * (ddx_Bb * gradUbar) +
                      dG_b.transpose() * (B_b * lapUbar);

    std::array<double, 9> Q{};
    Q[0] = -ddx_S.dot(phi);
    Q[1] = -Bb_gradUbar.dot((dG_U - dG_b) * grad_diff);
    Q[2] = -Bb_gradUbar.dot(G1 * gradUbar);
    Q[3] = -(dG_U * grad_diff).dot((B_U - B_b) * gradUbar);
    Q[4] = -((dG_U - dG_b) * gradUbar).dot(B_U * grad_diff);
    Q[5] = -((dG_U - dG_b) * gradUbar).dot((B_U - B_b) * gradUbar);
    Q[6] = -(Gx_U - Gx_b).dot(B_U * grad_diff);
    Q[7] = -(Gx_U - Gx_b).dot((B_U - B_b) * gradUbar);
    Q[8] = -Bb_gradUbar.dot(G2[0]);
    return Q;
}

namespace {

Vec central_grad(const Field& f, int i) {
    const int ip = f.grid.wrap(i + 1), im = f.grid.wrap(i - 1);
    return (f.U[ip] - f.U[im]) / (2.0 * f.grid.dx());
}

Vec central_lap(const Field& f, int i) {
    const int ip = f.grid.wrap(i + 1), im = f.grid.wrap(i - 1);
    return (f.U[ip] - 2.0 * f.U[i] + f.U[im]) / (f.grid.dx() * f.grid.dx());
}

}  // namespace

std::vector<IdentityLedgerRow> identity_ledger(const SystemSpec& spec, const Trajectory& U,
                                               const Trajectory& Ubar, double epsilon) {
    if (U.times.size() != Ubar.times.size())
        throw LedgerError("identity ledger: snapshot counts differ");
    const std::size_t K = U.times.size();
    if (K < 3) throw LedgerError("identity ledger: need at least 3 snapshots");
    for (std::size_t k = 0; k < K; ++k) {
        if (!(U.fields[k].grid == Ubar.fields[k].grid))
            throw LedgerError("identity ledger: mismatched grids");
        if (std::abs(U.times[k] - Ubar.times[k]) > 1e-12)
            throw LedgerError("identity ledger: snapshot times differ");
    }

    std::vector<double> E(K);
    for (std::size_t k = 0; k < K; ++k)
        E[k] = rel_entropy_total(spec, U.fields[k], Ubar.fields[k]);

    std::vector<IdentityLedgerRow> rows;
    rows.reserve(K - 2);
    const bool viscous = !spec.B.empty() && static_cast<bool>(spec.B[0][0]);

    for (std::size_t k = 1; k + 1 < K; ++k) {
        const Field& u = U.fields[k];
        const Field& ub = Ubar.fields[k];
        const int N = u.grid.N;
        const double dx = u.grid.dx();
        const double t = U.times[k];

        IdentityLedgerRow row;
        row.time = t;
        row.dEdt = (E[k + 1] - E[k - 1]) / (U.times[k + 1] - U.times[k - 1]);

        std::vector<double> jflux(viscous ? N : 0, 0.0);

        for (int i = 0; i < N; ++i) {
            const double x = u.grid.center(i);
            const Vec& Ui = u.U[i];
            const Vec& Ubi = ub.U[i];

            const Vec R = eval_R(spec, Ui, x, t);
            const Vec Rbar = eval_R(spec, Ubi, x, t);
            const Vec G = spec.G(Ui, x, t);
            const Vec Gbar = spec.G(Ubi, x, t);
            row.source_diff += (G - Gbar).dot(R - Rbar) * dx;

            const Vec gradUbar = central_grad(ub, i);
            const std::vector<Vec> relf = rel_flux(spec, Ui, Ubi, x, t);
            const Vec relG = rel_multiplier(spec, Ui, Ubi, x, t);
            const Mat dGbar = spec.dG(Ubi, x, t);
            row.flux_rel += (dGbar * gradUbar).dot(relf[0]) * dx;
            row.mult_rel += Rbar.dot(relG) * dx;

            double inhom = spec.eta_t(Ui, x, t) + spec.q_x[0](Ui, x, t) -
                           spec.eta_t(Ubi, x, t) - spec.q_x[0](Ubi, x, t);
            inhom -= Gbar.dot(spec.A_t(Ui, x, t) + spec.f_x[0](Ui, x, t) -
                              spec.A_t(Ubi, x, t) - spec.f_x[0](Ubi, x, t));
            inhom -= spec.G_t(Ubi, x, t).dot(spec.A(Ui, x, t) - spec.A(Ubi, x, t));
            inhom -= spec.G_x[0](Ubi, x, t).dot(spec.f[0](Ui, x, t) - spec.f[0](Ubi, x, t));
            row.inhom += inhom * dx;

            if (viscous && epsilon != 0.0) {
                const Vec gradU = central_grad(u, i);
                const Vec lapUbar = central_lap(ub, i);
                const Vec grad_diff = gradU - gradUbar;
                const Mat dG_U = spec.dG(Ui, x, t);
                const Mat B_U = spec.B[0][0](Ui, x, t);
                row.epsD += epsilon * (dG_U * grad_diff).dot(B_U * grad_diff) * dx;

                const auto Q = Q_terms(spec, Ui, Ubi, gradU, gradUbar, lapUbar, x, t);
                for (int m = 0; m < 9; ++m) row.epsQ[m] += epsilon * Q[m] * dx;

                Vec phi;
                Mat G1;
                std::vector<Vec> G2;
                rel_remainders(spec, Ui, Ubi, x, t, phi, G1, G2);
                const Mat B_b = spec.B[0][0](Ubi, x, t);
                const Vec Bb_gradUbar = B_b * gradUbar;
                jflux[i] = (G - Gbar).dot(B_U * gradU - Bb_gradUbar) +
                           Bb_gradUbar.dot(relG) + Bb_gradUbar.dot(dGbar * phi);
            }
        }

        if (viscous && epsilon != 0.0) {
            for (int i = 0; i < N; ++i) {
                const int ip = u.grid.wrap(i + 1), im = u.grid.wrap(i - 1);
                row.j_divergence += (jflux[ip] - jflux[im]) / (2.0 * dx) * dx;
            }
            row.j_divergence *= epsilon;
        }

        for (double v : row.epsQ) row.epsQ_total += v;
        row.residual = row.dEdt + row.source_diff + row.epsD + row.flux_rel + row.mult_rel -
                       row.inhom - row.epsQ_total;
        rows.push_back(row);
    }
    return rows;
}

GronwallFit gronwall_fit(const std::vector<double>& series, const std::vector<double>& times,
                         double tol, double abs_floor) {
    if (series.size() != times.size()) throw AuditError("gronwall fit: size mismatch");
    if (series.size() < 10) throw AuditError("gronwall fit: need at least 10 snapshots");

    GronwallFit fit;
    fit.tol = tol;
    fit.initial = series.front();

    // increasing envelope
    std::vector<double> env(series.size());
    double running = series.front();
    for (std::size_t k = 0; k < series.size(); ++k) {
        running = std::max(running, series[k]);
        env[k] = running;
    }

    const double floor_val = std::max(abs_floor, 0.0);
    if (env.back() <= floor_val) {
        fit.rate = 0.0;  // series never rises above the noise floor
        return fit;
    }

    // slope of log(env) - log(env[0]) against t - t0, anchored at the start
    const double e0 = std::max(env.front(), 1e-300);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 1; k < series.size(); ++k) {
        const double dt = times[k] - times.front();
        const double dl = std::log(std::max(env[k], 1e-300)) - std::log(e0);
        num += dt * dl;
        den += dt * dt;
    }
    fit.rate = den > 0.0 ? num / den : 0.0;

    for (std::size_t k = 0; k < series.size(); ++k) {
        const double bound =
            fit.initial * std::exp(fit.rate * (times[k] - times.front())) * (1.0 + tol);
        if (series[k] > bound + floor_val) {
            fit.violation = true;
            break;
        }
    }
    return fit;
}

}  // namespace relent
