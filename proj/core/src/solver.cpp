#include "relent/solver.hpp"

#include <algorithm>
#include <cmath>

#include "relent/builtins.hpp"

namespace relent {

namespace {

double spectral_radius(const Mat& M) {
    Eigen::EigenSolver<Mat> es(M, /*computeEigenvectors=*/false);
    double r = 0.0;
    for (int i = 0; i < M.rows(); ++i) r = std::max(r, std::abs(es.eigenvalues()[i]));
    return r;
}

double spectral_norm(const Mat& M) {
    Eigen::JacobiSVD<Mat> svd(M);
    return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

void check_1d(const SystemSpec& spec) {
    if (spec.d != 1) throw Error("solver: the reference solver is one-dimensional");
}

[[noreturn]] void rethrow_with_cell(const DomainError& e, int cell) {
    throw DomainError(std::string(e.what()) + " (cell " + std::to_string(cell) + ")");
}

}  // namespace

std::vector<Vec> semidiscrete_rhs(const SystemSpec& spec, const Field& field, double epsilon,
                                  Scheme scheme) {
    check_1d(spec);
    const int N = field.grid.N;
    const double dx = field.grid.dx();
    const double t = field.time;

    std::vector<Vec> flux(N), rhs(N);
    std::vector<Vec> V;
    std::vector<double> speed;
    for (int i = 0; i < N; ++i) {
        try {
            flux[i] = spec.f[0](field.U[i], field.grid.center(i), t);
        } catch (const DomainError& e) {
            rethrow_with_cell(e, i);
        }
    }
    if (scheme == Scheme::LocalLaxFriedrichs) {
        V.resize(N);
        speed.resize(N);
        for (int i = 0; i < N; ++i) {
            const double x = field.grid.center(i);
            V[i] = spec.A(field.U[i], x, t);
            const Mat dA = spec.dA(field.U[i], x, t);
            const Mat df = spec.df[0](field.U[i], x, t);
            speed[i] = spectral_radius(dA.partialPivLu().solve(df));
        }
    }

    for (int i = 0; i < N; ++i) {
        const int ip = field.grid.wrap(i + 1);
        const int im = field.grid.wrap(i - 1);
        const double x = field.grid.center(i);

        Vec div;
        if (scheme == Scheme::Central) {
            div = (flux[ip] - flux[im]) / (2.0 * dx);
        } else {
            const double a_plus = std::max(speed[i], speed[ip]);
            const double a_minus = std::max(speed[im], speed[i]);
            const Vec F_plus = 0.5 * (flux[i] + flux[ip]) - 0.5 * a_plus * (V[ip] - V[i]);
            const Vec F_minus = 0.5 * (flux[im] + flux[i]) - 0.5 * a_minus * (V[i] - V[im]);
            div = (F_plus - F_minus) / dx;
        }

        Vec source;
        try {
            source = spec.P(field.U[i], x, t);
        } catch (const DomainError& e) {
            rethrow_with_cell(e, i);
        }

        rhs[i] = -div - source;

        if (epsilon != 0.0 && !spec.B.empty() && spec.B[0][0]) {
            const double x_plus = (i + 1) * dx;
            const double x_minus = i * dx;
            const Mat B_plus = 0.5 * (spec.B[0][0](field.U[i], x_plus, t) +
                                      spec.B[0][0](field.U[ip], x_plus, t));
            const Mat B_minus = 0.5 * (spec.B[0][0](field.U[im], x_minus, t) +
                                       spec.B[0][0](field.U[i], x_minus, t));
            rhs[i] += epsilon *
                      (B_plus * (field.U[ip] - field.U[i]) - B_minus * (field.U[i] - field.U[im])) /
                      (dx * dx);
        }
    }
    return rhs;
}

double stable_dt(const SystemSpec& spec, const Field& field, double epsilon,
                 const SolverConfig& config) {
    check_1d(spec);
    const double dx = field.grid.dx();
    const double t = field.time;

    double lambda_max = 0.0;
    double beta_max = 0.0;
    const bool viscous = epsilon != 0.0 && !spec.B.empty() && static_cast<bool>(spec.B[0][0]);
    for (int i = 0; i < field.grid.N; ++i) {
        const double x = field.grid.center(i);
        const Mat dA = spec.dA(field.U[i], x, t);
        const auto lu = dA.partialPivLu();
        lambda_max = std::max(lambda_max, spectral_radius(lu.solve(spec.df[0](field.U[i], x, t))));
        if (viscous) beta_max = std::max(beta_max, spectral_norm(lu.solve(spec.B[0][0](field.U[i], x, t))));
    }

    constexpr double tiny = 1e-30;
    const double hyperbolic = lambda_max > 0.0 ? dx / lambda_max
                                               : std::numeric_limits<double>::infinity();
    const double parabolic = dx * dx / (2.0 * epsilon * beta_max + tiny);
    double dt = config.cfl * std::min(hyperbolic, parabolic);
    const double cap = std::max(config.t_end, 0.0) * config.max_dt_fraction;
    if (cap > 0.0) dt = std::min(dt, cap);
    return dt;
}

namespace {

std::vector<Vec> conserved_of(const SystemSpec& spec, const Field& field) {
    std::vector<Vec> V(field.grid.N);
    for (int i = 0; i < field.grid.N; ++i)
        V[i] = spec.A(field.U[i], field.grid.center(i), field.time);
    return V;
}

Field invert_all(const SystemSpec& spec, const Grid1D& grid, const std::vector<Vec>& V,
                 const Field& guess, double t_new, const SolverConfig& config) {
    Field out = guess;
    out.time = t_new;
    for (int i = 0; i < grid.N; ++i) {
        try {
            out.U[i] = invert_A(spec, V[i], grid.center(i), t_new, guess.U[i], config.newton_tol,
                                config.newton_iters);
        } catch (const InversionError& e) {
            throw StepError("time step: inversion failed at cell " + std::to_string(i) + ": " +
                                e.what(),
                            i);
        } catch (const DomainError& e) {
            rethrow_with_cell(e, i);
        }
    }
    return out;
}

std::vector<Vec> axpy(const std::vector<Vec>& V, double a, const std::vector<Vec>& K) {
    std::vector<Vec> out(V.size());
    for (std::size_t i = 0; i < V.size(); ++i) out[i] = V[i] + a * K[i];
    return out;
}

}  // namespace

Field time_step(const SystemSpec& spec, const Field& field, double dt,
                const SolverConfig& config) {
    check_1d(spec);
    const double t = field.time;
    const Grid1D& grid = field.grid;

    if (spec.memory) {
        if (spec.memory->history.times.empty()) {
            spec.memory->history.cells = grid.N;
            spec.memory->domain_length = grid.L;
            spec.memory->frozen.assign(grid.N, 0.0);
            spec.memory->history.append(t, field.U);
        }
        spec.memory->freeze(t);
    }

    const std::vector<Vec> V0 = conserved_of(spec, field);
    Field next = field;

    if (config.integrator == Integrator::SspRk2) {
        const std::vector<Vec> k1 = semidiscrete_rhs(spec, field, config.epsilon, config.scheme);
        const std::vector<Vec> V1 = axpy(V0, dt, k1);
        const Field u1 = invert_all(spec, grid, V1, field, t + dt, config);
        const std::vector<Vec> k2 = semidiscrete_rhs(spec, u1, config.epsilon, config.scheme);
        std::vector<Vec> V2(grid.N);
        for (int i = 0; i < grid.N; ++i) V2[i] = 0.5 * V0[i] + 0.5 * (V1[i] + dt * k2[i]);
        next = invert_all(spec, grid, V2, u1, t + dt, config);
    } else {
        const std::vector<Vec> k1 = semidiscrete_rhs(spec, field, config.epsilon, config.scheme);
        Field ua = invert_all(spec, grid, axpy(V0, 0.5 * dt, k1), field, t + 0.5 * dt, config);
        const std::vector<Vec> k2 = semidiscrete_rhs(spec, ua, config.epsilon, config.scheme);
        Field ub = invert_all(spec, grid, axpy(V0, 0.5 * dt, k2), ua, t + 0.5 * dt, config);
        const std::vector<Vec> k3 = semidiscrete_rhs(spec, ub, config.epsilon, config.scheme);
        Field uc = invert_all(spec, grid, axpy(V0, dt, k3), ub, t + dt, config);
        const std::vector<Vec> k4 = semidiscrete_rhs(spec, uc, config.epsilon, config.scheme);
        std::vector<Vec> V4(grid.N);
        for (int i = 0; i < grid.N; ++i)
            V4[i] = V0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        next = invert_all(spec, grid, V4, uc, t + dt, config);
    }

    if (spec.memory) spec.memory->history.append(next.time, next.U);
    return next;
}

Trajectory solve(const SystemSpec& spec, const Field& initial, const SolverConfig& config,
                 const std::function<void(const Field&)>& on_snapshot) {
    check_1d(spec);
    Trajectory traj;
    for (int i = 0; i < initial.grid.N; ++i) require_admissible(spec, initial.U[i]);

    auto snap = [&](const Field& f) {
        traj.times.push_back(f.time);
        traj.fields.push_back(f);
        if (on_snapshot) on_snapshot(f);
    };

    Field field = initial;
    snap(field);
    if (config.t_end <= 0.0 || config.snapshots < 2) {
        if (config.t_end > 0.0)
            throw Error("solve: need at least 2 snapshots for a nonzero horizon");
        return traj;
    }

    const double snap_dt = config.t_end / (config.snapshots - 1);
    constexpr long kMaxSteps = 20'000'000;
    long steps = 0;
    int next_snap = 1;

    try {
        while (next_snap < config.snapshots) {
            const double target = next_snap * snap_dt;
            double dt = stable_dt(spec, field, config.epsilon, config);
            if (!(dt > 0.0)) throw Error("solve: nonpositive stable dt");
            if (field.time + dt >= target - 1e-13 * config.t_end) dt = target - field.time;
            field = time_step(spec, field, dt, config);
            traj.dt_log.push_back(dt);
            if (++steps > kMaxSteps) throw Error("solve: step budget exceeded");
            if (field.time >= target - 1e-13 * config.t_end) {
                field.time = target;  // pin cadence times against rounding drift
                snap(field);
                ++next_snap;
            }
        }
    } catch (const Error& e) {
        traj.failure = Trajectory::Failure{field.time, e.what()};
    }
    return traj;
}

Field sample_target(const Grid1D& grid, const ManufacturedTarget& target, double t) {
    Field f = Field::make(grid, static_cast<int>(target.value(0.0, 0.0).size()), t);
    for (int i = 0; i < grid.N; ++i) f.U[i] = target.value(grid.center(i), t);
    return f;
}

SystemSpec manufactured_forcing(const SystemSpec& spec, const ManufacturedTarget& target,
                                double epsilon) {
    SystemSpec out = spec;
    out.name = spec.name + "+forced";
    out.P = [spec, target, epsilon](const Vec& U, double x, double t) {
        const Vec Ustar = target.value(x, t);
        const Vec Ustar_t = target.ddt(x, t);
        const Vec Ustar_x = target.ddx(x, t);

        Vec F = spec.dA(Ustar, x, t) * Ustar_t + spec.A_t(Ustar, x, t) +
                spec.df[0](Ustar, x, t) * Ustar_x + spec.f_x[0](Ustar, x, t) +
                spec.P(Ustar, x, t);
        if (epsilon != 0.0 && !spec.B.empty() && spec.B[0][0]) {
            const Vec Ustar_xx = target.ddxx(x, t);
            Mat dBdx = spec.B_x[0][0](Ustar, x, t);
            const Tensor3 dB = spec.dB[0][0](Ustar, x, t);
            for (int k = 0; k < spec.n; ++k) dBdx += Ustar_x[k] * dB[k];
            F -= epsilon * (dBdx * Ustar_x + spec.B[0][0](Ustar, x, t) * Ustar_xx);
        }
        return Vec{spec.P(U, x, t) - F};
    };
    return out;
}

Field make_initial(const Grid1D& grid, int n, const InitialData& data) {
    std::vector<double> base = data.base;
    std::vector<double> amp = data.amplitude;
    base.resize(n, base.empty() ? 0.0 : base.back());
    amp.resize(n, amp.empty() ? 0.0 : amp.back());

    const double L = grid.L;
    auto profile = [&](double x) -> double {
        if (data.preset == "constant") return 0.0;
        if (data.preset == "sine")
            return std::sin(data.wavenumber * 2.0 * M_PI / L * x + data.phase);
        if (data.preset == "gaussian-bump") {
            const double c = data.center > 0.0 ? data.center : 0.5 * L;
            const double w = data.width > 0.0 ? data.width : L / 16.0;
            double r = std::abs(x - c);
            r = std::min(r, L - r);
            return std::exp(-0.5 * r * r / (w * w));
        }
        if (data.preset == "two-state-smooth") {
            const double c = data.center > 0.0 ? data.center : 0.5 * L;
            const double w = data.width > 0.0 ? data.width : L / 32.0;
            const double lo = c - L / 8.0, hi = c + L / 8.0;
            return 0.5 * (std::tanh((x - lo) / w) - std::tanh((x - hi) / w));
        }
        throw ConfigError("initial data: unknown preset '" + data.preset + "'");
    };

    Field f = Field::make(grid, n);
    for (int i = 0; i < grid.N; ++i) {
        const double g = profile(grid.center(i));
        for (int c = 0; c < n; ++c) f.U[i][c] = base[c] + amp[c] * g;
    }
    return f;
}

}  // namespace relent
