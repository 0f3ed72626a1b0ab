#include "relent/builtins.hpp"

#include <cmath>

namespace relent {

namespace {

Tensor3 zero_tensor(int n) { return Tensor3(n, Mat::Zero(n, n)); }

std::vector<double> sample_kernel(const std::function<double(double)>& k, double T, double dt) {
    const int m = static_cast<int>(std::llround(T / dt)) + 1;
    std::vector<double> out(m);
    for (int i = 0; i < m; ++i) out[i] = k(i * dt);
    return out;
}

double interp(const std::vector<double>& v, double dt, double s) {
    if (s <= 0.0) return v.front();
    const double pos = s / dt;
    const int i = static_cast<int>(pos);
    if (i >= static_cast<int>(v.size()) - 1) return v.back();
    const double w = pos - i;
    return (1.0 - w) * v[i] + w * v[i + 1];
}

}  // namespace

DuctProfile constant_profile(double value) {
    return {[value](double) { return value; }, [](double) { return 0.0; }};
}

DuctProfile sin_profile(double base, double amplitude) {
    return {[=](double x) { return base + amplitude * std::sin(x); },
            [=](double x) { return amplitude * std::cos(x); }};
}

SystemSpec make_scalar_sanity() {
    SystemSpec s;
    s.n = 1;
    s.d = 1;
    s.name = "scalar_sanity";

    s.A = [](const Vec& U, double, double) { return U; };
    s.dA = [](const Vec&, double, double) { return Mat::Identity(1, 1); };
    s.d2A = [](const Vec&, double, double) { return zero_tensor(1); };
    s.A_t = [](const Vec&, double, double) { return Vec::Zero(1); };

    s.f = {[](const Vec& U, double, double) {
        Vec out(1);
        out[0] = 0.5 * U[0] * U[0];
        return out;
    }};
    s.df = {[](const Vec& U, double, double) { return Mat{U[0] * Mat::Identity(1, 1)}; }};
    s.f_x = {[](const Vec&, double, double) { return Vec::Zero(1); }};

    s.P = [](const Vec&, double, double) { return Vec::Zero(1); };

    s.eta = [](const Vec& U, double, double) { return 0.5 * U[0] * U[0]; };
    s.grad_eta = [](const Vec& U, double, double) { return U; };
    s.hess_eta = [](const Vec&, double, double) { return Mat::Identity(1, 1); };
    s.eta_t = [](const Vec&, double, double) { return 0.0; };

    s.q = {[](const Vec& U, double, double) { return U[0] * U[0] * U[0] / 3.0; }};
    s.q_x = {[](const Vec&, double, double) { return 0.0; }};

    s.G = [](const Vec& U, double, double) { return U; };
    s.dG = [](const Vec&, double, double) { return Mat::Identity(1, 1); };
    s.d2G = [](const Vec&, double, double) { return zero_tensor(1); };
    s.G_t = [](const Vec&, double, double) { return Vec::Zero(1); };
    s.G_x = {[](const Vec&, double, double) { return Vec::Zero(1); }};
    s.dG_x = {[](const Vec&, double, double) { return Mat::Zero(1, 1); }};

    s.B = {{[](const Vec&, double, double) { return Mat::Identity(1, 1); }}};
    s.dB = {{[](const Vec&, double, double) { return zero_tensor(1); }}};
    s.B_x = {{[](const Vec&, double, double) { return Mat::Zero(1, 1); }}};
    return s;
}

SystemSpec make_duct_gas(double kappa, double gamma, DuctProfile profile, double rho_min) {
    if (!(gamma > 1.0)) throw Error("duct gas: gamma must exceed 1");
    if (!(kappa > 0.0)) throw Error("duct gas: kappa must be positive");

    SystemSpec s;
    s.n = 2;
    s.d = 1;
    s.name = "duct_gas";
    s.inadmissible = [rho_min](const Vec& U) -> std::string {
        if (!(U[0] >= rho_min))
            return "density rho = " + std::to_string(U[0]) + " below floor " +
                   std::to_string(rho_min);
        return {};
    };
    auto check = [rho_min, name = s.name](const Vec& U) {
        if (!(U[0] >= rho_min))
            throw DomainError(name + ": density rho = " + std::to_string(U[0]) +
                              " below floor " + std::to_string(rho_min));
    };

    const double g1 = gamma - 1.0;
    auto h = [kappa, gamma, g1](double rho) { return kappa * std::pow(rho, gamma) / g1; };
    auto hp = [kappa, gamma, g1](double rho) { return kappa * gamma * std::pow(rho, g1) / g1; };
    auto hpp = [kappa, gamma](double rho) { return kappa * gamma * std::pow(rho, gamma - 2.0); };
    auto hppp = [kappa, gamma](double rho) {
        return kappa * gamma * (gamma - 2.0) * std::pow(rho, gamma - 3.0);
    };
    auto pres = [kappa, gamma](double rho) { return kappa * std::pow(rho, gamma); };

    s.A = [check](const Vec& U, double, double) { check(U); return U; };
    s.dA = [](const Vec&, double, double) { return Mat::Identity(2, 2); };
    s.d2A = [](const Vec&, double, double) { return zero_tensor(2); };
    s.A_t = [](const Vec&, double, double) { return Vec::Zero(2); };

    s.f = {[check, kappa, gamma](const Vec& U, double, double) {
        check(U);
        Vec out(2);
        out[0] = U[1];
        out[1] = U[1] * U[1] / U[0] + kappa * std::pow(U[0], gamma);
        return out;
    }};
    s.df = {[check, kappa, gamma](const Vec& U, double, double) {
        check(U);
        const double rho = U[0], m = U[1];
        Mat J(2, 2);
        J << 0.0, 1.0, -m * m / (rho * rho) + kappa * gamma * std::pow(rho, gamma - 1.0),
            2.0 * m / rho;
        return J;
    }};
    s.f_x = {[](const Vec&, double, double) { return Vec::Zero(2); }};

    s.P = [check, profile](const Vec& U, double x, double) {
        check(U);
        const double ratio = profile.da(x) / profile.a(x);
        Vec out(2);
        out[0] = ratio * U[1];
        out[1] = ratio * U[1] * U[1] / U[0];
        return out;
    };

    s.eta = [check, h](const Vec& U, double, double) {
        check(U);
        return 0.5 * U[1] * U[1] / U[0] + h(U[0]);
    };
    s.grad_eta = [check, hp](const Vec& U, double, double) {
        check(U);
        const double rho = U[0], m = U[1];
        Vec g(2);
        g[0] = -0.5 * m * m / (rho * rho) + hp(rho);
        g[1] = m / rho;
        return g;
    };
    s.hess_eta = [check, hpp](const Vec& U, double, double) {
        check(U);
        const double rho = U[0], m = U[1];
        Mat H(2, 2);
        H << m * m / (rho * rho * rho) + hpp(rho), -m / (rho * rho), -m / (rho * rho), 1.0 / rho;
        return H;
    };
    s.eta_t = [](const Vec&, double, double) { return 0.0; };

    s.q = {[check, h, pres](const Vec& U, double, double) {
        check(U);
        const double rho = U[0], m = U[1];
        return (m / rho) * (0.5 * m * m / rho + h(rho) + pres(rho));
    }};
    s.q_x = {[](const Vec&, double, double) { return 0.0; }};

    s.G = s.grad_eta;
    s.dG = s.hess_eta;
    s.d2G = [check, hppp](const Vec& U, double, double) {
        check(U);
        const double rho = U[0], m = U[1];
        const double r2 = rho * rho, r3 = r2 * rho, r4 = r3 * rho;
        Tensor3 T(2, Mat::Zero(2, 2));
        T[0] << -3.0 * m * m / r4 + hppp(rho), 2.0 * m / r3, 2.0 * m / r3, -1.0 / r2;
        T[1] << 2.0 * m / r3, -1.0 / r2, -1.0 / r2, 0.0;
        return T;
    };
    s.G_t = [](const Vec&, double, double) { return Vec::Zero(2); };
    s.G_x = {[](const Vec&, double, double) { return Vec::Zero(2); }};
    s.dG_x = {[](const Vec&, double, double) { return Mat::Zero(2, 2); }};

    s.B = {{[](const Vec&, double, double) { return Mat::Identity(2, 2); }}};
    s.dB = {{[](const Vec&, double, double) { return zero_tensor(2); }}};
    s.B_x = {{[](const Vec&, double, double) { return Mat::Zero(2, 2); }}};
    return s;
}

ResolventTable resolvent_kernel(const std::vector<double>& k, double dt) {
    const int m = static_cast<int>(k.size());
    if (m < 3) throw QuadratureError("resolvent: need at least 3 kernel samples");
    if (!(dt > 0.0)) throw QuadratureError("resolvent: dt must be positive");

    ResolventTable table;
    table.dt = dt;
    table.t.resize(m);
    table.r.resize(m);
    for (int i = 0; i < m; ++i) table.t[i] = i * dt;

    const double diag = 1.0 + 0.5 * dt * k[0];
    if (std::abs(diag) < 1e-14)
        throw QuadratureError("resolvent: singular diagonal 1 + dt*k(0)/2 = 0");

    table.r[0] = k[0];
    for (int i = 1; i < m; ++i) {
        double conv = 0.5 * k[i] * table.r[0];  // j = 0 end weight
        for (int j = 1; j < i; ++j) conv += k[i - j] * table.r[j];
        table.r[i] = (k[i] - dt * conv) / diag;
    }

    table.rprime.resize(m);
    const auto& r = table.r;
    table.rprime[0] = (-3.0 * r[0] + 4.0 * r[1] - r[2]) / (2.0 * dt);
    for (int i = 1; i < m - 1; ++i) table.rprime[i] = (r[i + 1] - r[i - 1]) / (2.0 * dt);
    table.rprime[m - 1] = (3.0 * r[m - 1] - 4.0 * r[m - 2] + r[m - 3]) / (2.0 * dt);
    return table;
}

double ResolventTable::eval_r(double s) const { return interp(r, dt, s); }
double ResolventTable::eval_rprime(double s) const { return interp(rprime, dt, s); }

void MemoryState::freeze(double t) {
    frozen_time = t;
    if (history.times.empty()) {
        std::fill(frozen.begin(), frozen.end(), 0.0);
        return;
    }
    if (!history.covers(t))
        throw HistoryGapError("memory: history buffer ends at " +
                              std::to_string(history.times.back()) + ", need " +
                              std::to_string(t));
    const int cells = history.cells;
    frozen.assign(cells, 0.0);
    const auto& times = history.times;
    const int last = static_cast<int>(times.size()) - 1;
    for (int j = 0; j < last; ++j) {
        if (times[j + 1] > t + 1e-12) break;
        const double w = 0.5 * (times[j + 1] - times[j]);
        const double rp_lo = resolvent.eval_rprime(t - times[j]);
        const double rp_hi = resolvent.eval_rprime(t - times[j + 1]);
        for (int i = 0; i < cells; ++i) {
            frozen[i] += w * (rp_lo * history.snapshots[j][i][0] +
                              rp_hi * history.snapshots[j + 1][i][0]);
        }
    }
}

double MemoryState::history_term(double x) const {
    if (frozen.empty()) return 0.0;
    const int cells = static_cast<int>(frozen.size());
    const double dx = domain_length / cells;
    int i = static_cast<int>(std::floor(x / dx));
    i = ((i % cells) + cells) % cells;
    return frozen[i];
}

SystemSpec make_memory_scalar(std::function<double(double)> kernel, double T, double dt) {
    SystemSpec s = make_scalar_sanity();
    s.name = "memory_scalar";

    auto state = std::make_shared<MemoryState>();
    state->resolvent = resolvent_kernel(sample_kernel(kernel, T, dt), dt);
    s.memory = state;

    s.P = [state](const Vec& U, double x, double t) {
        const double r0 = state->resolvent.r.front();
        const double rt = state->resolvent.eval_r(t);
        Vec out(1);
        out[0] = r0 * U[0] - rt * U[0] + state->history_term(x);
        return out;
    };
    return s;
}

BtildeSpec identity_btilde(int n, int d) {
    BtildeSpec b;
    b.B.assign(d, std::vector<MatFn>(d));
    b.dB.assign(d, std::vector<Tensor3Fn>(d));
    for (int a = 0; a < d; ++a) {
        for (int c = 0; c < d; ++c) {
            const bool diag = (a == c);
            b.B[a][c] = [n, diag](const Vec&, double, double) {
                return diag ? Mat{Mat::Identity(n, n)} : Mat{Mat::Zero(n, n)};
            };
            b.dB[a][c] = [n](const Vec&, double, double) { return zero_tensor(n); };
        }
    }
    return b;
}

SystemSpec make_selfsimilar(SystemSpec spec, BtildeSpec btilde) {
    const int d = spec.d;
    const int n = spec.n;
    spec.name += "+selfsimilar";
    spec.B.assign(d, std::vector<MatFn>(d));
    spec.dB.assign(d, std::vector<Tensor3Fn>(d));
    spec.B_x.assign(d, std::vector<MatFn>(d));
    for (int a = 0; a < d; ++a) {
        for (int c = 0; c < d; ++c) {
            spec.B[a][c] = [inner = btilde.B[a][c]](const Vec& U, double x, double t) {
                return Mat{t * inner(U, x, t)};
            };
            spec.dB[a][c] = [inner = btilde.dB[a][c]](const Vec& U, double x, double t) {
                Tensor3 out = inner(U, x, t);
                for (auto& m : out) m *= t;
                return out;
            };
            spec.B_x[a][c] = [n](const Vec&, double, double) { return Mat::Zero(n, n); };
        }
    }
    return spec;
}

}  // namespace relent
