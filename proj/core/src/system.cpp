#include "relent/system.hpp"

#include <cmath>
#include <limits>

namespace relent {

namespace {

const double kStepFirst = std::cbrt(std::numeric_limits<double>::epsilon());
const double kStepSecond = std::pow(std::numeric_limits<double>::epsilon(), 0.25);

double h1(double v) { return kStepFirst * (1.0 + std::abs(v)); }
double h2(double v) { return kStepSecond * (1.0 + std::abs(v)); }

Vec bump(const Vec& U, int j, double h) {
    Vec out = U;
    out[j] += h;
    return out;
}

MatFn jacobian_of(VecFn fn, int n) {
    return [fn = std::move(fn), n](const Vec& U, double x, double t) {
        Mat J(n, n);
        for (int j = 0; j < n; ++j) {
            const double h = h1(U[j]);
            J.col(j) = (fn(bump(U, j, h), x, t) - fn(bump(U, j, -h), x, t)) / (2.0 * h);
        }
        return J;
    };
}

Tensor3Fn hessian_of(VecFn fn, int n) {
    return [fn = std::move(fn), n](const Vec& U, double x, double t) {
        Tensor3 H(n, Mat::Zero(n, n));
        const Vec base = fn(U, x, t);
        for (int j = 0; j < n; ++j) {
            const double hj = h2(U[j]);
            const Vec pj = fn(bump(U, j, hj), x, t);
            const Vec mj = fn(bump(U, j, -hj), x, t);
            const Vec diag = (pj - 2.0 * base + mj) / (hj * hj);
            for (int i = 0; i < n; ++i) H[i](j, j) = diag[i];
            for (int k = j + 1; k < n; ++k) {
                const double hk = h2(U[k]);
                const Vec pp = fn(bump(bump(U, j, hj), k, hk), x, t);
                const Vec pm = fn(bump(bump(U, j, hj), k, -hk), x, t);
                const Vec mp = fn(bump(bump(U, j, -hj), k, hk), x, t);
                const Vec mm = fn(bump(bump(U, j, -hj), k, -hk), x, t);
                const Vec mixed = (pp - pm - mp + mm) / (4.0 * hj * hk);
                for (int i = 0; i < n; ++i) {
                    H[i](j, k) = mixed[i];
                    H[i](k, j) = mixed[i];
                }
            }
        }
        return H;
    };
}

VecFn t_derivative_of(VecFn fn) {
    return [fn = std::move(fn)](const Vec& U, double x, double t) {
        const double h = h1(t);
        return Vec{(fn(U, x, t + h) - fn(U, x, t - h)) / (2.0 * h)};
    };
}

VecFn x_derivative_of(VecFn fn) {
    return [fn = std::move(fn)](const Vec& U, double x, double t) {
        const double h = h1(x);
        return Vec{(fn(U, x + h, t) - fn(U, x - h, t)) / (2.0 * h)};
    };
}

VecFn gradient_of(ScalarFn fn, int n) {
    return [fn = std::move(fn), n](const Vec& U, double x, double t) {
        Vec g(n);
        for (int j = 0; j < n; ++j) {
            const double h = h1(U[j]);
            g[j] = (fn(bump(U, j, h), x, t) - fn(bump(U, j, -h), x, t)) / (2.0 * h);
        }
        return g;
    };
}

MatFn scalar_hessian_of(ScalarFn fn, int n) {
    return [fn = std::move(fn), n](const Vec& U, double x, double t) {
        Mat H(n, n);
        const double base = fn(U, x, t);
        for (int j = 0; j < n; ++j) {
            const double hj = h2(U[j]);
            H(j, j) = (fn(bump(U, j, hj), x, t) - 2.0 * base + fn(bump(U, j, -hj), x, t)) /
                      (hj * hj);
            for (int k = j + 1; k < n; ++k) {
                const double hk = h2(U[k]);
                const double mixed =
                    (fn(bump(bump(U, j, hj), k, hk), x, t) - fn(bump(bump(U, j, hj), k, -hk), x, t) -
                     fn(bump(bump(U, j, -hj), k, hk), x, t) +
                     fn(bump(bump(U, j, -hj), k, -hk), x, t)) /
                    (4.0 * hj * hk);
                H(j, k) = mixed;
                H(k, j) = mixed;
            }
        }
        return H;
    };
}

ScalarFn scalar_t_derivative_of(ScalarFn fn) {
    return [fn = std::move(fn)](const Vec& U, double x, double t) {
        const double h = h1(t);
        return (fn(U, x, t + h) - fn(U, x, t - h)) / (2.0 * h);
    };
}

ScalarFn scalar_x_derivative_of(ScalarFn fn) {
    return [fn = std::move(fn)](const Vec& U, double x, double t) {
        const double h = h1(x);
        return (fn(U, x + h, t) - fn(U, x - h, t)) / (2.0 * h);
    };
}

/// Mixed d^2 G_i / dU_j dx by the 4-point cross stencil on G itself.
MatFn mixed_ux_of(VecFn fn, int n) {
    return [fn = std::move(fn), n](const Vec& U, double x, double t) {
        Mat M(n, n);
        const double hx = h2(x);
        for (int j = 0; j < n; ++j) {
            const double hj = h2(U[j]);
            const Vec col = (fn(bump(U, j, hj), x + hx, t) - fn(bump(U, j, hj), x - hx, t) -
                             fn(bump(U, j, -hj), x + hx, t) + fn(bump(U, j, -hj), x - hx, t)) /
                            (4.0 * hj * hx);
            M.col(j) = col;
        }
        return M;
    };
}

Tensor3Fn matrix_gradient_of(MatFn fn, int n) {
    return [fn = std::move(fn), n](const Vec& U, double x, double t) {
        Tensor3 out(n);
        for (int k = 0; k < n; ++k) {
            const double h = h1(U[k]);
            out[k] = (fn(bump(U, k, h), x, t) - fn(bump(U, k, -h), x, t)) / (2.0 * h);
        }
        return out;
    };
}

MatFn matrix_x_derivative_of(MatFn fn) {
    return [fn = std::move(fn)](const Vec& U, double x, double t) {
        const double h = h1(x);
        return Mat{(fn(U, x + h, t) - fn(U, x - h, t)) / (2.0 * h)};
    };
}

}  // namespace

void require_admissible(const SystemSpec& spec, const Vec& U) {
    if (!spec.inadmissible) return;
    const std::string reason = spec.inadmissible(U);
    if (!reason.empty()) throw DomainError(spec.name + ": " + reason);
}

Vec eval_R(const SystemSpec& spec, const Vec& U, double x, double t) {
    require_admissible(spec, U);
    Vec R = spec.P(U, x, t) + spec.A_t(U, x, t);
    for (int a = 0; a < spec.d; ++a) R += spec.f_x[a](U, x, t);
    return R;
}

double eval_Z(const SystemSpec& spec, const Vec& U, double x, double t) {
    const Vec R = eval_R(spec, U, x, t);
    double z = spec.G(U, x, t).dot(R) - spec.eta_t(U, x, t);
    for (int a = 0; a < spec.d; ++a) z -= spec.q_x[a](U, x, t);
    return z;
}

Vec invert_A(const SystemSpec& spec, const Vec& V, double x, double t, const Vec& guess,
             double tol, int max_iters) {
    const double target = tol * (1.0 + V.lpNorm<Eigen::Infinity>());
    Vec U = guess;
    Vec resid = spec.A(U, x, t) - V;
    for (int it = 0; it < max_iters; ++it) {
        if (resid.lpNorm<Eigen::Infinity>() <= target) return U;
        U -= spec.dA(U, x, t).partialPivLu().solve(resid);
        resid = spec.A(U, x, t) - V;
    }
    if (resid.lpNorm<Eigen::Infinity>() <= target) return U;
    throw InversionError(spec.name + ": conserved-variable inversion stalled, residual " +
                             std::to_string(resid.lpNorm<Eigen::Infinity>()),
                         U, resid.lpNorm<Eigen::Infinity>());
}

SystemSpec synthesize_derivatives(SystemSpec s) {
    const int n = s.n;
    const int d = s.d;
    bool touched = false;
    auto mark = [&touched] { touched = true; };

    s.f.resize(d);
    s.q.resize(d);
    s.df.resize(d);
    s.f_x.resize(d);
    s.q_x.resize(d);
    s.G_x.resize(d);
    s.dG_x.resize(d);
    s.dB.resize(d);
    s.B_x.resize(d);
    for (int a = 0; a < d; ++a) {
        s.dB[a].resize(d);
        s.B_x[a].resize(d);
    }

    if (!s.dA && s.A) { s.dA = jacobian_of(s.A, n); mark(); }
    if (!s.d2A && s.A) { s.d2A = hessian_of(s.A, n); mark(); }
    if (!s.A_t && s.A) { s.A_t = t_derivative_of(s.A); mark(); }

    for (int a = 0; a < d; ++a) {
        if (!s.df[a] && s.f[a]) { s.df[a] = jacobian_of(s.f[a], n); mark(); }
        if (!s.f_x[a] && s.f[a]) { s.f_x[a] = x_derivative_of(s.f[a]); mark(); }
        if (!s.q_x[a] && s.q[a]) { s.q_x[a] = scalar_x_derivative_of(s.q[a]); mark(); }
    }

    if (!s.grad_eta && s.eta) { s.grad_eta = gradient_of(s.eta, n); mark(); }
    if (!s.hess_eta && s.eta) { s.hess_eta = scalar_hessian_of(s.eta, n); mark(); }
    if (!s.eta_t && s.eta) { s.eta_t = scalar_t_derivative_of(s.eta); mark(); }

    if (s.G) {
        if (!s.dG) { s.dG = jacobian_of(s.G, n); mark(); }
        if (!s.d2G) { s.d2G = hessian_of(s.G, n); mark(); }
        if (!s.G_t) { s.G_t = t_derivative_of(s.G); mark(); }
        for (int a = 0; a < d; ++a) {
            if (!s.G_x[a]) { s.G_x[a] = x_derivative_of(s.G); mark(); }
            if (!s.dG_x[a]) { s.dG_x[a] = mixed_ux_of(s.G, n); mark(); }
        }
    }

    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            if (!s.B.empty() && s.B[a][b]) {
                if (!s.dB[a][b]) { s.dB[a][b] = matrix_gradient_of(s.B[a][b], n); mark(); }
                if (!s.B_x[a][b]) { s.B_x[a][b] = matrix_x_derivative_of(s.B[a][b]); mark(); }
            }
        }
    }

    if (touched) s.derivative_mode = DerivativeMode::Synthesized;
    return s;
}

void HistoryBuffer::append(double t, const std::vector<Vec>& snap) {
    if (static_cast<int>(snap.size()) != cells)
        throw HistoryGapError("history buffer: snapshot cell count " +
                              std::to_string(snap.size()) + " != " + std::to_string(cells));
    if (!times.empty() && t <= times.back())
        throw HistoryGapError("history buffer: time stamps must increase (got " +
                              std::to_string(t) + " after " + std::to_string(times.back()) + ")");
    times.push_back(t);
    snapshots.push_back(snap);
}

}  // namespace relent
