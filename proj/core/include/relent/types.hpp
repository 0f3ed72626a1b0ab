#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace relent {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Rank-3 array indexed component-first: t[i](j,k) is the (j,k) second
/// state-derivative of component i.
using Tensor3 = std::vector<Mat>;

/// Closures of (U, x, t). Position x is scalar (the torus is 1-D); the
/// flux/viscosity direction index alpha is carried by the containers that
/// hold these closures.
using ScalarFn = std::function<double(const Vec&, double, double)>;
using VecFn = std::function<Vec(const Vec&, double, double)>;
using MatFn = std::function<Mat(const Vec&, double, double)>;
using Tensor3Fn = std::function<Tensor3(const Vec&, double, double)>;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Evaluation at an inadmissible state (e.g. nonpositive density).
struct DomainError : Error {
    using Error::Error;
};

/// Newton inversion of the conserved-variable map did not converge.
struct InversionError : Error {
    InversionError(const std::string& what, Vec last, double res)
        : Error(what), last_iterate(std::move(last)), residual(res) {}
    Vec last_iterate;
    double residual = 0.0;
};

struct QuadratureError : Error {
    using Error::Error;
};

struct HistoryGapError : Error {
    using Error::Error;
};

/// Sampling/fitting problems in audits (empty shell, too few shells, ...).
struct AuditError : Error {
    using Error::Error;
};

/// Relative entropy came out nonpositive at U != Ubar; points at a failed
/// convexity hypothesis.
struct ConvexityViolation : Error {
    ConvexityViolation(const std::string& what, Vec u, Vec ubar, double v)
        : Error(what), U(std::move(u)), Ubar(std::move(ubar)), value(v) {}
    Vec U, Ubar;
    double value = 0.0;
};

struct LedgerError : Error {
    using Error::Error;
};

struct StepError : Error {
    StepError(const std::string& what, int cell_index) : Error(what), cell(cell_index) {}
    int cell = -1;
};

/// Configuration/schema problems; `what()` cites the JSON path.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace relent
