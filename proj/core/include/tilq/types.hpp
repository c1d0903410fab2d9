#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tilq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed arguments, dimension mismatches, non-finite data.
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// A coefficient function failed or returned non-finite values at a node.
class EvaluationError : public Error {
public:
    EvaluationError(const std::string& what, double t, double s)
        : Error(what + " at (t=" + std::to_string(t) + ", s=" + std::to_string(s) + ")"),
          t_(t), s_(s) {}

    double t() const noexcept { return t_; }
    double s() const noexcept { return s_; }

private:
    double t_;
    double s_;
};

/// Cholesky or LU factorization failed (matrix not positive definite or singular).
class FactorizationError : public Error {
public:
    using Error::Error;
};

/// Fixed-point iteration exhausted its budget or left the admissible ball.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, double a, double b, std::vector<double> history)
        : Error(what), a_(a), b_(b), history_(std::move(history)) {}

    /// Window [a, b] on which the iteration failed.
    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    /// Sup-norm of successive updates.
    const std::vector<double>& history() const noexcept { return history_; }

private:
    double a_;
    double b_;
    std::vector<double> history_;
};

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace tilq
