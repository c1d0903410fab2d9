#pragma once

#include "tilq/kernels.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tilq {

/// Feedback control law (s, x) -> u.
using ControlLaw = std::function<Vector(double, const Vector&)>;

/// Dynamics X' = A X + B u and a cost with two-time weights Q, S, M and terminal weight G.
struct LQProblem {
    int n = 0;
    int m = 0;
    double T = 0.0;
    OneTimeMatrixFn A;  ///< n x n
    OneTimeMatrixFn B;  ///< n x m
    TwoTimeKernel Q;    ///< n x n, symmetric
    TwoTimeKernel S;    ///< m x n
    TwoTimeKernel M;    ///< m x m, symmetric positive definite
    OneTimeMatrixFn G;  ///< n x n, symmetric

    /// Throws InvalidInputError on any dimension or horizon mismatch.
    void check_dimensions() const;
};

struct AssumptionCheck {
    std::string id;
    double t = 0.0;
    double s = 0.0;
    double worst = 0.0;  ///< smallest eigenvalue, or largest asymmetry for symmetry checks
    bool pass = true;
    int evaluated = 0;
    int skipped = 0;
    std::string note;
};

struct ValidationReport {
    std::vector<AssumptionCheck> checks;
    bool overall = true;

    const AssumptionCheck* find(const std::string& id) const;
    /// True when at least one check fails and every failing check is an H5 check.
    bool only_h5_failures() const;
};

struct ValidationOptions {
    /// Eigenvalue and symmetry tolerance. Checks on partials obtained by finite
    /// differences add an allowance for their roundoff.
    double tol = 1e-10;
    std::optional<double> pd_floor;  ///< defaults to 1e-10 * ||M||_C
};

ValidationReport validate_assumptions(const LQProblem& p, const TimeGrid& g, const ValidationOptions& opts = {});

}  // namespace tilq
