#pragma once

#include "tilq/problem.hpp"
#include "tilq/propagators.hpp"
#include "tilq/solution.hpp"

#include <vector>

namespace tilq {

/// State and adjoint of the two-point boundary value problem on a uniform grid over [t0, T].
struct BvpSolution {
    double t0 = 0.0;
    Vector x0;
    double step = 0.0;
    std::vector<double> times;
    std::vector<Vector> X;
    std::vector<Vector> phi;
};

/// X(s) = Phi(s, t0) x0 and phi(s) = P(s) X(s).
BvpSolution from_riccati(const LQProblem& p, const RiccatiSolution& P, double t0, const Vector& x0);
BvpSolution from_riccati(const LQProblem& p, const RiccatiSolution& P, const Propagator& closed_loop, double t0,
                         const Vector& x0);

/// Quadratic form of Q-hat(s,s) along (X, phi) at node index k of `sol`.
double q_hat_quadratic(const LQProblem& p, const RiccatiSolution& P, const BvpSolution& sol, int k);

struct BvpResidual {
    double res_X = 0.0;
    double res_phi = 0.0;
};

/// Largest deviation of fourth-order differences from both right-hand sides at
/// interior nodes. The backward equation uses the Q-bar matrix for Q-hat.
BvpResidual bvp_residual(const LQProblem& p, const RiccatiSolution& P, const BvpSolution& sol);
BvpResidual bvp_residual(const LQProblem& p, const RiccatiSolution& P, const Propagator& closed_loop,
                         const BvpSolution& sol);
/// Uses precomputed `nonlocal_diagonal(p, P)` at times that are grid nodes.
BvpResidual bvp_residual(const LQProblem& p, const RiccatiSolution& P, const Propagator& closed_loop,
                         const BvpSolution& sol, const std::vector<Matrix>& nonlocal_diag);

}  // namespace tilq
