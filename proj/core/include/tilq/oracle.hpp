#pragma once

#include "tilq/problem.hpp"

#include <vector>

namespace tilq {

struct ClassicalRiccatiSolution {
    TimeGrid grid;
    std::vector<Matrix> values;
};

/// Backward RK4 for the standard Riccati equation with Q(t,t), S(t,t), M(t,t).
/// Rejects inputs whose first-argument partials or G' exceed 1e-12.
ClassicalRiccatiSolution classical_riccati(const LQProblem& p, const TimeGrid& g);

/// Largest first-argument partial or G' norm on a subsample of the grid.
double time_inconsistency(const LQProblem& p, const TimeGrid& g);

/// Cost functional by Heun steps and the trapezoid rule on a grid `refinement`
/// times finer than g.
double brute_force_cost(const LQProblem& p, double t, const Vector& x, const ControlLaw& u, const TimeGrid& g,
                        int refinement);

}  // namespace tilq
