#pragma once

#include "tilq/problem.hpp"
#include "tilq/propagators.hpp"
#include "tilq/solution.hpp"

#include <optional>
#include <vector>

namespace tilq {

/// M(s,s)^-1 (B(s)^T P(s) + S(s,s)).
Matrix upsilon(const LQProblem& p, const RiccatiSolution& P, double s);

/// Nonlocal term F(t; s, P) built from the closed-loop propagator `phi`.
/// Requires s <= t so every kernel argument lies on the triangle.
Matrix f_map(const LQProblem& p, const RiccatiSolution& P, const Propagator& phi, double t, double s);

/// Q(t,t) - F(t; t, P).
Matrix q_bar(const LQProblem& p, const RiccatiSolution& P, const Propagator& phi, double t);

/// F(t_i; t_i, P) at every node of the solution grid.
std::vector<Matrix> nonlocal_diagonal(const LQProblem& p, const RiccatiSolution& P);

ContractionConstants contraction_constants(const LQProblem& p, const TimeGrid& g);

/// One application of the Picard map on nodes [first, last] of `P_hat.grid()`.
/// Nodes after `last` are the already solved tail; `boundary` is the value at `last`.
std::vector<Matrix> picard_step(const LQProblem& p, const RiccatiSolution& P_hat, int first, int last,
                                const Matrix& boundary);

struct SolveOptions {
    std::optional<double> tol;  ///< defaults to 1e-10 (1 + r)
    int max_iter = 200;
    std::optional<double> window_override;
    int min_window_intervals = 8;
    int max_nodes = 6400;  ///< cap on internal refinement for the theoretical window
};

RiccatiSolution solve_riccati(const LQProblem& p, const TimeGrid& g, const SolveOptions& opts = {});

/// Integral-form residual ||P(t) - G(T) - int_t^T (...) ds|| at node t.
double riccati_residual(const LQProblem& p, const RiccatiSolution& P, double t);
/// Residual at every node; one O(N^2) pass.
std::vector<double> riccati_residuals(const LQProblem& p, const RiccatiSolution& P);

}  // namespace tilq
