#pragma once

#include "tilq/kernels.hpp"
#include "tilq/problem.hpp"
#include "tilq/solution.hpp"

#include <functional>
#include <vector>

namespace tilq {

using MatrixFn = std::function<Matrix(double)>;

/// Fundamental matrix U of U' = C(t) U on a grid, normalized to the identity
/// at one anchor node. Transitions U(t) U(s)^-1 do not depend on the anchor.
class Propagator {
public:
    Propagator() = default;
    /// `values[i]` = U(t_i), `slopes[i]` = C(t_i) U(t_i).
    Propagator(TimeGrid grid, std::vector<Matrix> values, std::vector<Matrix> slopes, MatrixFn coefficient);

    const TimeGrid& grid() const { return grid_; }
    int dim() const { return values_.empty() ? 0 : static_cast<int>(values_[0].rows()); }
    const Matrix& node_value(int i) const { return values_[static_cast<std::size_t>(i)]; }
    const Matrix& node_slope(int i) const { return slopes_[static_cast<std::size_t>(i)]; }
    const MatrixFn& coefficient() const { return coefficient_; }
    /// Largest node condition number (reciprocal of the LU estimate).
    double worst_condition() const { return worst_condition_; }

    /// U at any t in [0, T]; cubic Hermite between nodes.
    Matrix value(double t) const;
    /// U(t) U(s)^-1.
    Matrix transition(double t, double s) const;

private:
    TimeGrid grid_;
    std::vector<Matrix> values_;
    std::vector<Matrix> slopes_;
    std::vector<Eigen::PartialPivLU<Matrix>> lu_t_;  // factors of U(t_i)^T
    MatrixFn coefficient_;
    double worst_condition_ = 1.0;
};

enum class Anchor { start, end };

/// Classical fourth-order Runge-Kutta per grid interval.
Propagator fundamental_solution(const MatrixFn& C, int n, const TimeGrid& g, Anchor anchor = Anchor::start);

Matrix transition(const Propagator& p, double t, double s);

/// M(s,s)^-1 (B(s)^T P + S(s,s)) for a given P value.
Matrix upsilon_at(const LQProblem& p, const Matrix& P, double s);

/// t -> A(t) - B(t) M(t,t)^-1 (B(t)^T P(t) + S(t,t)).
MatrixFn closed_loop_coefficient(const LQProblem& p, const RiccatiSolution& P);

/// Propagator of the closed-loop coefficient on the solution grid.
Propagator closed_loop_propagator(const LQProblem& p, const RiccatiSolution& P, Anchor anchor = Anchor::start);

}  // namespace tilq
