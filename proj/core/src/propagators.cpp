#include "tilq/propagators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <utility>

namespace tilq {

namespace {

constexpr double kConditionLimit = 1e12;

double condition_estimate(const Eigen::PartialPivLU<Matrix>& lu) {
    const double rc = lu.rcond();
    return rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
}

Matrix rk4_step(const MatrixFn& C, double t, double h, const Matrix& u) {
    const Matrix k1 = C(t) * u;
    const Matrix cm = C(t + 0.5 * h);
    const Matrix k2 = cm * (u + 0.5 * h * k1);
    const Matrix k3 = cm * (u + 0.5 * h * k2);
    const Matrix k4 = C(t + h) * (u + h * k3);
    return u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

Propagator::Propagator(TimeGrid grid, std::vector<Matrix> values, std::vector<Matrix> slopes, MatrixFn coefficient)
    : grid_(std::move(grid)), values_(std::move(values)), slopes_(std::move(slopes)), coefficient_(std::move(coefficient)) {
    if (static_cast<int>(values_.size()) != grid_.size() || values_.size() != slopes_.size()) {
        throw InvalidInputError("Propagator: node count mismatch");
    }
    lu_t_.reserve(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!values_[i].allFinite()) throw EvaluationError("Propagator: non-finite state", grid_[static_cast<int>(i)], grid_[static_cast<int>(i)]);
        lu_t_.emplace_back(values_[i].transpose());
        const double cond = condition_estimate(lu_t_.back());
        if (!std::isfinite(cond)) {
            throw FactorizationError("Propagator: singular fundamental matrix at t=" + std::to_string(grid_[static_cast<int>(i)]));
        }
        worst_condition_ = std::max(worst_condition_, cond);
    }
}

Matrix Propagator::value(double t) const {
    const double T = grid_.horizon();
    if (t < -1e-12 * T || t > T * (1.0 + 1e-12)) throw InvalidInputError("Propagator::value: t outside [0, T]");
    const int idx = grid_.node_index(t);
    if (idx >= 0) return values_[static_cast<std::size_t>(idx)];
    const auto& nodes = grid_.nodes();
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
    const int i = static_cast<int>(it - nodes.begin()) - 1;
    const double a = grid_[i];
    const double h = grid_[i + 1] - a;
    const double x = (t - a) / h;
    const double h00 = (1.0 + 2.0 * x) * (1.0 - x) * (1.0 - x);
    const double h10 = x * (1.0 - x) * (1.0 - x);
    const double h01 = x * x * (3.0 - 2.0 * x);
    const double h11 = x * x * (x - 1.0);
    const auto k = static_cast<std::size_t>(i);
    return h00 * values_[k] + h10 * h * slopes_[k] + h01 * values_[k + 1] + h11 * h * slopes_[k + 1];
}

Matrix Propagator::transition(double t, double s) const {
    const int js = grid_.node_index(s);
    const Matrix ut = value(t);
    if (js >= 0) {
        if (grid_.node_index(t) == js) return Matrix::Identity(dim(), dim());
        // U(t) U(s)^-1 = (U(s)^-T U(t)^T)^T
        return lu_t_[static_cast<std::size_t>(js)].solve(ut.transpose()).transpose();
    }
    const Eigen::PartialPivLU<Matrix> lu(value(s).transpose());
    if (!(condition_estimate(lu) <= kConditionLimit)) {
        throw FactorizationError("Propagator::transition: ill-conditioned U(s) at s=" + std::to_string(s) +
                                 ", condition " + std::to_string(condition_estimate(lu)));
    }
    return lu.solve(ut.transpose()).transpose();
}

Propagator fundamental_solution(const MatrixFn& C, int n, const TimeGrid& g, Anchor anchor) {
    if (n < 1) throw InvalidInputError("fundamental_solution: dimension must be positive");
    const int N = g.size();
    std::vector<Matrix> values(static_cast<std::size_t>(N));
    std::vector<Matrix> slopes(static_cast<std::size_t>(N));
    auto coef = [&](double t) {
        Matrix c = C(t);
        if (c.rows() != n || c.cols() != n) throw EvaluationError("fundamental_solution: coefficient shape", t, t);
        if (!c.allFinite()) throw EvaluationError("fundamental_solution: non-finite coefficient", t, t);
        return c;
    };
    MatrixFn checked = coef;
    if (anchor == Anchor::start) {
        values[0] = Matrix::Identity(n, n);
        for (int i = 0; i + 1 < N; ++i) values[i + 1] = rk4_step(checked, g[i], g[i + 1] - g[i], values[i]);
    } else {
        values[N - 1] = Matrix::Identity(n, n);
        for (int i = N - 1; i > 0; --i) values[i - 1] = rk4_step(checked, g[i], g[i - 1] - g[i], values[i]);
    }
    for (int i = 0; i < N; ++i) slopes[i] = checked(g[i]) * values[i];
    return Propagator(g, std::move(values), std::move(slopes), C);
}

Matrix transition(const Propagator& p, double t, double s) { return p.transition(t, s); }

Matrix upsilon_at(const LQProblem& p, const Matrix& P, double s) {
    const Matrix M = p.M(s, s);
    Eigen::LLT<Matrix> llt(symmetrize(M));
    if (llt.info() != Eigen::Success) {
        throw FactorizationError("M(s,s) is not positive definite at s=" + std::to_string(s));
    }
    return llt.solve(p.B(s).transpose() * P + p.S(s, s));
}

MatrixFn closed_loop_coefficient(const LQProblem& p, const RiccatiSolution& P) {
    auto prob = std::make_shared<const LQProblem>(p);
    auto sol = std::make_shared<const RiccatiSolution>(P);
    return [prob, sol](double t) -> Matrix {
        return prob->A(t) - prob->B(t) * upsilon_at(*prob, sol->at(t), t);
    };
}

Propagator closed_loop_propagator(const LQProblem& p, const RiccatiSolution& P, Anchor anchor) {
    return fundamental_solution(closed_loop_coefficient(p, P), p.n, P.grid(), anchor);
}

}  // namespace tilq
