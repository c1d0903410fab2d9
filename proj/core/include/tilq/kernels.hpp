#pragma once

#include "tilq/types.hpp"

#include <functional>
#include <vector>

namespace tilq {

/// Discretization of [0, T].
class TimeGrid {
public:
    /// Uniform grid with N intervals.
    static TimeGrid uniform(double T, int N);
    /// Arbitrary strictly increasing nodes starting at 0.
    static TimeGrid from_nodes(std::vector<double> nodes);

    double horizon() const { return nodes_.back(); }
    int intervals() const { return static_cast<int>(nodes_.size()) - 1; }
    int size() const { return static_cast<int>(nodes_.size()); }
    double operator[](int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& nodes() const { return nodes_; }
    bool is_uniform() const { return uniform_; }
    /// Spacing of a uniform grid; for non-uniform grids the largest gap.
    double step() const { return step_; }

    /// Index of the node equal to t within a relative tolerance, or -1.
    int node_index(double t) const;
    /// Same grid with every interval split into `factor` pieces.
    TimeGrid refined(int factor) const;

private:
    std::vector<double> nodes_;
    bool uniform_ = false;
    double step_ = 0.0;
};

enum class Provenance { analytic, finite_difference };

/// Matrix-valued function of one time argument on [0, T].
class OneTimeMatrixFn {
public:
    using Fn = std::function<Matrix(double)>;

    OneTimeMatrixFn() = default;
    OneTimeMatrixFn(int rows, int cols, double horizon, Fn eval, Fn eval_dt = nullptr);

    static OneTimeMatrixFn constant(const Matrix& value, double horizon);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double horizon() const { return horizon_; }
    Provenance provenance() const { return eval_dt_ ? Provenance::analytic : Provenance::finite_difference; }

    Matrix operator()(double t) const;
    Matrix dt(double t) const;

private:
    int rows_ = 0;
    int cols_ = 0;
    double horizon_ = 0.0;
    Fn eval_;
    Fn eval_dt_;
};

/// Matrix-valued function of (t, s) on the closed triangle 0 <= t <= s <= T.
class TwoTimeKernel {
public:
    using Fn = std::function<Matrix(double, double)>;

    TwoTimeKernel() = default;
    TwoTimeKernel(int rows, int cols, double horizon, Fn eval, Fn eval_dt = nullptr,
                  bool symmetry_required = false);

    static TwoTimeKernel constant(const Matrix& value, double horizon, bool symmetry_required = false);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double horizon() const { return horizon_; }
    bool symmetry_required() const { return symmetric_; }
    Provenance provenance() const { return eval_dt_ ? Provenance::analytic : Provenance::finite_difference; }

    Matrix operator()(double t, double s) const;
    /// Partial derivative in the first argument.
    Matrix dt(double t, double s) const;

private:
    int rows_ = 0;
    int cols_ = 0;
    double horizon_ = 0.0;
    Fn eval_;
    Fn eval_dt_;
    bool symmetric_ = false;
};

struct NormBundle {
    double c_norm = 0.0;
    double c1_norm = 0.0;
    double l1_norm = 0.0;
    double linf_norm = 0.0;
};

struct FdResult {
    Matrix value;
    bool one_sided = false;
    bool left_triangle = false;
};

/// Largest absolute row sum.
double matrix_norm(const Matrix& m);

/// Grid approximations of the C, C1, L1 and Linf norms. Each entry is reduced
/// separately over the grid (sup or integral) and the results are combined by
/// the largest row sum. For kernels the derivative is the first-argument
/// partial and the L1 field is the largest integral over the second argument.
NormBundle kernel_norms(const TwoTimeKernel& k, const TimeGrid& g);
NormBundle function_norms(const OneTimeMatrixFn& f, const TimeGrid& g);

/// Step used when no analytic partial is supplied.
double default_fd_step(double horizon);

/// Central difference in t, one-sided second-order stencils near the triangle edges.
FdResult finite_difference_dt(const TwoTimeKernel& k, double t, double s, double h);

}  // namespace tilq
