#include "tilq/kernels.hpp"

#include "tilq/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace tilq {

TimeGrid TimeGrid::uniform(double T, int N) {
    if (!(T > 0.0) || !std::isfinite(T)) throw InvalidInputError("TimeGrid: horizon must be positive and finite");
    if (N < 1) throw InvalidInputError("TimeGrid: need at least one interval");
    TimeGrid g;
    g.nodes_.resize(static_cast<std::size_t>(N) + 1);
    const double h = T / N;
    for (int i = 0; i <= N; ++i) g.nodes_[static_cast<std::size_t>(i)] = (i == N) ? T : i * h;
    g.uniform_ = true;
    g.step_ = h;
    return g;
}

TimeGrid TimeGrid::from_nodes(std::vector<double> nodes) {
    if (nodes.size() < 2) throw InvalidInputError("TimeGrid: need at least two nodes");
    if (nodes.front() != 0.0) throw InvalidInputError("TimeGrid: first node must be 0");
    double max_gap = 0.0;
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const double gap = nodes[i] - nodes[i - 1];
        if (!(gap > 0.0) || !std::isfinite(nodes[i])) {
            throw InvalidInputError("TimeGrid: nodes must be finite and strictly increasing");
        }
        max_gap = std::max(max_gap, gap);
        min_gap = std::min(min_gap, gap);
    }
    TimeGrid g;
    g.nodes_ = std::move(nodes);
    g.step_ = max_gap;
    g.uniform_ = (max_gap - min_gap) <= 64.0 * std::numeric_limits<double>::epsilon() * g.nodes_.back();
    return g;
}

int TimeGrid::node_index(double t) const {
    const double tol = 1e-12 * std::max(1.0, horizon());
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t - tol);
    if (it != nodes_.end() && std::abs(*it - t) <= tol) return static_cast<int>(it - nodes_.begin());
    return -1;
}

TimeGrid TimeGrid::refined(int factor) const {
    if (factor < 1) throw InvalidInputError("TimeGrid::refined: factor must be >= 1");
    if (factor == 1) return *this;
    if (uniform_) return uniform(horizon(), intervals() * factor);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(intervals() * factor) + 1);
    for (int i = 0; i < intervals(); ++i) {
        const double a = nodes_[static_cast<std::size_t>(i)];
        const double b = nodes_[static_cast<std::size_t>(i) + 1];
        for (int k = 0; k < factor; ++k) out.push_back(a + (b - a) * k / factor);
    }
    out.push_back(nodes_.back());
    return from_nodes(std::move(out));
}

namespace {

void check_shape(const Matrix& m, int rows, int cols, double t, double s, const char* what) {
    if (m.rows() != rows || m.cols() != cols) {
        throw EvaluationError(std::string(what) + ": returned " + std::to_string(m.rows()) + "x" +
                                  std::to_string(m.cols()) + ", expected " + std::to_string(rows) + "x" +
                                  std::to_string(cols),
                              t, s);
    }
    if (!m.allFinite()) throw EvaluationError(std::string(what) + ": non-finite value", t, s);
}

}  // namespace

OneTimeMatrixFn::OneTimeMatrixFn(int rows, int cols, double horizon, Fn eval, Fn eval_dt)
    : rows_(rows), cols_(cols), horizon_(horizon), eval_(std::move(eval)), eval_dt_(std::move(eval_dt)) {
    if (rows < 1 || cols < 1) throw InvalidInputError("OneTimeMatrixFn: dimensions must be positive");
    if (!(horizon > 0.0)) throw InvalidInputError("OneTimeMatrixFn: horizon must be positive");
    if (!eval_) throw InvalidInputError("OneTimeMatrixFn: missing evaluator");
}

OneTimeMatrixFn OneTimeMatrixFn::constant(const Matrix& value, double horizon) {
    const Matrix zero = Matrix::Zero(value.rows(), value.cols());
    return OneTimeMatrixFn(static_cast<int>(value.rows()), static_cast<int>(value.cols()), horizon,
                           [value](double) { return value; }, [zero](double) { return zero; });
}

Matrix OneTimeMatrixFn::operator()(double t) const {
    Matrix m = eval_(t);
    check_shape(m, rows_, cols_, t, t, "one-time function");
    return m;
}

Matrix OneTimeMatrixFn::dt(double t) const {
    if (eval_dt_) {
        Matrix m = eval_dt_(t);
        check_shape(m, rows_, cols_, t, t, "one-time derivative");
        return m;
    }
    const double h = default_fd_step(horizon_);
    if (t - h >= 0.0 && t + h <= horizon_) return ((*this)(t + h) - (*this)(t - h)) / (2.0 * h);
    if (t - h < 0.0) return (-3.0 * (*this)(t) + 4.0 * (*this)(t + h) - (*this)(t + 2.0 * h)) / (2.0 * h);
    return (3.0 * (*this)(t) - 4.0 * (*this)(t - h) + (*this)(t - 2.0 * h)) / (2.0 * h);
}

TwoTimeKernel::TwoTimeKernel(int rows, int cols, double horizon, Fn eval, Fn eval_dt, bool symmetry_required)
    : rows_(rows),
      cols_(cols),
      horizon_(horizon),
      eval_(std::move(eval)),
      eval_dt_(std::move(eval_dt)),
      symmetric_(symmetry_required) {
    if (rows < 1 || cols < 1) throw InvalidInputError("TwoTimeKernel: dimensions must be positive");
    if (!(horizon > 0.0)) throw InvalidInputError("TwoTimeKernel: horizon must be positive");
    if (symmetry_required && rows != cols) throw InvalidInputError("TwoTimeKernel: symmetric kernel must be square");
    if (!eval_) throw InvalidInputError("TwoTimeKernel: missing evaluator");
}

TwoTimeKernel TwoTimeKernel::constant(const Matrix& value, double horizon, bool symmetry_required) {
    const Matrix zero = Matrix::Zero(value.rows(), value.cols());
    return TwoTimeKernel(static_cast<int>(value.rows()), static_cast<int>(value.cols()), horizon,
                         [value](double, double) { return value; }, [zero](double, double) { return zero; },
                         symmetry_required);
}

Matrix TwoTimeKernel::operator()(double t, double s) const {
    Matrix m = eval_(t, s);
    check_shape(m, rows_, cols_, t, s, "kernel");
    return m;
}

Matrix TwoTimeKernel::dt(double t, double s) const {
    if (eval_dt_) {
        Matrix m = eval_dt_(t, s);
        check_shape(m, rows_, cols_, t, s, "kernel partial");
        return m;
    }
    return finite_difference_dt(*this, t, s, default_fd_step(horizon_)).value;
}

double matrix_norm(const Matrix& m) {
    if (!m.allFinite()) throw InvalidInputError("matrix_norm: non-finite entry");
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

double default_fd_step(double horizon) { return std::max(1e-6, 1e-6 * horizon); }

FdResult finite_difference_dt(const TwoTimeKernel& k, double t, double s, double h) {
    if (!(h > 0.0)) throw InvalidInputError("finite_difference_dt: step must be positive");
    FdResult r;
    if (t - h >= 0.0 && t + h <= s) {
        r.value = (k(t + h, s) - k(t - h, s)) / (2.0 * h);
        return r;
    }
    r.one_sided = true;
    if (t - 2.0 * h >= 0.0) {
        r.value = (3.0 * k(t, s) - 4.0 * k(t - h, s) + k(t - 2.0 * h, s)) / (2.0 * h);
        return r;
    }
    r.left_triangle = (t + 2.0 * h > s);
    r.value = (-3.0 * k(t, s) + 4.0 * k(t + h, s) - k(t + 2.0 * h, s)) / (2.0 * h);
    return r;
}

namespace {

// Integral of samples on nodes [first, last] of the grid.
double node_integral(const TimeGrid& g, const std::vector<double>& v, int first) {
    const int count = static_cast<int>(v.size()) - 1;
    if (count <= 0) return 0.0;
    if (g.is_uniform()) return integrate_uniform(v, g.step());
    double acc = 0.0;
    for (int j = 0; j < count; ++j) acc += 0.5 * (g[first + j + 1] - g[first + j]) * (v[j] + v[j + 1]);
    return acc;
}

NormBundle combine(const Matrix& sup, const Matrix& sup_dt, const Matrix& l1) {
    NormBundle b;
    b.c_norm = sup.rowwise().sum().maxCoeff();
    b.c1_norm = (sup + sup_dt).rowwise().sum().maxCoeff();
    b.l1_norm = l1.rowwise().sum().maxCoeff();
    b.linf_norm = b.c_norm;
    return b;
}

}  // namespace

NormBundle kernel_norms(const TwoTimeKernel& k, const TimeGrid& g) {
    const int rows = k.rows();
    const int cols = k.cols();
    Matrix sup = Matrix::Zero(rows, cols);
    Matrix sup_dt = Matrix::Zero(rows, cols);
    Matrix l1 = Matrix::Zero(rows, cols);
    const int n = g.size();
    std::vector<Matrix> row_abs;
    for (int i = 0; i < n; ++i) {
        row_abs.clear();
        for (int j = i; j < n; ++j) {
            const Matrix v = k(g[i], g[j]).cwiseAbs();
            const Matrix d = k.dt(g[i], g[j]).cwiseAbs();
            sup = sup.cwiseMax(v);
            sup_dt = sup_dt.cwiseMax(d);
            row_abs.push_back(v);
        }
        for (int a = 0; a < rows; ++a) {
            for (int b = 0; b < cols; ++b) {
                std::vector<double> samples(row_abs.size());
                for (std::size_t j = 0; j < row_abs.size(); ++j) samples[j] = row_abs[j](a, b);
                l1(a, b) = std::max(l1(a, b), node_integral(g, samples, i));
            }
        }
    }
    return combine(sup, sup_dt, l1);
}

NormBundle function_norms(const OneTimeMatrixFn& f, const TimeGrid& g) {
    const int rows = f.rows();
    const int cols = f.cols();
    Matrix sup = Matrix::Zero(rows, cols);
    Matrix sup_dt = Matrix::Zero(rows, cols);
    std::vector<Matrix> abs_vals;
    abs_vals.reserve(static_cast<std::size_t>(g.size()));
    for (int i = 0; i < g.size(); ++i) {
        const Matrix v = f(g[i]).cwiseAbs();
        sup = sup.cwiseMax(v);
        sup_dt = sup_dt.cwiseMax(f.dt(g[i]).cwiseAbs());
        abs_vals.push_back(v);
    }
    Matrix l1 = Matrix::Zero(rows, cols);
    for (int a = 0; a < rows; ++a) {
        for (int b = 0; b < cols; ++b) {
            std::vector<double> samples(abs_vals.size());
            for (std::size_t j = 0; j < abs_vals.size(); ++j) samples[j] = abs_vals[j](a, b);
            l1(a, b) = node_integral(g, samples, 0);
        }
    }
    return combine(sup, sup_dt, l1);
}

}  // namespace tilq
