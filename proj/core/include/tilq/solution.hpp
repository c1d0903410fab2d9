#pragma once

#include "tilq/kernels.hpp"

#include <string>
#include <vector>

namespace tilq {

struct ContractionConstants {
    double r = 0.0;
    double rho_bar = 0.0;
    double beta_bar = 0.0;
    double omega_bar = 0.0;
    double gamma_bar = 0.0;
    double tau1 = 0.0;
    double tau2 = 0.0;
    double tau3 = 0.0;
    double tau = 0.0;
    /// 4 T gamma_bar e^{4 omega_bar}: Lipschitz bound of the nonlocal term.
    double f_lipschitz = 0.0;
    /// e^{2 ||A||_L1} (||G(T)|| + T ||Q||_C).
    double a_priori_bound = 0.0;
};

struct WindowReport {
    int first = 0;  ///< left node index
    int last = 0;   ///< right node index
    double a = 0.0;
    double b = 0.0;
    int iterations = 0;
    double contraction_factor = 0.0;  ///< largest ratio of successive update norms
    double final_delta = 0.0;
    bool within_tau = false;
    int halvings = 0;
};

struct SolveMeta {
    ContractionConstants constants;
    std::vector<WindowReport> windows;
    std::string window_mode;  ///< "theoretical", "resolved-minimum" or "override"
    int refinement = 1;       ///< factor applied to the requested grid
    double tol = 0.0;
    double max_residual = 0.0;
    double max_contraction_factor = 0.0;
    int total_iterations = 0;
};

/// Symmetric matrix function P on a grid.
class RiccatiSolution {
public:
    RiccatiSolution() = default;
    RiccatiSolution(TimeGrid grid, std::vector<Matrix> values);

    const TimeGrid& grid() const { return grid_; }
    const std::vector<Matrix>& values() const { return values_; }
    std::vector<Matrix>& mutable_values() { return values_; }
    const Matrix& node(int i) const { return values_[static_cast<std::size_t>(i)]; }
    int dim() const { return values_.empty() ? 0 : static_cast<int>(values_[0].rows()); }

    /// Node value, or cubic interpolation between nodes.
    Matrix at(double t) const;
    double c_norm() const;

    SolveMeta meta;

private:
    TimeGrid grid_;
    std::vector<Matrix> values_;
};

}  // namespace tilq
