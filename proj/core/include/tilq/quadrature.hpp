#pragma once

#include "tilq/types.hpp"

#include <vector>

namespace tilq {

/// Composite Simpson weights for `intervals` uniform steps of width h.
/// Odd counts use a 3/8 panel on the first three intervals; a single interval
/// falls back to the trapezoid rule.
std::vector<double> simpson_weights(int intervals, double h);

double integrate_uniform(const std::vector<double>& values, double h);
Matrix integrate_uniform(const std::vector<Matrix>& values, double h);

/// I[i] = integral of the sampled function from node i to the last node.
/// Fourth order everywhere, including the final single interval.
std::vector<double> tail_integrals(const std::vector<double>& values, double h);
std::vector<Matrix> tail_integrals(const std::vector<Matrix>& values, double h);

/// Cubic Lagrange interpolation of uniformly sampled values at x (in node units
/// from the first sample). Uses one-sided stencils at the ends.
Matrix cubic_interpolate(const std::vector<Matrix>& values, double x);

/// Fourth-order derivative of uniformly sampled values at node i.
Matrix derivative_4th(const std::vector<Matrix>& values, int i, double h);

}  // namespace tilq
