#pragma once

#include "tilq/kernels.hpp"

#include <vector>

namespace tilq::families {

// One-time functions on [0, T] with analytic derivatives.
OneTimeMatrixFn constant(const Matrix& K, double T);
/// sum_k c_k t^k
OneTimeMatrixFn polynomial(const std::vector<Matrix>& coeffs, double T);
/// e^{-rho (T - t)} K
OneTimeMatrixFn exponential_to_horizon(const Matrix& K, double rho, double T);
/// (1 + k (T - t))^{-theta} K
OneTimeMatrixFn hyperbolic_to_horizon(const Matrix& K, double k, double theta, double T);

// Two-time kernels with analytic first-argument partials.
TwoTimeKernel constant_kernel(const Matrix& K, double T, bool symmetric = false);
/// sum_k c_k (s - t)^k
TwoTimeKernel polynomial_lag(const std::vector<Matrix>& coeffs, double T, bool symmetric = false);
/// sum_k c_k s^k; independent of the first argument
TwoTimeKernel polynomial_in_s(const std::vector<Matrix>& coeffs, double T, bool symmetric = false);
/// e^{-rho (s - t)} K
TwoTimeKernel exponential(const Matrix& K, double rho, double T, bool symmetric = false);
/// (1 + k (s - t))^{-theta} K
TwoTimeKernel hyperbolic(const Matrix& K, double k, double theta, double T, bool symmetric = false);

}  // namespace tilq::families
