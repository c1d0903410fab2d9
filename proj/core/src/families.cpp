#include "tilq/families.hpp"

#include <cmath>

namespace tilq::families {

namespace {

void check_coeffs(const std::vector<Matrix>& c) {
    if (c.empty()) throw InvalidInputError("polynomial: no coefficients");
    for (const auto& m : c) {
        if (m.rows() != c[0].rows() || m.cols() != c[0].cols()) {
            throw InvalidInputError("polynomial: coefficient shapes differ");
        }
    }
}

Matrix horner(const std::vector<Matrix>& c, double x) {
    Matrix acc = c.back();
    for (std::size_t k = c.size() - 1; k-- > 0;) acc = acc * x + c[k];
    return acc;
}

std::vector<Matrix> derivative_coeffs(const std::vector<Matrix>& c) {
    std::vector<Matrix> d;
    for (std::size_t k = 1; k < c.size(); ++k) d.push_back(static_cast<double>(k) * c[k]);
    if (d.empty()) d.push_back(Matrix::Zero(c[0].rows(), c[0].cols()));
    return d;
}

void check_hyperbolic(double k, double theta) {
    if (!(k >= 0.0) || !(theta >= 0.0)) throw InvalidInputError("hyperbolic: k and theta must be nonnegative");
}

}  // namespace

OneTimeMatrixFn constant(const Matrix& K, double T) { return OneTimeMatrixFn::constant(K, T); }

OneTimeMatrixFn polynomial(const std::vector<Matrix>& coeffs, double T) {
    check_coeffs(coeffs);
    const auto d = derivative_coeffs(coeffs);
    return OneTimeMatrixFn(static_cast<int>(coeffs[0].rows()), static_cast<int>(coeffs[0].cols()), T,
                           [coeffs](double t) { return horner(coeffs, t); }, [d](double t) { return horner(d, t); });
}

OneTimeMatrixFn exponential_to_horizon(const Matrix& K, double rho, double T) {
    return OneTimeMatrixFn(static_cast<int>(K.rows()), static_cast<int>(K.cols()), T,
                           [K, rho, T](double t) -> Matrix { return std::exp(-rho * (T - t)) * K; },
                           [K, rho, T](double t) -> Matrix { return rho * std::exp(-rho * (T - t)) * K; });
}

OneTimeMatrixFn hyperbolic_to_horizon(const Matrix& K, double k, double theta, double T) {
    check_hyperbolic(k, theta);
    return OneTimeMatrixFn(
        static_cast<int>(K.rows()), static_cast<int>(K.cols()), T,
        [K, k, theta, T](double t) -> Matrix { return std::pow(1.0 + k * (T - t), -theta) * K; },
        [K, k, theta, T](double t) -> Matrix { return theta * k * std::pow(1.0 + k * (T - t), -theta - 1.0) * K; });
}

TwoTimeKernel constant_kernel(const Matrix& K, double T, bool symmetric) {
    return TwoTimeKernel::constant(K, T, symmetric);
}

TwoTimeKernel polynomial_lag(const std::vector<Matrix>& coeffs, double T, bool symmetric) {
    check_coeffs(coeffs);
    const auto d = derivative_coeffs(coeffs);
    return TwoTimeKernel(
        static_cast<int>(coeffs[0].rows()), static_cast<int>(coeffs[0].cols()), T,
        [coeffs](double t, double s) { return horner(coeffs, s - t); },
        [d](double t, double s) -> Matrix { return -horner(d, s - t); }, symmetric);
}

TwoTimeKernel polynomial_in_s(const std::vector<Matrix>& coeffs, double T, bool symmetric) {
    check_coeffs(coeffs);
    const Matrix zero = Matrix::Zero(coeffs[0].rows(), coeffs[0].cols());
    return TwoTimeKernel(
        static_cast<int>(coeffs[0].rows()), static_cast<int>(coeffs[0].cols()), T,
        [coeffs](double, double s) { return horner(coeffs, s); }, [zero](double, double) { return zero; }, symmetric);
}

TwoTimeKernel exponential(const Matrix& K, double rho, double T, bool symmetric) {
    return TwoTimeKernel(
        static_cast<int>(K.rows()), static_cast<int>(K.cols()), T,
        [K, rho](double t, double s) -> Matrix { return std::exp(-rho * (s - t)) * K; },
        [K, rho](double t, double s) -> Matrix { return rho * std::exp(-rho * (s - t)) * K; }, symmetric);
}

TwoTimeKernel hyperbolic(const Matrix& K, double k, double theta, double T, bool symmetric) {
    check_hyperbolic(k, theta);
    return TwoTimeKernel(
        static_cast<int>(K.rows()), static_cast<int>(K.cols()), T,
        [K, k, theta](double t, double s) -> Matrix { return std::pow(1.0 + k * (s - t), -theta) * K; },
        [K, k, theta](double t, double s) -> Matrix {
            return theta * k * std::pow(1.0 + k * (s - t), -theta - 1.0) * K;
        },
        symmetric);
}

}  // namespace tilq::families
