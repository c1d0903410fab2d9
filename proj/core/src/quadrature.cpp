#include "tilq/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace tilq {

std::vector<double> simpson_weights(int intervals, double h) {
    if (intervals < 1) return std::vector<double>(1, 0.0);
    std::vector<double> w(static_cast<std::size_t>(intervals) + 1, 0.0);
    if (intervals == 1) {
        w[0] = w[1] = 0.5 * h;
        return w;
    }
    int start = 0;
    if (intervals % 2 == 1) {
        const double c = 3.0 * h / 8.0;
        w[0] += c;
        w[1] += 3.0 * c;
        w[2] += 3.0 * c;
        w[3] += c;
        start = 3;
    }
    for (int i = start; i + 2 <= intervals; i += 2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    return w;
}

namespace {

template <typename T>
T zero_like(const T& v) {
    if constexpr (std::is_same_v<T, double>) {
        return 0.0;
    } else {
        return T::Zero(v.rows(), v.cols());
    }
}

template <typename T>
T integrate_impl(const std::vector<T>& values, double h) {
    if (values.empty()) throw InvalidInputError("integrate: no samples");
    const int intervals = static_cast<int>(values.size()) - 1;
    T acc = zero_like(values[0]);
    if (intervals == 0) return acc;
    const auto w = simpson_weights(intervals, h);
    for (std::size_t i = 0; i < values.size(); ++i) acc += w[i] * values[i];
    return acc;
}

template <typename T>
std::vector<T> tail_impl(const std::vector<T>& f, double h) {
    const int n = static_cast<int>(f.size());
    if (n == 0) return {};
    std::vector<T> out(static_cast<std::size_t>(n), zero_like(f[0]));
    if (n == 1) return out;
    const int last = n - 1;
    // even[i]: Simpson integral from node i to the end, valid when (last - i) is even.
    std::vector<T> even(static_cast<std::size_t>(n), zero_like(f[0]));
    for (int i = last - 2; i >= 0; i -= 2) {
        even[i] = even[i + 2] + (h / 3.0) * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
    }
    for (int i = last - 1; i >= 0; --i) {
        const int c = last - i;
        if (c % 2 == 0) {
            out[i] = even[i];
        } else if (c == 1) {
            if (n >= 4) {
                out[i] = (h / 24.0) * (f[last - 3] - 5.0 * f[last - 2] + 19.0 * f[last - 1] + 9.0 * f[last]);
            } else if (n == 3) {
                out[i] = (h / 12.0) * (-f[0] + 8.0 * f[1] + 5.0 * f[2]);
            } else {
                out[i] = 0.5 * h * (f[0] + f[1]);
            }
        } else {
            out[i] = (3.0 * h / 8.0) * (f[i] + 3.0 * f[i + 1] + 3.0 * f[i + 2] + f[i + 3]) + even[i + 3];
        }
    }
    return out;
}

}  // namespace

double integrate_uniform(const std::vector<double>& values, double h) { return integrate_impl(values, h); }
Matrix integrate_uniform(const std::vector<Matrix>& values, double h) { return integrate_impl(values, h); }

std::vector<double> tail_integrals(const std::vector<double>& values, double h) { return tail_impl(values, h); }
std::vector<Matrix> tail_integrals(const std::vector<Matrix>& values, double h) { return tail_impl(values, h); }

Matrix cubic_interpolate(const std::vector<Matrix>& values, double x) {
    const int n = static_cast<int>(values.size());
    if (n == 0) throw InvalidInputError("cubic_interpolate: no samples");
    if (n == 1) return values[0];
    if (n < 4) {
        const int j = std::clamp(static_cast<int>(std::floor(x)), 0, n - 2);
        const double a = x - j;
        return (1.0 - a) * values[j] + a * values[j + 1];
    }
    const int j = static_cast<int>(std::floor(x));
    const int k = std::clamp(j - 1, 0, n - 4);
    Matrix acc = Matrix::Zero(values[0].rows(), values[0].cols());
    for (int a = 0; a < 4; ++a) {
        double l = 1.0;
        for (int b = 0; b < 4; ++b) {
            if (b != a) l *= (x - (k + b)) / static_cast<double>(a - b);
        }
        acc += l * values[k + a];
    }
    return acc;
}

Matrix derivative_4th(const std::vector<Matrix>& f, int i, double h) {
    const int n = static_cast<int>(f.size());
    if (n < 5) throw InvalidInputError("derivative_4th: need at least 5 samples");
    if (i < 0 || i >= n) throw InvalidInputError("derivative_4th: index out of range");
    const double c = 1.0 / (12.0 * h);
    if (i >= 2 && i <= n - 3) return c * (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]);
    if (i == 0) return c * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]);
    if (i == 1) return c * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
    const int l = n - 1;
    if (i == l) return c * (25.0 * f[l] - 48.0 * f[l - 1] + 36.0 * f[l - 2] - 16.0 * f[l - 3] + 3.0 * f[l - 4]);
    return c * (3.0 * f[l] + 10.0 * f[l - 1] - 18.0 * f[l - 2] + 6.0 * f[l - 3] - f[l - 4]);
}

}  // namespace tilq
