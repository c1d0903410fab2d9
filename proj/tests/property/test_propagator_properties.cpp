#include "problems.hpp"

#include <tilq/propagators.hpp>
#include <tilq/quadrature.hpp>

#include <unsupported/Eigen/MatrixFunctions>

#include <gtest/gtest.h>

#include <cmath>

using namespace tilq;
using namespace tilq::fixtures;

namespace {

MatrixFn random_coefficient(std::mt19937& rng, int n) {
    const Matrix C0 = random_matrix(rng, n, n, 1.0);
    const Matrix C1 = random_matrix(rng, n, n, 1.0);
    const Matrix C2 = random_matrix(rng, n, n, 0.5);
    return [C0, C1, C2](double t) -> Matrix { return C0 + t * C1 + std::sin(3.0 * t) * C2; };
}

}  // namespace

TEST(PropagatorProperty, LiouvilleFormula) {
    std::mt19937 rng(201);
    const int N = 200;
    const auto g = TimeGrid::uniform(1.0, N);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 1 + trial % 3;
        const auto C = random_coefficient(rng, n);
        const auto U = fundamental_solution(C, n, g);
        // Trace integral on a fine grid.
        const int fine = 4000;
        std::vector<double> tr;
        for (int i = 0; i <= fine; ++i) tr.push_back(C(static_cast<double>(i) / fine).trace());
        const auto tails = tail_integrals(tr, 1.0 / fine);
        for (int i = 0; i <= N; i += 25) {
            const double integral = tails[0] - tails[static_cast<std::size_t>(i * (fine / N))];
            const double expected = std::exp(integral);
            EXPECT_NEAR(U.node_value(i).determinant(), expected, 1e-8 * expected) << trial << " " << i;
        }
    }
}

TEST(PropagatorProperty, TransitionNormBound) {
    std::mt19937 rng(202);
    const int N = 200;
    const auto g = TimeGrid::uniform(1.0, N);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + trial % 2;
        const auto C = random_coefficient(rng, n);
        const auto U = fundamental_solution(C, n, g);
        for (int k = 0; k < 10; ++k) {
            double s = unit(rng);
            double t = unit(rng);
            if (t < s) std::swap(s, t);
            std::vector<double> norms;
            const int fine = 512;
            for (int i = 0; i <= fine; ++i) norms.push_back(matrix_norm(C(s + (t - s) * i / fine)));
            const double bound = std::exp(integrate_uniform(norms, (t - s) / fine));
            EXPECT_LE(matrix_norm(U.transition(t, s)), bound * (1.0 + 1e-8));
        }
    }
}

TEST(PropagatorProperty, FourthOrderConvergence) {
    std::mt19937 rng(203);
    for (int trial = 0; trial < 8; ++trial) {
        const int n = 2 + trial % 2;
        const Matrix C = random_matrix(rng, n, n, 1.5);
        const Matrix exact = C.exp();
        auto err = [&](int N) {
            const auto U = fundamental_solution([C](double) { return C; }, n, TimeGrid::uniform(1.0, N));
            return (U.node_value(N) - exact).cwiseAbs().maxCoeff();
        };
        const double e1 = err(20);
        const double e2 = err(40);
        EXPECT_GE(e1 / e2, 8.0) << trial;
    }
}
