#include <tilq/families.hpp>
#include <tilq/kernels.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace tilq;

namespace {

TwoTimeKernel scalar_kernel(std::function<double(double, double)> f, double T = 1.0) {
    return TwoTimeKernel(1, 1, T, [f](double t, double s) { return Matrix::Constant(1, 1, f(t, s)); });
}

}  // namespace

TEST(TimeGrid, UniformNodesAndLookup) {
    const auto g = TimeGrid::uniform(2.0, 8);
    EXPECT_EQ(g.size(), 9);
    EXPECT_EQ(g.intervals(), 8);
    EXPECT_DOUBLE_EQ(g.step(), 0.25);
    EXPECT_DOUBLE_EQ(g.horizon(), 2.0);
    EXPECT_TRUE(g.is_uniform());
    EXPECT_EQ(g.node_index(0.75), 3);
    EXPECT_EQ(g.node_index(0.8), -1);
    EXPECT_EQ(g.refined(2).intervals(), 16);
}

TEST(TimeGrid, RejectsBadInput) {
    EXPECT_THROW(TimeGrid::uniform(0.0, 4), InvalidInputError);
    EXPECT_THROW(TimeGrid::uniform(1.0, 0), InvalidInputError);
    EXPECT_THROW(TimeGrid::from_nodes({0.0, 0.5, 0.5, 1.0}), InvalidInputError);
    EXPECT_THROW(TimeGrid::from_nodes({0.1, 1.0}), InvalidInputError);
    EXPECT_FALSE(TimeGrid::from_nodes({0.0, 0.1, 1.0}).is_uniform());
}

TEST(MatrixNorm, RowSumExamples) {
    Matrix a(2, 2);
    a << 1, -2, 3, 4;
    EXPECT_DOUBLE_EQ(matrix_norm(a), 7.0);
    EXPECT_DOUBLE_EQ(matrix_norm(Matrix::Zero(3, 3)), 0.0);
    EXPECT_DOUBLE_EQ(matrix_norm(Matrix::Identity(5, 5)), 1.0);
}

TEST(MatrixNorm, RejectsNonFinite) {
    Matrix a = Matrix::Zero(2, 2);
    a(1, 0) = std::nan("");
    EXPECT_THROW(matrix_norm(a), InvalidInputError);
}

TEST(KernelNorms, ConstantScalarKernel) {
    const auto k = TwoTimeKernel::constant(Matrix::Ones(1, 1), 1.0);
    const auto b = kernel_norms(k, TimeGrid::uniform(1.0, 50));
    EXPECT_DOUBLE_EQ(b.c_norm, 1.0);
    EXPECT_DOUBLE_EQ(b.c1_norm, 1.0);
    EXPECT_NEAR(b.l1_norm, 1.0, 1e-14);
    EXPECT_DOUBLE_EQ(b.linf_norm, 1.0);
}

TEST(KernelNorms, LagKernelSupAtCorner) {
    const auto k = scalar_kernel([](double t, double s) { return s - t; });
    EXPECT_NEAR(kernel_norms(k, TimeGrid::uniform(1.0, 40)).c_norm, 1.0, 1e-14);
}

TEST(KernelNorms, HyperbolicC1IsTwo) {
    // sup |k| = 1 and sup |k_t| = (1 + s - t)^-2 = 1, both on the diagonal.
    const auto k = families::hyperbolic(Matrix::Ones(1, 1), 1.0, 1.0, 1.0);
    EXPECT_NEAR(kernel_norms(k, TimeGrid::uniform(1.0, 64)).c1_norm, 2.0, 1e-12);
    // Dense sampling of the analytic partial agrees.
    double sup = 0.0;
    for (int i = 0; i <= 400; ++i) {
        for (int j = i; j <= 400; ++j) {
            const double t = i / 400.0;
            const double s = j / 400.0;
            sup = std::max(sup, std::abs(k(t, s)(0, 0)) + std::abs(k.dt(t, s)(0, 0)));
        }
    }
    EXPECT_NEAR(sup, 2.0, 1e-12);
}

TEST(KernelNorms, EntrywiseReductionBeforeRowSum) {
    // Entries peak at different times: the norm uses per-entry sups.
    const auto k = TwoTimeKernel(1, 2, 1.0, [](double t, double) {
        Matrix m(1, 2);
        m << t, 1.0 - t;
        return m;
    });
    EXPECT_NEAR(kernel_norms(k, TimeGrid::uniform(1.0, 10)).c_norm, 2.0, 1e-14);
}

TEST(FunctionNorms, ConstantFunction) {
    Matrix a(2, 2);
    a << 1, -2, 0.5, 0.5;
    const auto b = function_norms(OneTimeMatrixFn::constant(a, 2.0), TimeGrid::uniform(2.0, 20));
    EXPECT_DOUBLE_EQ(b.c_norm, 3.0);
    EXPECT_DOUBLE_EQ(b.c1_norm, 3.0);
    EXPECT_NEAR(b.l1_norm, 6.0, 1e-13);
}

TEST(FiniteDifference, ProductKernel) {
    const auto k = scalar_kernel([](double t, double s) { return t * s; });
    const auto r = finite_difference_dt(k, 0.5, 1.0, 1e-4);
    EXPECT_NEAR(r.value(0, 0), 1.0, 1e-7);
    EXPECT_FALSE(r.one_sided);
}

TEST(FiniteDifference, ConstantKernelIsExactlyZero) {
    const auto k = scalar_kernel([](double, double) { return 3.7; });
    EXPECT_EQ(finite_difference_dt(k, 0.3, 0.9, 1e-4).value(0, 0), 0.0);
}

TEST(FiniteDifference, HyperbolicAtCorner) {
    const auto k = scalar_kernel([](double t, double s) { return 1.0 / (1.0 + s - t); });
    const auto r = finite_difference_dt(k, 0.0, 1.0, 1e-4);
    EXPECT_NEAR(r.value(0, 0), 0.25, 1e-6);
    EXPECT_TRUE(r.one_sided);
    EXPECT_FALSE(r.left_triangle);
}

TEST(FiniteDifference, DiagonalUsesBackwardStencil) {
    const auto k = scalar_kernel([](double t, double s) { return t * t * s; });
    const auto r = finite_difference_dt(k, 0.5, 0.5, 1e-4);
    EXPECT_TRUE(r.one_sided);
    EXPECT_FALSE(r.left_triangle);
    EXPECT_NEAR(r.value(0, 0), 0.5, 1e-7);
}

TEST(FiniteDifference, CornerOriginLeavesTriangle) {
    const auto k = scalar_kernel([](double t, double s) { return t + s; });
    EXPECT_TRUE(finite_difference_dt(k, 0.0, 0.0, 1e-4).left_triangle);
}

TEST(Kernels, FallbackPartialMatchesAnalytic) {
    const auto k = scalar_kernel([](double t, double s) { return std::exp(-0.7 * (s - t)); }, 2.0);
    EXPECT_EQ(k.provenance(), Provenance::finite_difference);
    EXPECT_NEAR(k.dt(0.4, 1.3)(0, 0), 0.7 * std::exp(-0.7 * 0.9), 1e-8);
    const auto e = families::exponential(Matrix::Ones(1, 1), 0.7, 2.0);
    EXPECT_EQ(e.provenance(), Provenance::analytic);
    EXPECT_NEAR(e.dt(0.4, 1.3)(0, 0), 0.7 * std::exp(-0.7 * 0.9), 1e-15);
}

TEST(Kernels, EvaluationErrorsAreTagged) {
    const auto bad = scalar_kernel([](double t, double) { return t > 0.5 ? std::nan("") : 1.0; });
    EXPECT_NO_THROW(bad(0.2, 0.9));
    try {
        bad(0.75, 0.9);
        FAIL();
    } catch (const EvaluationError& e) {
        EXPECT_DOUBLE_EQ(e.t(), 0.75);
        EXPECT_DOUBLE_EQ(e.s(), 0.9);
    }
    const TwoTimeKernel wrong(2, 2, 1.0, [](double, double) { return Matrix::Zero(1, 2); });
    EXPECT_THROW(wrong(0.0, 0.5), EvaluationError);
    const OneTimeMatrixFn f(1, 1, 1.0, [](double) { return Matrix::Constant(1, 1, INFINITY); });
    EXPECT_THROW(f(0.1), EvaluationError);
}

TEST(Kernels, ConstructionChecks) {
    EXPECT_THROW(TwoTimeKernel(0, 1, 1.0, [](double, double) { return Matrix(); }), InvalidInputError);
    EXPECT_THROW(TwoTimeKernel(2, 1, 1.0, [](double, double) { return Matrix(); }, nullptr, true), InvalidInputError);
    EXPECT_THROW(OneTimeMatrixFn(1, 1, -1.0, [](double) { return Matrix(); }), InvalidInputError);
}

TEST(Families, PolynomialDerivatives) {
    Matrix c0 = Matrix::Constant(1, 1, 1.0), c1 = Matrix::Constant(1, 1, 2.0), c2 = Matrix::Constant(1, 1, 3.0);
    const auto f = families::polynomial({c0, c1, c2}, 1.0);
    EXPECT_DOUBLE_EQ(f(0.5)(0, 0), 1.0 + 1.0 + 0.75);
    EXPECT_DOUBLE_EQ(f.dt(0.5)(0, 0), 2.0 + 3.0);
    const auto lag = families::polynomial_lag({c0, c1, c2}, 1.0);
    EXPECT_DOUBLE_EQ(lag(0.25, 0.75)(0, 0), 1.0 + 1.0 + 0.75);
    EXPECT_DOUBLE_EQ(lag.dt(0.25, 0.75)(0, 0), -(2.0 + 3.0));
    const auto ins = families::polynomial_in_s({c0, c1}, 1.0);
    EXPECT_DOUBLE_EQ(ins.dt(0.25, 0.75)(0, 0), 0.0);
}

TEST(Families, HorizonDiscounts) {
    const auto g = families::hyperbolic_to_horizon(Matrix::Ones(1, 1), 1.0, 1.0, 1.0);
    EXPECT_DOUBLE_EQ(g(0.0)(0, 0), 0.5);
    EXPECT_DOUBLE_EQ(g.dt(0.0)(0, 0), 0.25);
    const auto e = families::exponential_to_horizon(Matrix::Ones(1, 1), 2.0, 1.0);
    EXPECT_NEAR(e.dt(0.5)(0, 0), 2.0 * std::exp(-1.0), 1e-15);
    EXPECT_THROW(families::hyperbolic(Matrix::Ones(1, 1), -1.0, 1.0, 1.0), InvalidInputError);
}
