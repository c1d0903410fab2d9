#include "tilq/bvp.hpp"

#include "tilq/quadrature.hpp"
#include "tilq/riccati.hpp"

#include <algorithm>
#include <cmath>

namespace tilq {

BvpSolution from_riccati(const LQProblem& p, const RiccatiSolution& P, const Propagator& closed_loop, double t0,
                         const Vector& x0) {
    if (x0.size() != p.n) throw InvalidInputError("from_riccati: x0 has wrong dimension");
    if (t0 < 0.0 || t0 >= p.T) throw InvalidInputError("from_riccati: t0 must lie in [0, T)");
    const TimeGrid& g = P.grid();
    BvpSolution sol;
    sol.t0 = t0;
    sol.x0 = x0;
    const int i0 = g.node_index(t0);
    if (i0 >= 0 && g.is_uniform()) {
        sol.times.assign(g.nodes().begin() + i0, g.nodes().end());
        sol.step = g.step();
    } else {
        const double len = p.T - t0;
        const int m = std::max(4, static_cast<int>(std::ceil(len / g.step() - 1e-9)));
        sol.step = len / m;
        for (int k = 0; k < m; ++k) sol.times.push_back(t0 + k * sol.step);
        sol.times.push_back(p.T);
    }
    const Vector y = closed_loop.value(t0).partialPivLu().solve(x0);
    for (std::size_t k = 0; k < sol.times.size(); ++k) {
        const double s = sol.times[k];
        const Vector X = (k == 0) ? x0 : Vector(closed_loop.value(s) * y);
        sol.X.push_back(X);
        sol.phi.push_back(P.at(s) * X);
    }
    return sol;
}

BvpSolution from_riccati(const LQProblem& p, const RiccatiSolution& P, double t0, const Vector& x0) {
    return from_riccati(p, P, closed_loop_propagator(p, P), t0, x0);
}

double q_hat_quadratic(const LQProblem& p, const RiccatiSolution& /*P*/, const BvpSolution& sol, int k) {
    const int last = static_cast<int>(sol.times.size()) - 1;
    if (k < 0 || k > last) throw InvalidInputError("q_hat_quadratic: node index out of range");
    const double s = sol.times[static_cast<std::size_t>(k)];
    const Vector& Xs = sol.X[static_cast<std::size_t>(k)];
    const Vector& XT = sol.X.back();
    double value = Xs.dot(p.Q(s, s) * Xs) - XT.dot(p.G.dt(s) * XT);

    auto integrand = [&](double tau, const Vector& X, const Vector& ph) {
        Eigen::LLT<Matrix> llt(symmetrize(p.M(tau, tau)));
        if (llt.info() != Eigen::Success) throw FactorizationError("q_hat_quadratic: M(tau,tau) not positive definite");
        const Vector w = llt.solve(p.B(tau).transpose() * ph + p.S(tau, tau) * X);
        return X.dot(p.Q.dt(s, tau) * X) + (p.M.dt(s, tau) * w - 2.0 * p.S.dt(s, tau) * X).dot(w);
    };

    const int c = last - k;
    double integral = 0.0;
    if (c >= 2) {
        const auto w = simpson_weights(c, sol.step);
        for (int j = k; j <= last; ++j) {
            const auto r = static_cast<std::size_t>(j);
            integral += w[static_cast<std::size_t>(j - k)] * integrand(sol.times[r], sol.X[r], sol.phi[r]);
        }
    } else if (c == 1) {
        std::vector<Matrix> xs, ps;
        for (const auto& v : sol.X) xs.emplace_back(v);
        for (const auto& v : sol.phi) ps.emplace_back(v);
        const double xm = k + 0.5;
        const Vector Xm = cubic_interpolate(xs, xm);
        const Vector Pm = cubic_interpolate(ps, xm);
        const double tm = sol.times[static_cast<std::size_t>(k)] + 0.5 * sol.step;
        const auto rk = static_cast<std::size_t>(k);
        integral = (sol.step / 6.0) * (integrand(sol.times[rk], sol.X[rk], sol.phi[rk]) + 4.0 * integrand(tm, Xm, Pm) +
                                       integrand(sol.times.back(), sol.X.back(), sol.phi.back()));
    }
    return value - integral;
}

namespace {

BvpResidual residual_impl(const LQProblem& p, const RiccatiSolution& P, const Propagator& closed_loop,
                          const BvpSolution& sol, const std::vector<Matrix>* diag) {
    const TimeGrid& g = P.grid();
    if (diag != nullptr && static_cast<int>(diag->size()) != g.size()) {
        throw InvalidInputError("bvp_residual: nonlocal diagonal does not match the grid");
    }
    const int count = static_cast<int>(sol.times.size());
    if (count < 5) throw InvalidInputError("bvp_residual: need at least 5 nodes");
    std::vector<Matrix> xs, ps;
    for (const auto& v : sol.X) xs.emplace_back(v);
    for (const auto& v : sol.phi) ps.emplace_back(v);
    BvpResidual r;
    for (int i = 2; i <= count - 3; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double s = sol.times[k];
        const Matrix A = p.A(s);
        const Matrix B = p.B(s);
        const Matrix S = p.S(s, s);
        Eigen::LLT<Matrix> llt(symmetrize(p.M(s, s)));
        if (llt.info() != Eigen::Success) throw FactorizationError("bvp_residual: M(s,s) not positive definite");
        const Matrix MinvS = llt.solve(S);
        const Matrix MinvBt = llt.solve(B.transpose());
        const Matrix Ahat = A - B * MinvS;
        const int node = diag != nullptr ? g.node_index(s) : -1;
        const Matrix Qbar = node >= 0 ? Matrix(symmetrize(p.Q(s, s) - (*diag)[static_cast<std::size_t>(node)]))
                                      : q_bar(p, P, closed_loop, s);
        const Vector dX = derivative_4th(xs, i, sol.step);
        const Vector dphi = derivative_4th(ps, i, sol.step);
        const Vector fx = dX - (Ahat * sol.X[k] - B * (MinvBt * sol.phi[k]));
        const Vector fp = dphi + Ahat.transpose() * sol.phi[k] + (Qbar - S.transpose() * MinvS) * sol.X[k];
        r.res_X = std::max(r.res_X, matrix_norm(fx));
        r.res_phi = std::max(r.res_phi, matrix_norm(fp));
    }
    return r;
}

}  // namespace

BvpResidual bvp_residual(const LQProblem& p, const RiccatiSolution& P, const Propagator& closed_loop,
                         const BvpSolution& sol) {
    return residual_impl(p, P, closed_loop, sol, nullptr);
}

BvpResidual bvp_residual(const LQProblem& p, const RiccatiSolution& P, const Propagator& closed_loop,
                         const BvpSolution& sol, const std::vector<Matrix>& nonlocal_diag) {
    return residual_impl(p, P, closed_loop, sol, &nonlocal_diag);
}

BvpResidual bvp_residual(const LQProblem& p, const RiccatiSolution& P, const BvpSolution& sol) {
    return bvp_residual(p, P, closed_loop_propagator(p, P), sol);
}

}  // namespace tilq
