#include "tilq/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace tilq {

double time_inconsistency(const LQProblem& p, const TimeGrid& g) {
    const int stride = std::max(1, g.intervals() / 64);
    double worst = 0.0;
    std::vector<int> idx;
    for (int i = 0; i < g.size(); i += stride) idx.push_back(i);
    if (idx.back() != g.size() - 1) idx.push_back(g.size() - 1);
    for (std::size_t a = 0; a < idx.size(); ++a) {
        const double t = g[idx[a]];
        worst = std::max(worst, matrix_norm(p.G.dt(t)));
        for (std::size_t b = a; b < idx.size(); ++b) {
            const double s = g[idx[b]];
            worst = std::max({worst, matrix_norm(p.Q.dt(t, s)), matrix_norm(p.M.dt(t, s)), matrix_norm(p.S.dt(t, s))});
        }
    }
    return worst;
}

ClassicalRiccatiSolution classical_riccati(const LQProblem& p, const TimeGrid& g) {
    p.check_dimensions();
    const double drift = time_inconsistency(p, g);
    if (drift > 1e-12) {
        throw InvalidInputError("classical_riccati: problem is not time-consistent (partial norm " +
                                std::to_string(drift) + ")");
    }
    auto rhs = [&p](double t, const Matrix& P) -> Matrix {
        const Matrix A = p.A(t);
        const Matrix B = p.B(t);
        const Matrix S = p.S(t, t);
        Eigen::LLT<Matrix> llt(symmetrize(p.M(t, t)));
        if (llt.info() != Eigen::Success) throw FactorizationError("classical_riccati: M(t,t) not positive definite");
        const Matrix Z = B.transpose() * P + S;
        return -(A.transpose() * P + P * A + p.Q(t, t) - Z.transpose() * llt.solve(Z));
    };
    ClassicalRiccatiSolution out;
    out.grid = g;
    const int N = g.size();
    out.values.assign(static_cast<std::size_t>(N), Matrix());
    out.values[N - 1] = symmetrize(p.G(g.horizon()));
    for (int i = N - 1; i > 0; --i) {
        const double t = g[i];
        const double h = g[i - 1] - t;
        const Matrix& P = out.values[i];
        const Matrix k1 = rhs(t, P);
        const Matrix k2 = rhs(t + 0.5 * h, P + 0.5 * h * k1);
        const Matrix k3 = rhs(t + 0.5 * h, P + 0.5 * h * k2);
        const Matrix k4 = rhs(t + h, P + h * k3);
        out.values[i - 1] = symmetrize(P + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    }
    return out;
}

double brute_force_cost(const LQProblem& p, double t, const Vector& x, const ControlLaw& u, const TimeGrid& g,
                        int refinement) {
    if (refinement < 4) throw InvalidInputError("brute_force_cost: refinement must be at least 4");
    if (x.size() != p.n) throw InvalidInputError("brute_force_cost: x has wrong dimension");
    const double len = p.T - t;
    if (len < 0.0) throw InvalidInputError("brute_force_cost: t beyond T");
    const int m = std::max(refinement, static_cast<int>(std::ceil(len / g.step() - 1e-9)) * refinement);
    const double h = len / m;
    auto running = [&](double s, const Vector& X) {
        const Vector v = u(s, X);
        return X.dot(p.Q(t, s) * X) + 2.0 * v.dot(p.S(t, s) * X) + v.dot(p.M(t, s) * v);
    };
    auto f = [&](double s, const Vector& X) -> Vector { return p.A(s) * X + p.B(s) * u(s, X); };
    Vector X = x;
    double J = 0.0;
    double prev = running(t, X);
    for (int k = 0; k < m; ++k) {
        const double s = t + k * h;
        const double s1 = (k + 1 == m) ? p.T : s + h;
        const Vector k1 = f(s, X);
        const Vector k2 = f(s1, X + h * k1);
        X += 0.5 * h * (k1 + k2);
        const double next = running(s1, X);
        J += 0.5 * h * (prev + next);
        prev = next;
    }
    return J + X.dot(p.G(t) * X);
}

}  // namespace tilq
