#include "tilq/riccati.hpp"

#include "tilq/parallel.hpp"
#include "tilq/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tilq {

namespace {

Eigen::LLT<Matrix> factor_pd(const Matrix& M, double s) {
    Eigen::LLT<Matrix> llt(symmetrize(M));
    if (llt.info() != Eigen::Success) {
        throw FactorizationError("M(s,s) is not positive definite at s=" + std::to_string(s));
    }
    return llt;
}

// P at t_i + h/2 from four nodes inside [lo, last].
Matrix cubic_mid(const std::vector<Matrix>& P, int i, int lo, int last) {
    if (last - lo < 3) return 0.5 * (P[i] + P[i + 1]);
    const int k = std::clamp(i - 1, lo, last - 3);
    const double x = i + 0.5 - k;
    Matrix acc = Matrix::Zero(P[i].rows(), P[i].cols());
    for (int a = 0; a < 4; ++a) {
        double l = 1.0;
        for (int b = 0; b < 4; ++b) {
            if (b != a) l *= (x - b) / static_cast<double>(a - b);
        }
        acc += l * P[k + a];
    }
    return acc;
}

Matrix nonlocal_integrand(const Matrix& Y, const Matrix& qt, const Matrix& mt, const Matrix& st) {
    const Matrix ys = Y.transpose() * st;
    return qt + Y.transpose() * mt * Y - ys - ys.transpose();
}

struct KernelRow {
    std::vector<Matrix> qt, mt, st;
    Matrix qt_mid, mt_mid, st_mid;
    bool zero = false;  ///< every partial in the row vanishes exactly
};

// Grid-cached evaluation of the Picard map, the nonlocal term and the
// closed-loop flow. U is anchored at T, so Phi(tau, t) = U(tau) U(t)^-1.
class Engine {
public:
    Engine(const LQProblem& prob, const TimeGrid& g) : p(prob) {
        if (!g.is_uniform()) throw InvalidInputError("riccati: uniform grid required");
        if (g.intervals() < 3) throw InvalidInputError("riccati: grid needs at least 3 intervals");
        last = g.intervals();
        h = g.step();
        t = g.nodes();
        const auto N = static_cast<std::size_t>(last) + 1;
        A.resize(N);
        B.resize(N);
        Qd.resize(N);
        Sd.resize(N);
        Gdot.resize(N);
        Md.resize(N);
        for (std::size_t i = 0; i < N; ++i) {
            const double ti = t[i];
            A[i] = p.A(ti);
            B[i] = p.B(ti);
            Qd[i] = p.Q(ti, ti);
            Sd[i] = p.S(ti, ti);
            Gdot[i] = p.G.dt(ti);
            Md[i] = factor_pd(p.M(ti, ti), ti);
        }
        Amid.resize(N - 1);
        Bmid.resize(N - 1);
        Smid.resize(N - 1);
        Mmid.resize(N - 1);
        for (std::size_t i = 0; i + 1 < N; ++i) {
            const double tm = t[i] + 0.5 * h;
            Amid[i] = p.A(tm);
            Bmid[i] = p.B(tm);
            Smid[i] = p.S(tm, tm);
            Mmid[i] = factor_pd(p.M(tm, tm), tm);
        }
        const Propagator psi = fundamental_solution([this](double s) { return p.A(s); }, p.n, g, Anchor::end);
        V.resize(N);
        Vinv.resize(N);
        for (std::size_t i = 0; i < N; ++i) {
            V[i] = psi.node_value(static_cast<int>(i));
            Vinv[i] = V[i].inverse();
        }
        GT = p.G(t.back());
        P.assign(N, Matrix::Zero(p.n, p.n));
        Y.assign(N, Matrix::Zero(p.m, p.n));
        C.assign(N, Matrix::Zero(p.n, p.n));
        U.assign(N, Matrix::Identity(p.n, p.n));
        Uinv.assign(N, Matrix::Identity(p.n, p.n));
    }

    void set_gain(int i) {
        Y[i] = Md[i].solve(B[i].transpose() * P[i] + Sd[i]);
        C[i] = A[i] - B[i] * Y[i];
    }

    Matrix upsilon_mid(int i, int lo) const {
        const Matrix pm = cubic_mid(P, i, lo, last);
        return Mmid[i].solve(Bmid[i].transpose() * pm + Smid[i]);
    }

    // Backward RK4 from node l down to node first; U[l] must be set.
    void propagate(int first, int l, int lo) {
        const double hn = -h;
        for (int i = l - 1; i >= first; --i) {
            const Matrix& un = U[i + 1];
            const Matrix cm = Amid[i] - Bmid[i] * upsilon_mid(i, lo);
            const Matrix k1 = C[i + 1] * un;
            const Matrix k2 = cm * (un + 0.5 * hn * k1);
            const Matrix k3 = cm * (un + 0.5 * hn * k2);
            const Matrix k4 = C[i] * (un + hn * k3);
            U[i] = un + (hn / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            Uinv[i] = U[i].inverse();
        }
    }

    KernelRow kernel_row(int j) const {
        KernelRow row;
        const double s = t[j];
        const auto count = static_cast<std::size_t>(last - j) + 1;
        row.qt.reserve(count);
        row.mt.reserve(count);
        row.st.reserve(count);
        for (int k = j; k <= last; ++k) {
            row.qt.push_back(p.Q.dt(s, t[k]));
            row.mt.push_back(p.M.dt(s, t[k]));
            row.st.push_back(p.S.dt(s, t[k]));
        }
        if (j == last - 1) {
            const double tm = s + 0.5 * h;
            row.qt_mid = p.Q.dt(s, tm);
            row.mt_mid = p.M.dt(s, tm);
            row.st_mid = p.S.dt(s, tm);
        }
        auto vanish = [](const std::vector<Matrix>& v) {
            return std::all_of(v.begin(), v.end(), [](const Matrix& m) { return (m.array() == 0.0).all(); });
        };
        auto vanish_mid = [](const Matrix& m) { return m.size() == 0 || (m.array() == 0.0).all(); };
        row.zero = vanish(row.qt) && vanish(row.mt) && vanish(row.st) && vanish_mid(row.qt_mid) &&
                   vanish_mid(row.mt_mid) && vanish_mid(row.st_mid);
        return row;
    }

    // F(t_j; t_j, P).
    Matrix nonlocal(int j, const KernelRow& row, int lo) const {
        const int c = last - j;
        if (row.zero) return symmetrize(Uinv[j].transpose() * Gdot[j] * Uinv[j]);
        Matrix integral = Matrix::Zero(p.n, p.n);
        if (c >= 2) {
            const auto w = simpson_weights(c, h);
            for (int k = j; k <= last; ++k) {
                const auto r = static_cast<std::size_t>(k - j);
                integral += w[r] * (U[k].transpose() * nonlocal_integrand(Y[k], row.qt[r], row.mt[r], row.st[r]) * U[k]);
            }
        } else if (c == 1) {
            const Matrix ym = upsilon_mid(j, lo);
            const Matrix cm_u0 = C[j] * U[j];
            const Matrix cm_u1 = C[last] * U[last];
            const Matrix um = 0.5 * (U[j] + U[last]) + (h / 8.0) * (cm_u0 - cm_u1);
            const Matrix f0 = U[j].transpose() * nonlocal_integrand(Y[j], row.qt[0], row.mt[0], row.st[0]) * U[j];
            const Matrix fm = um.transpose() * nonlocal_integrand(ym, row.qt_mid, row.mt_mid, row.st_mid) * um;
            const Matrix f1 = U[last].transpose() * nonlocal_integrand(Y[last], row.qt[1], row.mt[1], row.st[1]) * U[last];
            integral = (h / 6.0) * (f0 + 4.0 * fm + f1);
        }
        return symmetrize(Uinv[j].transpose() * (Gdot[j] + integral) * Uinv[j]);
    }

    std::vector<Matrix> nonlocal_range(int first, int l, int lo, const std::vector<KernelRow>* rows) const {
        std::vector<Matrix> F(static_cast<std::size_t>(l - first) + 1);
        parallel_for(first, l + 1, [&](int j) {
            const auto r = static_cast<std::size_t>(j - first);
            if (rows) {
                F[r] = nonlocal(j, (*rows)[r], lo);
            } else {
                F[r] = nonlocal(j, kernel_row(j), lo);
            }
        });
        return F;
    }

    // Picard map on nodes [first, l] with P[first..l] holding the current iterate.
    std::vector<Matrix> apply_picard(int first, int l, const Matrix& boundary, const std::vector<Matrix>& F) const {
        const auto count = static_cast<std::size_t>(l - first) + 1;
        std::vector<Matrix> hv(count);
        for (int j = first; j <= l; ++j) {
            const auto r = static_cast<std::size_t>(j - first);
            const Matrix z = B[j].transpose() * P[j] + Sd[j];
            const Matrix R = symmetrize(Qd[j] - F[r] - z.transpose() * Y[j]);
            hv[r] = V[j].transpose() * R * V[j];
        }
        const auto tails = tail_integrals(hv, h);
        const Matrix base = V[l].transpose() * boundary * V[l];
        std::vector<Matrix> out(count);
        for (int j = first; j <= l; ++j) {
            const auto r = static_cast<std::size_t>(j - first);
            out[r] = symmetrize(Vinv[j].transpose() * (base + tails[r]) * Vinv[j]);
        }
        return out;
    }

    void load_solution(const RiccatiSolution& sol) {
        if (sol.grid().size() != last + 1) throw InvalidInputError("riccati: solution grid mismatch");
        P = sol.values();
        for (int i = 0; i <= last; ++i) set_gain(i);
        U[last] = Matrix::Identity(p.n, p.n);
        Uinv[last] = U[last];
        propagate(0, last, 0);
    }

    const LQProblem& p;
    int last = 0;
    double h = 0.0;
    std::vector<double> t;
    std::vector<Matrix> A, B, Qd, Sd, Gdot, V, Vinv;
    std::vector<Eigen::LLT<Matrix>> Md;
    std::vector<Matrix> Amid, Bmid, Smid;
    std::vector<Eigen::LLT<Matrix>> Mmid;
    Matrix GT;
    std::vector<Matrix> P, Y, C, U, Uinv;
};

double max_norm_diff(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, matrix_norm(a[i] - b[i]));
    return d;
}

// log(a + e^b) for a >= 0, b possibly -inf.
double log_sum(double a, double b) {
    if (a <= 0.0) return b;
    const double la = std::log(a);
    if (!std::isfinite(b)) return la;
    const double hi = std::max(la, b);
    return hi + std::log1p(std::exp(-std::abs(la - b)));
}

}  // namespace

Matrix upsilon(const LQProblem& p, const RiccatiSolution& P, double s) { return upsilon_at(p, P.at(s), s); }

Matrix f_map(const LQProblem& p, const RiccatiSolution& P, const Propagator& phi, double t, double s) {
    const double T = p.T;
    if (s > t + 1e-12 * T) throw InvalidInputError("f_map: second argument must not exceed the first");
    if (t < 0.0 || t > T * (1.0 + 1e-12)) throw InvalidInputError("f_map: t outside [0, T]");
    const TimeGrid& g = phi.grid();
    const Matrix ut_inv = phi.value(t).inverse();
    const Matrix phi_T = phi.value(T) * ut_inv;
    Matrix acc = phi_T.transpose() * p.G.dt(s) * phi_T;

    std::vector<double> taus;
    double step = 0.0;
    const int i = g.node_index(t);
    if (i >= 0 && g.is_uniform() && g.intervals() - i >= 2) {
        taus.assign(g.nodes().begin() + i, g.nodes().end());
        step = g.step();
    } else {
        const double len = T - t;
        if (len <= 1e-14 * T) return symmetrize(acc);
        const int m = std::max(2, static_cast<int>(std::ceil(len / g.step() - 1e-9)));
        step = len / m;
        taus.resize(static_cast<std::size_t>(m) + 1);
        for (int k = 0; k < m; ++k) taus[static_cast<std::size_t>(k)] = t + k * step;
        taus.back() = T;
    }
    const auto w = simpson_weights(static_cast<int>(taus.size()) - 1, step);
    for (std::size_t k = 0; k < taus.size(); ++k) {
        const double tau = taus[k];
        const Matrix Y = upsilon_at(p, P.at(tau), tau);
        const Matrix ph = phi.value(tau) * ut_inv;
        const Matrix K = nonlocal_integrand(Y, p.Q.dt(s, tau), p.M.dt(s, tau), p.S.dt(s, tau));
        acc += w[k] * (ph.transpose() * K * ph);
    }
    return symmetrize(acc);
}

Matrix q_bar(const LQProblem& p, const RiccatiSolution& P, const Propagator& phi, double t) {
    return symmetrize(p.Q(t, t) - f_map(p, P, phi, t, t));
}

std::vector<Matrix> nonlocal_diagonal(const LQProblem& p, const RiccatiSolution& P) {
    Engine e(p, P.grid());
    e.load_solution(P);
    return e.nonlocal_range(0, e.last, 0, nullptr);
}

ContractionConstants contraction_constants(const LQProblem& p, const TimeGrid& g) {
    p.check_dimensions();
    const double T = p.T;
    // Norms are grid suprema; 400 intervals bound the O(N^2) kernel sweep.
    const TimeGrid ng = g.intervals() <= 400 ? g : TimeGrid::uniform(T, 400);
    const NormBundle nA = function_norms(p.A, ng);
    const NormBundle nB = function_norms(p.B, ng);
    const NormBundle nG = function_norms(p.G, ng);
    const NormBundle nQ = kernel_norms(p.Q, ng);
    const NormBundle nS = kernel_norms(p.S, ng);
    const NormBundle nM = kernel_norms(p.M, ng);
    Matrix minv_sup = Matrix::Zero(p.m, p.m);
    for (int i = 0; i < ng.size(); ++i) {
        for (int j = i; j < ng.size(); ++j) {
            const Matrix inv = factor_pd(p.M(ng[i], ng[j]), ng[j]).solve(Matrix::Identity(p.m, p.m));
            minv_sup = minv_sup.cwiseMax(inv.cwiseAbs());
        }
    }
    const double minv = minv_sup.rowwise().sum().maxCoeff();
    const double a1 = nA.l1_norm;
    const double binf = nB.linf_norm;

    ContractionConstants c;
    c.r = std::exp(2.0 * a1) * (nG.c_norm + T * nQ.c_norm);
    c.rho_bar = minv * (4.0 * c.r * binf + nS.c_norm);
    c.beta_bar = a1 + T * c.rho_bar * binf;
    c.omega_bar = a1 + 2.0 * T * c.rho_bar * binf;
    c.gamma_bar = minv * (1.0 + binf) * (1.0 + binf) *
                  (nG.c1_norm + T * nQ.c1_norm +
                   (1.0 + 2.0 * T * c.rho_bar) * (2.0 * c.rho_bar * nM.c1_norm + nS.c1_norm));
    c.f_lipschitz = 4.0 * T * c.gamma_bar * std::exp(4.0 * c.omega_bar);
    c.a_priori_bound = std::exp(2.0 * a1) * (matrix_norm(p.G(T)) + T * nQ.c_norm);

    // tau1: widest node span on which the flow of A stays close to the identity.
    const double bound = 0.5 / (1.0 + std::exp(2.0 * c.beta_bar));
    const Propagator psi = fundamental_solution([&p](double s) { return p.A(s); }, p.n, ng);
    const int nint = ng.intervals();
    const Matrix I = Matrix::Identity(p.n, p.n);
    auto worst = [&](int k) {
        double w = 0.0;
        for (int i = 0; i + k <= nint; ++i) {
            w = std::max(w, matrix_norm(psi.transition(ng[i + k], ng[i]) - I));
            w = std::max(w, matrix_norm(psi.transition(ng[i], ng[i + k]) - I));
        }
        return w;
    };
    const double span_step = T / nint;
    if (worst(nint) <= bound) {
        c.tau1 = T;
    } else {
        const double w1 = worst(1);
        if (w1 > bound) {
            c.tau1 = span_step * bound / w1;
        } else {
            int lo = 1;
            int hi = nint;
            while (hi - lo > 1) {
                const int mid = (lo + hi) / 2;
                if (worst(mid) <= bound) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            c.tau1 = lo * span_step;
        }
    }

    const double d2 = c.rho_bar * c.rho_bar * nM.c_norm + nG.c1_norm + T * nQ.c1_norm +
                      T * c.rho_bar * (c.rho_bar * nM.c1_norm + 2.0 * nS.c1_norm) + nQ.c_norm;
    if (c.r <= 0.0 || d2 <= 0.0) {
        c.tau2 = T;
    } else {
        c.tau2 = std::exp(std::log(c.r) - std::log(2.0) - 4.0 * c.beta_bar - std::log(d2));
    }
    const double b_log = c.gamma_bar > 0.0
                             ? std::log(2.0 * T * c.gamma_bar) + 4.0 * c.omega_bar
                             : -std::numeric_limits<double>::infinity();
    const double inner = log_sum(c.rho_bar * binf, b_log);
    if (!std::isfinite(inner)) {
        c.tau3 = T;
    } else {
        c.tau3 = std::exp(-(std::log(4.0) + 2.0 * a1 + inner));
    }
    c.tau = std::min({c.tau1, c.tau2, c.tau3});
    if (!(c.tau == c.tau)) throw InvalidInputError("contraction_constants: window width is not a number");
    c.tau = std::clamp(c.tau, std::numeric_limits<double>::min(), T);
    return c;
}

std::vector<Matrix> picard_step(const LQProblem& p, const RiccatiSolution& P_hat, int first, int last,
                                const Matrix& boundary) {
    Engine e(p, P_hat.grid());
    if (first < 0 || last > e.last || last - first < 1) throw InvalidInputError("picard_step: bad window");
    e.load_solution(P_hat);
    const auto F = e.nonlocal_range(first, last, first, nullptr);
    return e.apply_picard(first, last, boundary, F);
}

RiccatiSolution solve_riccati(const LQProblem& p, const TimeGrid& g, const SolveOptions& opts) {
    p.check_dimensions();
    if (!g.is_uniform()) throw InvalidInputError("solve_riccati: uniform grid required");
    if (g.intervals() < 4) throw InvalidInputError("solve_riccati: grid needs at least 4 intervals");
    if (std::abs(g.horizon() - p.T) > 1e-12 * p.T) throw InvalidInputError("solve_riccati: grid horizon differs from T");
    if (opts.max_iter < 1) throw InvalidInputError("solve_riccati: max_iter must be positive");

    const ContractionConstants cc = contraction_constants(p, g);
    const double tol = opts.tol.value_or(1e-10 * (1.0 + cc.r));
    if (!(tol > 0.0)) throw InvalidInputError("solve_riccati: tol must be positive");
    const int min_int = std::max(3, opts.min_window_intervals);

    TimeGrid sg = g;
    int target = min_int;
    int refinement = 1;
    std::string mode;
    auto fit = [&](double step) { return std::floor(cc.tau / step * (1.0 + 1e-12)); };
    if (opts.window_override) {
        const double w = *opts.window_override;
        if (!(w > 0.0)) throw InvalidInputError("solve_riccati: window_override must be positive");
        target = std::max(min_int, static_cast<int>(std::llround(w / g.step())));
        mode = "override";
    } else if (fit(g.step()) >= min_int) {
        target = static_cast<int>(std::min<double>(fit(g.step()), g.intervals()));
        mode = "theoretical";
    } else {
        mode = "resolved-minimum";
        for (int f = 2; static_cast<long long>(g.intervals()) * f <= opts.max_nodes; f *= 2) {
            if (fit(g.step() / f) >= min_int) {
                refinement = f;
                sg = g.refined(f);
                target = static_cast<int>(std::min<double>(fit(sg.step()), sg.intervals()));
                mode = "theoretical";
                break;
            }
        }
    }

    Engine e(p, sg);
    const int last = e.last;
    target = std::min(target, last);
    e.P[last] = e.GT;
    e.set_gain(last);

    SolveMeta meta;
    meta.constants = cc;
    meta.window_mode = mode;
    meta.refinement = refinement;
    meta.tol = tol;

    const double ball = 2.0 * cc.r;
    int halvings = 0;
    int cur = last;
    while (cur > 0) {
        int size = std::min(target, cur);
        if (cur > size && cur - size < std::min(min_int, target)) size = (cur + 1) / 2;
        const int first = cur - size;
        const Matrix boundary = e.P[cur];

        std::vector<KernelRow> rows(static_cast<std::size_t>(size) + 1);
        parallel_for(first, cur + 1, [&](int j) { rows[static_cast<std::size_t>(j - first)] = e.kernel_row(j); });

        std::vector<Matrix> W(static_cast<std::size_t>(size) + 1, boundary);
        WindowReport rep;
        rep.first = first;
        rep.last = cur;
        rep.a = sg[first];
        rep.b = sg[cur];
        rep.within_tau = (rep.b - rep.a) <= cc.tau * (1.0 + 1e-12);
        rep.halvings = halvings;
        double prev_delta = -1.0;
        bool converged = false;
        bool diverged = false;
        std::vector<double> history;
        for (int it = 1; it <= opts.max_iter; ++it) {
            for (int j = first; j < cur; ++j) {
                e.P[j] = W[static_cast<std::size_t>(j - first)];
                e.set_gain(j);
            }
            e.propagate(first, cur, first);
            const auto F = e.nonlocal_range(first, cur, first, &rows);
            auto Wn = e.apply_picard(first, cur, boundary, F);
            const double delta = max_norm_diff(Wn, W);
            double wn_norm = 0.0;
            for (const auto& m : Wn) wn_norm = std::max(wn_norm, matrix_norm(m));
            history.push_back(delta);
            rep.iterations = it;
            rep.final_delta = delta;
            if (!std::isfinite(delta) || (wn_norm > ball && prev_delta >= 0.0 && delta > prev_delta)) {
                diverged = true;
                break;
            }
            const double noise = 1e3 * std::numeric_limits<double>::epsilon() * (1.0 + wn_norm);
            if (prev_delta > noise) rep.contraction_factor = std::max(rep.contraction_factor, delta / prev_delta);
            prev_delta = delta;
            W = std::move(Wn);
            if (delta <= tol) {
                converged = true;
                break;
            }
        }
        if (diverged) {
            if (target / 2 >= 4) {
                target /= 2;
                ++halvings;
                continue;
            }
            throw NonConvergenceError("solve_riccati: iterates left the 2r ball on the smallest window", rep.a,
                                      rep.b, std::move(history));
        }
        if (!converged) {
            throw NonConvergenceError(
                "solve_riccati: no convergence after " + std::to_string(opts.max_iter) + " iterations", rep.a, rep.b,
                std::move(history));
        }
        for (int j = first; j < cur; ++j) {
            e.P[j] = W[static_cast<std::size_t>(j - first)];
            e.set_gain(j);
        }
        e.propagate(first, cur, first);
        meta.total_iterations += rep.iterations;
        meta.max_contraction_factor = std::max(meta.max_contraction_factor, rep.contraction_factor);
        meta.windows.push_back(rep);
        cur = first;
    }

    RiccatiSolution sol(sg, e.P);
    const auto res = riccati_residuals(p, sol);
    meta.max_residual = *std::max_element(res.begin(), res.end());
    sol.meta = std::move(meta);
    return sol;
}

std::vector<double> riccati_residuals(const LQProblem& p, const RiccatiSolution& P) {
    Engine e(p, P.grid());
    e.load_solution(P);
    const auto F = e.nonlocal_range(0, e.last, 0, nullptr);
    std::vector<Matrix> f(static_cast<std::size_t>(e.last) + 1);
    for (int i = 0; i <= e.last; ++i) {
        const Matrix& Pi = e.P[i];
        const Matrix z = e.B[i].transpose() * Pi + e.Sd[i];
        f[i] = e.A[i].transpose() * Pi + Pi * e.A[i] + e.Qd[i] - F[i] - z.transpose() * e.Y[i];
    }
    const auto tails = tail_integrals(f, e.h);
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = matrix_norm(e.P[i] - e.GT - tails[i]);
    return out;
}

double riccati_residual(const LQProblem& p, const RiccatiSolution& P, double t) {
    const int i = P.grid().node_index(t);
    if (i < 0) throw InvalidInputError("riccati_residual: t must be a grid node");
    return riccati_residuals(p, P)[static_cast<std::size_t>(i)];
}

}  // namespace tilq
