#include "tilq/problem.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace tilq {

void LQProblem::check_dimensions() const {
    if (n < 1 || m < 1) throw InvalidInputError("LQProblem: dimensions must be positive");
    if (!(T > 0.0) || !std::isfinite(T)) throw InvalidInputError("LQProblem: horizon must be positive");
    auto expect = [](const char* name, int r, int c, int er, int ec) {
        if (r != er || c != ec) {
            throw InvalidInputError(std::string("LQProblem: ") + name + " is " + std::to_string(r) + "x" +
                                    std::to_string(c) + ", expected " + std::to_string(er) + "x" +
                                    std::to_string(ec));
        }
    };
    expect("A", A.rows(), A.cols(), n, n);
    expect("B", B.rows(), B.cols(), n, m);
    expect("Q", Q.rows(), Q.cols(), n, n);
    expect("S", S.rows(), S.cols(), m, n);
    expect("M", M.rows(), M.cols(), m, m);
    expect("G", G.rows(), G.cols(), n, n);
    auto horizon = [this](const char* name, double h) {
        if (std::abs(h - T) > 1e-12 * T) {
            throw InvalidInputError(std::string("LQProblem: ") + name + " is defined on [0, " + std::to_string(h) +
                                    "], expected [0, " + std::to_string(T) + "]");
        }
    };
    horizon("A", A.horizon());
    horizon("B", B.horizon());
    horizon("Q", Q.horizon());
    horizon("S", S.horizon());
    horizon("M", M.horizon());
    horizon("G", G.horizon());
}

const AssumptionCheck* ValidationReport::find(const std::string& id) const {
    for (const auto& c : checks) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

bool ValidationReport::only_h5_failures() const {
    bool any = false;
    for (const auto& c : checks) {
        if (c.pass) continue;
        any = true;
        if (c.id.rfind("H5", 0) != 0) return false;
    }
    return any;
}

namespace {

double min_eig(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// Roundoff allowance for a partial obtained by finite differences of a value of size `scale`.
double fd_noise(Provenance prov, double scale, double h) {
    return prov == Provenance::finite_difference ? 16.0 * std::numeric_limits<double>::epsilon() * scale / h : 0.0;
}

double asymmetry(const Matrix& m) { return (m - m.transpose()).cwiseAbs().maxCoeff(); }

// Tracks the worst value of one check; `lower_is_worse` for eigenvalue checks.
struct Tracker {
    AssumptionCheck c;
    bool lower_is_worse = true;
    bool seen = false;

    int violations = 0;

    Tracker(std::string id, bool lower) {
        c.id = std::move(id);
        lower_is_worse = lower;
    }

    /// Records an eigenvalue and counts it as a violation below `floor`.
    void add_bounded(double value, double t, double s, double floor) {
        add(value, t, s);
        if (value < floor) ++violations;
    }

    void add(double value, double t, double s) {
        ++c.evaluated;
        const bool worse = !seen || (lower_is_worse ? value < c.worst : value > c.worst);
        if (worse) {
            c.worst = value;
            c.t = t;
            c.s = s;
            seen = true;
        }
    }
};

}  // namespace

ValidationReport validate_assumptions(const LQProblem& p, const TimeGrid& g, const ValidationOptions& opts) {
    p.check_dimensions();
    if (!(opts.tol >= 0.0)) throw InvalidInputError("validate_assumptions: tol must be nonnegative");
    const double tol = opts.tol;

    Tracker a_finite("H1.A.finite", false), b_finite("H1.B.finite", false), s_finite("H4.S.finite", false);
    Tracker m_sym("H2.M.symmetric", false), m_pd("H2.M.positive_definite", true);
    Tracker q_sym("H3.Q.symmetric", false), q_psd("H3.Q.psd", true);
    Tracker g_sym("H3.G.symmetric", false), g_psd("H3.G.psd", true);
    Tracker qt_psd("H5.Q_t.psd", true), mt_psd("H5.M_t.psd", true), gd_psd("H5.Gdot.psd", true);
    Tracker qs_psd("H5.Q-S'M^-1S.psd", true), qst_psd("H5.Q_t-S_t'M_t^-1S_t.psd", true);

    double m_c = 0.0;
    const int N = g.size();
    const double h = default_fd_step(p.T);
    for (int i = 0; i < N; ++i) {
        const double t = g[i];
        a_finite.add(matrix_norm(p.A(t)), t, t);
        b_finite.add(matrix_norm(p.B(t)), t, t);
        const Matrix G = p.G(t);
        g_sym.add(asymmetry(G), t, t);
        g_psd.add(min_eig(G), t, t);
        gd_psd.add_bounded(min_eig(p.G.dt(t)), t, t, -(tol + fd_noise(p.G.provenance(), matrix_norm(G), h)));
        for (int j = i; j < N; ++j) {
            const double s = g[j];
            const Matrix M = p.M(t, s);
            const Matrix Q = p.Q(t, s);
            const Matrix S = p.S(t, s);
            const Matrix Mt = p.M.dt(t, s);
            const Matrix Qt = p.Q.dt(t, s);
            const Matrix St = p.S.dt(t, s);
            m_c = std::max(m_c, matrix_norm(M));
            s_finite.add(matrix_norm(S), t, s);
            m_sym.add(asymmetry(M), t, s);
            const double m_min = min_eig(M);
            m_pd.add(m_min, t, s);
            q_sym.add(asymmetry(Q), t, s);
            q_psd.add(min_eig(Q), t, s);
            const double nq = fd_noise(p.Q.provenance(), matrix_norm(Q), h);
            const double nm = fd_noise(p.M.provenance(), matrix_norm(M), h);
            const double ns = fd_noise(p.S.provenance(), matrix_norm(S), h);
            qt_psd.add_bounded(min_eig(Qt), t, s, -(tol + nq));
            const double mt_min = min_eig(Mt);
            mt_psd.add_bounded(mt_min, t, s, -(tol + nm));
            if (m_min > 0.0) {
                const Matrix schur = Q - S.transpose() * symmetrize(M).llt().solve(S);
                qs_psd.add(min_eig(schur), t, s);
            } else {
                ++qs_psd.c.skipped;
            }
            if (mt_min > tol + nm) {
                const Matrix schur_t = Qt - St.transpose() * symmetrize(Mt).llt().solve(St);
                const double gain = matrix_norm(St) / mt_min;
                qst_psd.add_bounded(min_eig(schur_t), t, s, -(tol + nq + 2.0 * gain * ns + gain * gain * nm));
            } else {
                ++qst_psd.c.skipped;
            }
        }
    }

    const double pd_floor = opts.pd_floor.value_or(1e-10 * m_c);

    ValidationReport report;
    auto finish = [&](Tracker& tr, bool pass, const std::string& note = "") {
        tr.c.pass = pass;
        tr.c.note = note;
        report.checks.push_back(tr.c);
        report.overall = report.overall && pass;
    };
    finish(a_finite, true);
    finish(b_finite, true);
    finish(s_finite, true);
    finish(m_sym, m_sym.c.worst <= tol);
    finish(m_pd, m_pd.c.worst >= pd_floor && m_pd.c.worst > 0.0, "floor " + std::to_string(pd_floor));
    finish(q_sym, q_sym.c.worst <= tol);
    finish(q_psd, q_psd.c.worst >= -tol);
    finish(g_sym, g_sym.c.worst <= tol);
    finish(g_psd, g_psd.c.worst >= -tol);
    finish(qs_psd, qs_psd.c.evaluated == 0 || qs_psd.c.worst >= -tol);
    finish(qt_psd, qt_psd.violations == 0);
    finish(mt_psd, mt_psd.violations == 0);
    finish(gd_psd, gd_psd.violations == 0);
    const std::string skip_note =
        qst_psd.c.skipped > 0 ? "skipped (M_t singular) at " + std::to_string(qst_psd.c.skipped) + " nodes" : "";
    finish(qst_psd, qst_psd.violations == 0, skip_note);
    return report;
}

}  // namespace tilq
