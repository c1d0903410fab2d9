#include "tilq/equilibrium.hpp"

#include "tilq/parallel.hpp"
#include "tilq/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace tilq {

EquilibriumPolicy::EquilibriumPolicy(const LQProblem& p, RiccatiSolution P)
    : problem_(p), P_(std::move(P)) {
    problem_.check_dimensions();
    const TimeGrid& g = P_.grid();
    node_gain_.reserve(static_cast<std::size_t>(g.size()));
    for (int i = 0; i < g.size(); ++i) node_gain_.push_back(-upsilon_at(problem_, P_.node(i), g[i]));
    if (g.is_uniform()) {
        mid_gain_.reserve(static_cast<std::size_t>(g.intervals()));
        for (int i = 0; i < g.intervals(); ++i) {
            const double tm = g[i] + 0.5 * g.step();
            mid_gain_.push_back(-upsilon_at(problem_, P_.at(tm), tm));
        }
    }
    closed_loop_ = closed_loop_propagator(problem_, P_);
}

Matrix EquilibriumPolicy::gain(double t) const {
    const TimeGrid& g = P_.grid();
    const int idx = g.node_index(t);
    if (idx >= 0) return node_gain_[static_cast<std::size_t>(idx)];
    if (g.is_uniform()) {
        const double x = t / g.step();
        const double i = std::floor(x);
        if (std::abs(x - i - 0.5) < 1e-9 && i >= 0 && i < g.intervals()) {
            return mid_gain_[static_cast<std::size_t>(i)];
        }
    }
    return -upsilon_at(problem_, P_.at(t), t);
}

ControlLaw EquilibriumPolicy::law() const {
    return [this](double s, const Vector& x) -> Vector { return gain(s) * x; };
}

EquilibriumPolicy build_policy(const LQProblem& p, const RiccatiSolution& P) { return EquilibriumPolicy(p, P); }

Trajectory simulate(const EquilibriumPolicy& pol, double t0, const Vector& x0, const TimeGrid& g) {
    const LQProblem& p = pol.problem();
    if (x0.size() != p.n) throw InvalidInputError("simulate: x0 has wrong dimension");
    if (t0 < 0.0 || t0 >= p.T) throw InvalidInputError("simulate: t0 must lie in [0, T)");
    const Propagator& phi = pol.closed_loop();
    const Vector y = phi.value(t0).partialPivLu().solve(x0);
    Trajectory tr;
    tr.t0 = t0;
    tr.x0 = x0;
    auto push = [&](double s) {
        const Vector xs = (s == t0) ? x0 : Vector(phi.value(s) * y);
        tr.times.push_back(s);
        tr.states.push_back(xs);
        tr.controls.push_back(pol.gain(s) * xs);
    };
    push(t0);
    const double tol = 1e-12 * p.T;
    for (int i = 0; i < g.size(); ++i) {
        if (g[i] > t0 + tol) push(g[i]);
    }
    return tr;
}

double cost_piecewise(const LQProblem& p, double t, const Vector& x, const std::vector<ControlSegment>& segments,
                      const TimeGrid& g, int min_segment_intervals) {
    if (x.size() != p.n) throw InvalidInputError("cost: x has wrong dimension");
    if (t < 0.0 || t > p.T) throw InvalidInputError("cost: t outside [0, T]");
    if (segments.empty()) throw InvalidInputError("cost: no control segments");
    const double tol = 1e-12 * p.T;
    if (std::abs(segments.back().end - p.T) > tol) throw InvalidInputError("cost: last segment must end at T");
    const double h = g.step();
    Vector X = x;
    double J = 0.0;
    double a = t;
    for (const auto& seg : segments) {
        const double b = seg.end;
        if (b < a - tol) throw InvalidInputError("cost: segment ends must increase");
        const double len = b - a;
        if (len <= tol) continue;
        const int m = std::max(min_segment_intervals, static_cast<int>(std::ceil(len / h - 1e-9)));
        const double hs = len / m;
        const auto w = simpson_weights(m, hs);
        auto rhs = [&](double s, const Vector& xs) -> Vector { return p.A(s) * xs + p.B(s) * seg.law(s, xs); };
        for (int k = 0; k <= m; ++k) {
            const double s = (k == m) ? b : a + k * hs;
            const Vector u = seg.law(s, X);
            const double L = X.dot(p.Q(t, s) * X) + 2.0 * u.dot(p.S(t, s) * X) + u.dot(p.M(t, s) * u);
            J += w[static_cast<std::size_t>(k)] * L;
            if (k == m) break;
            const Vector k1 = rhs(s, X);
            const Vector k2 = rhs(s + 0.5 * hs, X + 0.5 * hs * k1);
            const Vector k3 = rhs(s + 0.5 * hs, X + 0.5 * hs * k2);
            const Vector k4 = rhs(s + hs, X + hs * k3);
            X += (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        a = b;
    }
    return J + X.dot(p.G(t) * X);
}

double cost(const LQProblem& p, double t, const Vector& x, const ControlLaw& u, const TimeGrid& g) {
    return cost_piecewise(p, t, x, {ControlSegment{p.T, u}}, g, 2);
}

double value_identity_gap(const LQProblem& p, const EquilibriumPolicy& pol, double t, const Vector& x) {
    const double J = cost(p, t, x, pol.law(), pol.solution().grid());
    return std::abs(J - x.dot(pol.solution().at(t) * x));
}

double perturbation_limit_closed_form(const LQProblem& p, const EquilibriumPolicy& pol, double t, const Vector& x,
                                      const Vector& v) {
    const Vector d = v - pol.gain(t) * x;
    return d.dot(p.M(t, t) * d);
}

FiniteEpsResult perturbation_limit_finite_eps(const LQProblem& p, const EquilibriumPolicy& pol, double t,
                                              const Vector& x, const Vector& v, const std::vector<double>& eps_list) {
    if (eps_list.empty()) throw InvalidInputError("perturbation_limit_finite_eps: empty eps list");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0) || (i > 0 && !(eps_list[i] < eps_list[i - 1]))) {
            throw InvalidInputError("perturbation_limit_finite_eps: eps must be positive and decreasing");
        }
    }
    if (t < 0.0 || t + eps_list[0] > p.T * (1.0 + 1e-12)) {
        throw InvalidInputError("perturbation_limit_finite_eps: t + eps exceeds T");
    }
    if (v.size() != p.m) throw InvalidInputError("perturbation_limit_finite_eps: v has wrong dimension");
    const TimeGrid& g = pol.solution().grid();
    const double tol = 1e-12 * p.T;
    for (double e : eps_list) {
        int nodes = 0;
        for (double s : g.nodes()) nodes += (s >= t - tol && s <= t + e + tol) ? 1 : 0;
        if (nodes < 4) {
            throw InvalidInputError("perturbation_limit_finite_eps: eps=" + std::to_string(e) + " spans only " +
                                    std::to_string(nodes) + " grid nodes; refine the grid to at least " +
                                    std::to_string(static_cast<int>(std::ceil(3.0 * p.T / e))) + " intervals");
        }
    }
    const ControlLaw ubar = pol.law();
    const ControlLaw spike = [v](double, const Vector&) -> Vector { return v; };
    FiniteEpsResult out;
    out.eps = eps_list;
    for (double e : eps_list) {
        const double te = t + e;
        const double Jv = cost_piecewise(p, t, x, {ControlSegment{te, spike}, ControlSegment{p.T, ubar}}, g);
        const double Ju = cost_piecewise(p, t, x, {ControlSegment{te, ubar}, ControlSegment{p.T, ubar}}, g);
        out.quotients.push_back((Jv - Ju) / e);
    }
    // Neville's scheme evaluated at eps = 0.
    std::vector<double> tab = out.quotients;
    for (std::size_t level = 1; level < tab.size(); ++level) {
        for (std::size_t i = tab.size() - 1; i >= level; --i) {
            const double ei = eps_list[i];
            const double ej = eps_list[i - level];
            tab[i] = (ej * tab[i] - ei * tab[i - 1]) / (ej - ei);
        }
    }
    out.extrapolated = tab.back();
    return out;
}

PerturbationReport equilibrium_certificate(const LQProblem& p, const EquilibriumPolicy& pol, const SampleSpec& spec) {
    if (spec.t_count < 1 || spec.eps.empty()) throw InvalidInputError("equilibrium_certificate: empty sample spec");
    std::vector<double> eps;
    for (double e : spec.eps) eps.push_back(e * p.T);
    const double emax = *std::max_element(eps.begin(), eps.end());
    std::sort(eps.begin(), eps.end(), std::greater<>());

    std::vector<PerturbationSample> samples;
    for (int k = 0; k < spec.t_count; ++k) {
        const double t = k * (p.T - emax) / spec.t_count;
        for (int i = 0; i < p.n; ++i) {
            for (int sign : {1, -1}) {
                Vector x = Vector::Zero(p.n);
                x(i) = sign;
                const Vector ubar = pol.gain(t) * x;
                std::vector<Vector> vs{Vector::Zero(p.m)};
                for (int j = 0; j < p.m; ++j) {
                    const Vector e = Vector::Unit(p.m, j);
                    vs.push_back(spec.v_scale * e);
                    vs.push_back(-spec.v_scale * e);
                    vs.push_back(ubar + spec.v_offset * e);
                    vs.push_back(ubar - spec.v_offset * e);
                }
                for (const auto& v : vs) {
                    PerturbationSample s;
                    s.t = t;
                    s.x = x;
                    s.v = v;
                    samples.push_back(std::move(s));
                }
            }
        }
    }
    parallel_for(0, static_cast<int>(samples.size()), [&](int i) {
        auto& s = samples[static_cast<std::size_t>(i)];
        s.closed_form = perturbation_limit_closed_form(p, pol, s.t, s.x, s.v);
        const auto fe = perturbation_limit_finite_eps(p, pol, s.t, s.x, s.v, eps);
        s.estimates = fe.quotients;
        s.extrapolated = fe.extrapolated;
        s.agrees = std::abs(s.extrapolated - s.closed_form) <= std::max(1e-4, 0.05 * std::abs(s.closed_form));
    });

    PerturbationReport rep;
    rep.min_closed_form = samples.empty() ? 0.0 : samples[0].closed_form;
    rep.min_extrapolated = samples.empty() ? 0.0 : samples[0].extrapolated;
    for (const auto& s : samples) {
        rep.min_closed_form = std::min(rep.min_closed_form, s.closed_form);
        rep.min_extrapolated = std::min(rep.min_extrapolated, s.extrapolated);
        rep.all_agree = rep.all_agree && s.agrees;
    }
    rep.pass = rep.all_agree && rep.min_closed_form >= -1e-10 && rep.min_extrapolated >= -1e-4;
    rep.samples = std::move(samples);
    return rep;
}

}  // namespace tilq
