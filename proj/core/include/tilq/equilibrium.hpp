#pragma once

#include "tilq/problem.hpp"
#include "tilq/propagators.hpp"
#include "tilq/solution.hpp"

#include <vector>

namespace tilq {

/// Linear feedback u = gain(t) x with gain = -M(t,t)^-1 (B^T P + S(t,t)).
class EquilibriumPolicy {
public:
    EquilibriumPolicy(const LQProblem& p, RiccatiSolution P);

    const LQProblem& problem() const { return problem_; }
    const RiccatiSolution& solution() const { return P_; }
    const Propagator& closed_loop() const { return closed_loop_; }

    Matrix gain(double t) const;
    Vector control(double t, const Vector& x) const { return gain(t) * x; }
    ControlLaw law() const;

private:
    LQProblem problem_;
    RiccatiSolution P_;
    std::vector<Matrix> node_gain_;
    std::vector<Matrix> mid_gain_;
    Propagator closed_loop_;
};

EquilibriumPolicy build_policy(const LQProblem& p, const RiccatiSolution& P);

struct Trajectory {
    double t0 = 0.0;
    Vector x0;
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<Vector> controls;
};

/// Closed-loop states X(s) = Phi(s, t0) x0 on t0 and every node of g after it.
Trajectory simulate(const EquilibriumPolicy& pol, double t0, const Vector& x0, const TimeGrid& g);

/// Control law used on (previous end, end].
struct ControlSegment {
    double end = 0.0;
    ControlLaw law;
};

/// Cost functional with kernels frozen at the first argument t. The state is
/// integrated with RK4 and the running cost with composite Simpson, using the
/// spacing of g and at least `min_segment_intervals` steps per segment.
double cost(const LQProblem& p, double t, const Vector& x, const ControlLaw& u, const TimeGrid& g);
double cost_piecewise(const LQProblem& p, double t, const Vector& x, const std::vector<ControlSegment>& segments,
                      const TimeGrid& g, int min_segment_intervals = 16);

/// |J(t, x; u_bar) - <P(t) x, x>|.
double value_identity_gap(const LQProblem& p, const EquilibriumPolicy& pol, double t, const Vector& x);

/// <M(t,t)(v - u_bar), v - u_bar> with u_bar = gain(t) x.
double perturbation_limit_closed_form(const LQProblem& p, const EquilibriumPolicy& pol, double t, const Vector& x,
                                      const Vector& v);

struct FiniteEpsResult {
    std::vector<double> eps;
    std::vector<double> quotients;
    double extrapolated = 0.0;
};

/// (J(u^{eps,v}) - J(u_bar)) / eps with the constant control v on [t, t + eps];
/// polynomial extrapolation to eps = 0 through every supplied eps.
FiniteEpsResult perturbation_limit_finite_eps(const LQProblem& p, const EquilibriumPolicy& pol, double t,
                                              const Vector& x, const Vector& v, const std::vector<double>& eps_list);

struct SampleSpec {
    int t_count = 10;
    std::vector<double> eps = {0.1, 0.05, 0.025};  ///< fractions of T
    double v_scale = 1.0;                          ///< v = +-v_scale e_j
    double v_offset = 0.1;                         ///< v = u_bar +- v_offset e_j
};

struct PerturbationSample {
    double t = 0.0;
    Vector x;
    Vector v;
    double closed_form = 0.0;
    std::vector<double> estimates;
    double extrapolated = 0.0;
    bool agrees = false;  ///< within max(1e-4, 5%) of the closed form
};

struct PerturbationReport {
    std::vector<PerturbationSample> samples;
    double min_closed_form = 0.0;
    double min_extrapolated = 0.0;
    bool all_agree = true;
    bool pass = true;  ///< all agree, closed forms >= -1e-10, extrapolations >= -1e-4
};

PerturbationReport equilibrium_certificate(const LQProblem& p, const EquilibriumPolicy& pol,
                                           const SampleSpec& spec = {});

}  // namespace tilq
