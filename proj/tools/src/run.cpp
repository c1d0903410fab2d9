#include "tilq_cli/run.hpp"

#include "tilq_cli/output.hpp"

#include <tilq/bvp.hpp>
#include <tilq/equilibrium.hpp>
#include <tilq/oracle.hpp>
#include <tilq/riccati.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

namespace tilq::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

json to_json(const ValidationReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"id", c.id},
                          {"t", c.t},
                          {"s", c.s},
                          {"worst", c.worst},
                          {"pass", c.pass},
                          {"evaluated", c.evaluated},
                          {"skipped", c.skipped},
                          {"note", c.note}});
    }
    return {{"overall", r.overall}, {"only_h5_failures", r.only_h5_failures()}, {"checks", checks}};
}

json to_json(const ContractionConstants& c) {
    return {{"r", c.r},
            {"rho_bar", c.rho_bar},
            {"beta_bar", c.beta_bar},
            {"omega_bar", c.omega_bar},
            {"gamma_bar", c.gamma_bar},
            {"tau1", c.tau1},
            {"tau2", c.tau2},
            {"tau3", c.tau3},
            {"tau", c.tau},
            {"f_lipschitz", c.f_lipschitz},
            {"a_priori_bound", c.a_priori_bound}};
}

json to_json(const SolveMeta& m) {
    json windows = json::array();
    for (const auto& w : m.windows) {
        windows.push_back({{"first", w.first},
                           {"last", w.last},
                           {"a", w.a},
                           {"b", w.b},
                           {"iterations", w.iterations},
                           {"contraction_factor", w.contraction_factor},
                           {"final_delta", w.final_delta},
                           {"within_tau", w.within_tau},
                           {"halvings", w.halvings}});
    }
    return {{"constants", to_json(m.constants)},
            {"window_mode", m.window_mode},
            {"solver_refinement", m.refinement},
            {"tol", m.tol},
            {"max_residual", m.max_residual},
            {"max_contraction_factor", m.max_contraction_factor},
            {"total_iterations", m.total_iterations},
            {"windows", windows}};
}

json failing_checks(const ValidationReport& r) {
    json out = json::array();
    for (const auto& c : r.checks) {
        if (!c.pass) out.push_back({{"id", c.id}, {"t", c.t}, {"s", c.s}, {"worst", c.worst}});
    }
    return out;
}

void write_diagnostics(const fs::path& dir, int code, const std::string& kind, const std::string& message,
                       json details = json::object()) {
    write_json(dir / "diagnostics.json",
               {{"exit_code", code}, {"error", kind}, {"message", message}, {"details", std::move(details)}});
}

class Runner {
public:
    Runner(const RunConfig& cfg, std::ostream& log, const RunOptions& opts)
        : cfg_(cfg), log_(log), opts_(opts), dir_(cfg.out_dir) {}

    int execute() {
        fs::create_directories(dir_);
        const LQProblem p = build_problem(cfg_);
        const TimeGrid grid = TimeGrid::uniform(cfg_.T, cfg_.intervals());

        const ValidationReport report = validate_assumptions(p, grid);
        if (cfg_.mode == Mode::validate) {
            write_json(dir_ / "validation.json", to_json(report));
            say("validation: " + std::string(report.overall ? "pass" : "fail"));
            if (report.overall) return exit_ok;
            write_diagnostics(dir_, exit_validation, "validation", "standing assumptions violated",
                              {{"failing", failing_checks(report)}});
            return exit_validation;
        }
        if (!report.overall && !report.only_h5_failures()) {
            write_json(dir_ / "validation.json", to_json(report));
            write_diagnostics(dir_, exit_validation, "validation", "standing assumptions violated",
                              {{"failing", failing_checks(report)}});
            say("validation: fail");
            return exit_validation;
        }
        h5_ok_ = report.overall;
        if (!h5_ok_) say("warning: derivative sign conditions fail; PSD of the solution is not asserted");

        std::optional<ClassicalRiccatiSolution> oracle;
        if (cfg_.mode == Mode::compare_oracle) {
            try {
                oracle = classical_riccati(p, grid);
            } catch (const InvalidInputError& e) {
                write_diagnostics(dir_, exit_validation, "oracle-rejected", e.what(),
                                  {{"time_inconsistency", time_inconsistency(p, grid)}});
                say(std::string("compare-oracle: ") + e.what());
                return exit_validation;
            }
        }

        RiccatiSolution P = solve_riccati(p, grid, cfg_.solver);
        if (cfg_.mode == Mode::verify && cfg_.verification.corrupt_solution != 0.0) {
            const Matrix shift = cfg_.verification.corrupt_solution * Matrix::Identity(p.n, p.n);
            for (auto& v : P.mutable_values()) v += shift;
        }
        const EquilibriumPolicy pol = build_policy(p, P);
        write_solution(p, P, pol);
        say("solve: " + std::to_string(P.meta.windows.size()) + " windows, " +
            std::to_string(P.meta.total_iterations) + " iterations, max residual " +
            format_number(P.meta.max_residual));

        switch (cfg_.mode) {
        case Mode::solve: return exit_ok;
        case Mode::verify: return verify(p, P, pol);
        case Mode::simulate: return simulate_mode(pol, P.grid());
        case Mode::compare_oracle: return compare(P, *oracle);
        case Mode::validate: break;
        }
        return exit_ok;
    }

private:
    void say(const std::string& s) {
        if (!opts_.quiet) log_ << s << '\n';
    }

    void write_solution(const LQProblem& p, const RiccatiSolution& P, const EquilibriumPolicy& pol) {
        const auto& t = P.grid().nodes();
        write_text(dir_ / "P.csv", matrix_series_csv("P", t, P.values()));
        json pj = {{"n", p.n}, {"t", t}, {"P", json::array()}};
        for (const auto& v : P.values()) pj["P"].push_back(matrix_json(v));
        write_json(dir_ / "P.json", pj);

        std::vector<Matrix> gains;
        gains.reserve(t.size());
        for (double s : t) gains.push_back(pol.gain(s));
        write_text(dir_ / "gain.csv", matrix_series_csv("K", t, gains));

        const double cond = pol.closed_loop().worst_condition();
        if (cond > 1e12) say("warning: closed-loop propagator condition number " + format_number(cond));
        json meta = to_json(P.meta);
        meta["mode"] = mode_name(cfg_.mode);
        meta["grid"] = {{"N", cfg_.N}, {"refinement", cfg_.refinement}, {"intervals", P.grid().intervals()}};
        meta["assumptions_h5"] = h5_ok_;
        meta["propagator_worst_condition"] = cond;
        meta["corrupt_solution"] = cfg_.mode == Mode::verify ? cfg_.verification.corrupt_solution : 0.0;
        write_json(dir_ / "meta.json", meta);
    }

    int verify(const LQProblem& p, const RiccatiSolution& P, const EquilibriumPolicy& pol) {
        const auto& vc = cfg_.verification;
        const TimeGrid& g = P.grid();
        json out;

        const auto res = riccati_residuals(p, P);
        std::ostringstream csv;
        csv << "t,residual\n";
        double max_res = 0.0;
        for (int i = 0; i < g.size(); ++i) {
            csv << format_number(g[i]) << ',' << format_number(res[static_cast<std::size_t>(i)]) << '\n';
            max_res = std::max(max_res, res[static_cast<std::size_t>(i)]);
        }
        write_text(dir_ / "riccati_residual.csv", csv.str());
        const bool ric_pass = max_res <= vc.riccati_tol;
        out["riccati"] = {{"max_residual", max_res}, {"tolerance", vc.riccati_tol}, {"pass", ric_pass}};

        std::mt19937 rng(cfg_.sampling.seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_int_distribution<int> node(0, std::max(0, g.intervals() - 8));
        json samples = json::array();
        bool bvp_pass = true;
        bool gap_pass = true;
        const std::vector<Matrix> diag = nonlocal_diagonal(p, P);
        for (int k = 0; k < cfg_.sampling.bvp_samples; ++k) {
            const int i = node(rng);
            Vector x0(p.n);
            for (int j = 0; j < p.n; ++j) x0(j) = normal(rng);
            const double t0 = g[i];
            const BvpSolution sol = from_riccati(p, P, pol.closed_loop(), t0, x0);
            const BvpResidual br = bvp_residual(p, P, pol.closed_loop(), sol, diag);
            const double bvp_bound = vc.bvp_tol * (1.0 + x0.norm());
            const bool b_ok = std::max(br.res_X, br.res_phi) <= bvp_bound;
            const double gap = value_identity_gap(p, pol, t0, x0);
            const double value = x0.dot(P.node(i) * x0);
            const double gap_bound = vc.gap_tol * (1.0 + std::abs(value));
            const bool g_ok = gap <= gap_bound;
            bvp_pass = bvp_pass && b_ok;
            gap_pass = gap_pass && g_ok;
            samples.push_back({{"t0", t0},
                               {"x0", std::vector<double>(x0.data(), x0.data() + x0.size())},
                               {"res_X", br.res_X},
                               {"res_phi", br.res_phi},
                               {"bvp_bound", bvp_bound},
                               {"bvp_pass", b_ok},
                               {"value", value},
                               {"value_gap", gap},
                               {"gap_bound", gap_bound},
                               {"gap_pass", g_ok}});
        }
        out["bvp"] = {{"pass", bvp_pass}, {"tolerance", vc.bvp_tol}};
        out["value_identity"] = {{"pass", gap_pass}, {"tolerance", vc.gap_tol}};
        out["samples"] = samples;

        SampleSpec spec;
        spec.t_count = cfg_.sampling.t_count;
        spec.eps = cfg_.sampling.eps;
        spec.v_scale = cfg_.sampling.v_scale;
        spec.v_offset = cfg_.sampling.v_offset;
        const PerturbationReport cert = equilibrium_certificate(p, pol, spec);
        json cs = json::array();
        for (const auto& s : cert.samples) {
            cs.push_back({{"t", s.t},
                          {"x", std::vector<double>(s.x.data(), s.x.data() + s.x.size())},
                          {"v", std::vector<double>(s.v.data(), s.v.data() + s.v.size())},
                          {"closed_form", s.closed_form},
                          {"estimates", s.estimates},
                          {"extrapolated", s.extrapolated},
                          {"agrees", s.agrees}});
        }
        out["certificate"] = {{"pass", cert.pass},
                              {"all_agree", cert.all_agree},
                              {"min_closed_form", cert.min_closed_form},
                              {"min_extrapolated", cert.min_extrapolated},
                              {"samples", cs}};

        const double pc = P.c_norm();
        double asym = 0.0;
        double min_eig = std::numeric_limits<double>::infinity();
        for (const auto& v : P.values()) {
            asym = std::max(asym, matrix_norm(v - v.transpose()));
            min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Matrix>(symmetrize(v)).eigenvalues().minCoeff());
        }
        const double bound = P.meta.constants.a_priori_bound;
        const bool sym_ok = asym <= 1e-12 * (1.0 + pc);
        const bool bound_ok = pc <= bound * (1.0 + 1e-6);
        const bool psd_ok = !h5_ok_ || min_eig >= -1e-8 * (1.0 + pc);
        out["structure"] = {{"c_norm", pc},
                            {"symmetry_drift", asym},
                            {"symmetry_pass", sym_ok},
                            {"a_priori_bound", bound},
                            {"bound_pass", bound_ok},
                            {"min_eigenvalue", min_eig},
                            {"psd_asserted", h5_ok_},
                            {"psd_pass", psd_ok}};

        const bool all = ric_pass && bvp_pass && gap_pass && cert.pass && sym_ok && bound_ok && psd_ok;
        out["pass"] = all;
        write_json(dir_ / "verification.json", out);
        say("verify: riccati " + pass_word(ric_pass) + ", bvp " + pass_word(bvp_pass) + ", value identity " +
            pass_word(gap_pass) + ", certificate " + pass_word(cert.pass) + ", structure " +
            pass_word(sym_ok && bound_ok && psd_ok));
        if (all) return exit_ok;
        write_diagnostics(dir_, exit_verification, "verification", "one or more verification checks failed",
                          {{"riccati", ric_pass},
                           {"bvp", bvp_pass},
                           {"value_identity", gap_pass},
                           {"certificate", cert.pass},
                           {"structure", sym_ok && bound_ok && psd_ok}});
        return exit_verification;
    }

    int simulate_mode(const EquilibriumPolicy& pol, const TimeGrid& g) {
        const Trajectory tr = simulate(pol, cfg_.sim_t0, cfg_.sim_x0, g);
        const LQProblem& p = pol.problem();
        std::ostringstream csv;
        csv << 't';
        for (int i = 1; i <= p.n; ++i) csv << ",X_" << i;
        for (int i = 1; i <= p.m; ++i) csv << ",u_" << i;
        csv << '\n';
        for (std::size_t k = 0; k < tr.times.size(); ++k) {
            csv << format_number(tr.times[k]);
            for (int i = 0; i < p.n; ++i) csv << ',' << format_number(tr.states[k](i));
            for (int i = 0; i < p.m; ++i) csv << ',' << format_number(tr.controls[k](i));
            csv << '\n';
        }
        write_text(dir_ / "trajectory.csv", csv.str());
        say("simulate: " + std::to_string(tr.times.size()) + " samples");
        return exit_ok;
    }

    int compare(const RiccatiSolution& P, const ClassicalRiccatiSolution& ref) {
        const TimeGrid& g = P.grid();
        std::ostringstream csv;
        const int n = P.dim();
        csv << "t," << matrix_header("P", n, n) << ',' << matrix_header("Pref", n, n) << ",deviation\n";
        double worst = 0.0;
        double worst_t = 0.0;
        for (int i = 0; i < g.size(); ++i) {
            const Matrix& a = P.node(i);
            const Matrix& b = ref.values[static_cast<std::size_t>(i)];
            const double d = matrix_norm(a - b);
            if (d > worst) {
                worst = d;
                worst_t = g[i];
            }
            csv << format_number(g[i]) << ',' << matrix_fields(a) << ',' << matrix_fields(b) << ','
                << format_number(d) << '\n';
        }
        write_text(dir_ / "comparison.csv", csv.str());
        const double tol = cfg_.verification.oracle_tol * (1.0 + P.meta.constants.r);
        const bool pass = worst <= tol;
        write_json(dir_ / "comparison.json",
                   {{"max_deviation", worst}, {"at_t", worst_t}, {"tolerance", tol}, {"pass", pass}});
        say("compare-oracle: max deviation " + format_number(worst) + " (" + pass_word(pass) + ")");
        if (pass) return exit_ok;
        write_diagnostics(dir_, exit_verification, "oracle-mismatch", "deviation from the classical oracle",
                          {{"max_deviation", worst}, {"tolerance", tol}});
        return exit_verification;
    }

    static std::string pass_word(bool b) { return b ? "pass" : "fail"; }

    const RunConfig& cfg_;
    std::ostream& log_;
    RunOptions opts_;
    fs::path dir_;
    bool h5_ok_ = true;
};

}  // namespace

int run(const RunConfig& cfg, std::ostream& log, const RunOptions& opts) {
    const fs::path dir(cfg.out_dir);
    auto fail = [&](int code, const std::string& kind, const std::string& msg, json details) {
        log << "error: " << msg << '\n';
        try {
            fs::create_directories(dir);
            write_diagnostics(dir, code, kind, msg, std::move(details));
        } catch (const std::exception& e) {
            log << "error: cannot write diagnostics: " << e.what() << '\n';
        }
        return code;
    };
    try {
        return Runner(cfg, log, opts).execute();
    } catch (const NonConvergenceError& e) {
        return fail(exit_nonconvergence, "nonconvergence", e.what(),
                    {{"window", {e.a(), e.b()}}, {"update_norms", e.history()}});
    } catch (const EvaluationError& e) {
        return fail(exit_validation, "evaluation", e.what(), {{"t", e.t()}, {"s", e.s()}});
    } catch (const FactorizationError& e) {
        return fail(exit_validation, "factorization", e.what(), json::object());
    } catch (const InvalidInputError& e) {
        return fail(exit_validation, "invalid-input", e.what(), json::object());
    } catch (const std::exception& e) {
        return fail(exit_error, "internal", e.what(), json::object());
    }
}

}  // namespace tilq::cli
