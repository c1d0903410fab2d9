#pragma once

#include <tilq/problem.hpp>
#include <tilq/riccati.hpp>

#include <optional>
#include <string>
#include <vector>

namespace tilq::cli {

enum class Mode { validate, solve, verify, simulate, compare_oracle };

std::string mode_name(Mode m);
std::optional<Mode> parse_mode(const std::string& s);

/// One coefficient from the closed family vocabulary.
struct CoefficientSpec {
    std::string family = "constant";  ///< constant, polynomial, exponential, hyperbolic
    Matrix value;                     ///< constant value or family base matrix
    std::vector<Matrix> coeffs;       ///< polynomial coefficients, lowest degree first
    std::string variable = "s";       ///< polynomial kernels: "s" or "lag" (s - t)
    double rho = 0.0;
    double k = 0.0;
    double theta = 0.0;
};

struct SamplingConfig {
    int t_count = 10;
    std::vector<double> eps = {0.1, 0.05, 0.025};
    double v_scale = 1.0;
    double v_offset = 0.1;
    int bvp_samples = 5;
    unsigned seed = 7;
};

struct VerificationConfig {
    double corrupt_solution = 0.0;  ///< adds this multiple of the identity to every solved node
    double riccati_tol = 1e-6;
    double bvp_tol = 5e-6;
    double gap_tol = 1e-6;
    double oracle_tol = 1e-6;
};

struct RunConfig {
    Mode mode = Mode::solve;
    int n = 0;
    int m = 0;
    double T = 0.0;
    CoefficientSpec A, B, Q, S, M, G;
    int N = 400;
    int refinement = 1;
    SolveOptions solver;
    SamplingConfig sampling;
    double sim_t0 = 0.0;
    Vector sim_x0;
    VerificationConfig verification;
    std::string out_dir = "tilq_out";

    int intervals() const { return N * refinement; }
};

struct SchemaError {
    std::string path;
    std::string message;
};

struct ParseResult {
    std::optional<RunConfig> config;
    std::vector<SchemaError> errors;
};

ParseResult parse_config(const std::string& text);

struct Overrides {
    std::optional<std::string> mode;
    std::optional<std::string> out_dir;
    std::optional<int> N;
    std::optional<double> tol;
};

/// Applies command-line overrides; returns schema errors for invalid values.
std::vector<SchemaError> apply_overrides(RunConfig& cfg, const Overrides& o);

LQProblem build_problem(const RunConfig& cfg);

}  // namespace tilq::cli
