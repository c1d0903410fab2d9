#include "cli_fixtures.hpp"

#include <tilq_cli/config.hpp>
#include <tilq_cli/output.hpp>
#include <tilq_cli/run.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

using namespace tilq;
using namespace tilq::cli;
using namespace tilq::fixtures;
using nlohmann::json;

namespace {

bool has_error(const ParseResult& r, const std::string& path) {
    for (const auto& e : r.errors) {
        if (e.path == path) return true;
    }
    return false;
}

int run_quiet(const json& doc) {
    const ParseResult r = parse_config(doc.dump());
    EXPECT_TRUE(r.errors.empty()) << (r.errors.empty() ? "" : r.errors[0].path + ": " + r.errors[0].message);
    if (!r.config) return -1;
    std::ostringstream log;
    RunOptions o;
    o.quiet = true;
    return run(*r.config, log, o);
}

int run_entry(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"tilq"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace

TEST(ParseConfig, Defaults) {
    const auto r = parse_config(tanh_config("solve", "x").dump());
    ASSERT_TRUE(r.errors.empty());
    ASSERT_TRUE(r.config.has_value());
    const RunConfig& c = *r.config;
    EXPECT_EQ(c.mode, Mode::solve);
    EXPECT_EQ(c.N, 400);
    EXPECT_EQ(c.refinement, 1);
    ASSERT_TRUE(c.solver.tol.has_value());
    EXPECT_DOUBLE_EQ(*c.solver.tol, 1e-10);
    EXPECT_EQ(c.sampling.t_count, 10);
    EXPECT_EQ(c.sampling.eps.size(), 3u);
    EXPECT_EQ(c.out_dir, "x");
}

TEST(ParseConfig, HyperbolicFamilyBuildsDiscountedKernels) {
    const auto r = parse_config(hyperbolic_config("verify", "x", 2.0, 1.0).dump());
    ASSERT_TRUE(r.errors.empty());
    const LQProblem p = build_problem(*r.config);
    // (1 + k (s - t))^(-theta) with k = 2, theta = 1.
    EXPECT_NEAR(p.Q(0.2, 0.7)(0, 0), 1.0 / (1.0 + 2.0 * 0.5), 1e-14);
    EXPECT_NEAR(p.G(0.25)(0, 0), 1.0 / (1.0 + 2.0 * 0.75), 1e-14);
    EXPECT_NEAR(p.M.dt(0.2, 0.7)(0, 0), 2.0 / std::pow(2.0, 2.0), 1e-12);
}

TEST(ParseConfig, ModeNamesRoundTrip) {
    for (Mode m : {Mode::validate, Mode::solve, Mode::verify, Mode::simulate, Mode::compare_oracle}) {
        EXPECT_EQ(parse_mode(mode_name(m)), m);
    }
    EXPECT_FALSE(parse_mode("fly").has_value());
}

TEST(ParseConfig, RejectsAsymmetricWeight) {
    json doc = tanh_config("solve", "x");
    doc["problem"]["n"] = 2;
    doc["problem"]["m"] = 2;
    doc["problem"]["A"] = constant_coeff({{0.0, 0.0}, {0.0, 0.0}});
    doc["problem"]["B"] = constant_coeff({{1.0, 0.0}, {0.0, 1.0}});
    doc["problem"]["Q"] = constant_coeff({{1.0, 0.0}, {0.0, 1.0}});
    doc["problem"]["G"] = constant_coeff({{0.0, 0.0}, {0.0, 0.0}});
    doc["problem"]["M"] = hyperbolic_coeff({{1.0, 0.5}, {0.0, 1.0}}, 1.0, 1.0);
    const auto r = parse_config(doc.dump());
    EXPECT_FALSE(r.config.has_value());
    EXPECT_TRUE(has_error(r, "problem.M.base"));
}

TEST(ParseConfig, RejectsUnknownFamilyAndKeys) {
    json doc = tanh_config("solve", "x");
    doc["problem"]["Q"] = {{"family", "spline"}, {"value", {{1.0}}}};
    doc["solver"] = {{"tolerance", 1e-8}};
    const auto r = parse_config(doc.dump());
    EXPECT_FALSE(r.config.has_value());
    EXPECT_TRUE(has_error(r, "problem.Q.family"));
    EXPECT_TRUE(has_error(r, "solver.tolerance"));
}

TEST(ParseConfig, RejectsDimensionMismatch) {
    json doc = tanh_config("solve", "x");
    doc["problem"]["B"] = constant_coeff({{1.0, 2.0}});
    const auto r = parse_config(doc.dump());
    EXPECT_FALSE(r.config.has_value());
    EXPECT_FALSE(r.errors.empty());
}

TEST(ParseConfig, RejectsMalformedJsonAndVersion) {
    EXPECT_FALSE(parse_config("{").errors.empty());
    json doc = tanh_config("solve", "x");
    doc["schema_version"] = 2;
    EXPECT_TRUE(has_error(parse_config(doc.dump()), "schema_version"));
}

TEST(ParseConfig, PolynomialKernelVariables) {
    json doc = tanh_config("solve", "x");
    doc["problem"]["Q"] = {{"family", "polynomial"}, {"coeffs", {{{1.0}}, {{0.5}}}}, {"variable", "lag"}};
    doc["problem"]["M"] = {{"family", "polynomial"}, {"coeffs", {{{1.0}}, {{0.5}}}}};
    const auto r = parse_config(doc.dump());
    ASSERT_TRUE(r.errors.empty());
    const LQProblem p = build_problem(*r.config);
    EXPECT_NEAR(p.Q(0.25, 0.75)(0, 0), 1.0 + 0.5 * 0.5, 1e-15);
    EXPECT_NEAR(p.M(0.25, 0.75)(0, 0), 1.0 + 0.5 * 0.75, 1e-15);
    doc["problem"]["Q"]["variable"] = "u";
    EXPECT_TRUE(has_error(parse_config(doc.dump()), "problem.Q.variable"));
}

TEST(ApplyOverrides, ValidatesValues) {
    RunConfig c = *parse_config(tanh_config("solve", "x").dump()).config;
    Overrides o;
    o.mode = "verify";
    o.N = 64;
    o.tol = 1e-9;
    o.out_dir = "y";
    EXPECT_TRUE(apply_overrides(c, o).empty());
    EXPECT_EQ(c.mode, Mode::verify);
    EXPECT_EQ(c.N, 64);
    EXPECT_DOUBLE_EQ(*c.solver.tol, 1e-9);
    EXPECT_EQ(c.out_dir, "y");
    Overrides bad;
    bad.mode = "fly";
    bad.N = 2;
    bad.tol = -1.0;
    EXPECT_EQ(apply_overrides(c, bad).size(), 3u);
}

TEST(Output, NumbersRoundTrip) {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 12345.678}) EXPECT_EQ(std::stod(format_number(x)), x);
    Matrix m(2, 2);
    m << 1, 2, 3, 4;
    EXPECT_EQ(matrix_header("P", 2, 2), "P_1_1,P_1_2,P_2_1,P_2_2");
    EXPECT_EQ(matrix_fields(m), "1,2,3,4");
}

TEST(Run, VerifyDecoupledMatchesClosedForm) {
    const auto dir = scratch_dir("verify_decoupled");
    ASSERT_EQ(run_quiet(decoupled_config("verify", dir.string())), exit_ok);
    const json v = read_json(dir / "verification.json");
    EXPECT_TRUE(v["pass"].get<bool>());
    EXPECT_LE(v["riccati"]["max_residual"].get<double>(), 1e-8);
    const json P = read_json(dir / "P.json");
    const json meta = read_json(dir / "meta.json");
    EXPECT_EQ(meta["mode"], "verify");
    EXPECT_TRUE(std::filesystem::exists(dir / "P.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "gain.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "riccati_residual.csv"));
    EXPECT_FALSE(std::filesystem::exists(dir / "diagnostics.json"));
}

TEST(Run, CompareOracleOnTanhProblem) {
    const auto dir = scratch_dir("compare_tanh");
    ASSERT_EQ(run_quiet(tanh_config("compare-oracle", dir.string())), exit_ok);
    const json c = read_json(dir / "comparison.json");
    EXPECT_TRUE(c["pass"].get<bool>());
    EXPECT_LE(c["max_deviation"].get<double>(), 1e-6);
}

TEST(Run, CompareOracleRejectsTimeInconsistentProblem) {
    const auto dir = scratch_dir("compare_reject");
    EXPECT_EQ(run_quiet(hyperbolic_config("compare-oracle", dir.string(), 1.0, 1.0)), exit_validation);
    const json d = read_json(dir / "diagnostics.json");
    EXPECT_EQ(d["error"], "oracle-rejected");
    EXPECT_GT(d["details"]["time_inconsistency"].get<double>(), 0.0);
}

TEST(Run, VerifyHyperbolicScalar) {
    const auto dir = scratch_dir("verify_hyperbolic");
    ASSERT_EQ(run_quiet(hyperbolic_config("verify", dir.string(), 1.0, 1.0)), exit_ok);
    const json v = read_json(dir / "verification.json");
    EXPECT_TRUE(v["pass"].get<bool>());
    EXPECT_TRUE(v["structure"]["psd_asserted"].get<bool>());
}

TEST(Run, SimulateWritesTrajectory) {
    const auto dir = scratch_dir("simulate");
    json doc = decoupled_config("simulate", dir.string());
    doc["simulate"] = {{"t0", 0.5}, {"x0", {1.0, -1.0}}};
    ASSERT_EQ(run_quiet(doc), exit_ok);
    const std::string csv = read_file(dir / "trajectory.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,X_1,X_2,u_1");
}

TEST(Run, ValidateModeReportsViolations) {
    const auto dir = scratch_dir("validate_bad");
    json doc = tanh_config("validate", dir.string());
    doc["problem"]["M"] = constant_coeff({{-1.0}});
    EXPECT_EQ(run_quiet(doc), exit_validation);
    EXPECT_FALSE(read_json(dir / "validation.json")["overall"].get<bool>());
    EXPECT_EQ(read_json(dir / "diagnostics.json")["exit_code"], 2);
}

TEST(Run, NonConvergenceExitsWithThree) {
    const auto dir = scratch_dir("nonconvergence");
    json doc = hyperbolic_config("solve", dir.string(), 1.0, 1.0);
    doc["solver"] = {{"max_iter", 1}};
    EXPECT_EQ(run_quiet(doc), exit_nonconvergence);
    const json d = read_json(dir / "diagnostics.json");
    EXPECT_EQ(d["error"], "nonconvergence");
    EXPECT_FALSE(d["details"]["update_norms"].empty());
}

TEST(Run, CorruptedSolutionFailsVerification) {
    const auto dir = scratch_dir("corrupt");
    json doc = hyperbolic_config("verify", dir.string(), 1.0, 1.0);
    doc["verification"] = {{"corrupt_solution", 0.05}};
    EXPECT_EQ(run_quiet(doc), exit_verification);
    const json v = read_json(dir / "verification.json");
    EXPECT_FALSE(v["pass"].get<bool>());
    EXPECT_FALSE(v["riccati"]["pass"].get<bool>());
    EXPECT_FALSE(v["certificate"]["pass"].get<bool>());
}

TEST(Run, OutputsAreBitIdentical) {
    const auto a = scratch_dir("repeat_a");
    const auto b = scratch_dir("repeat_b");
    ASSERT_EQ(run_quiet(hyperbolic_config("verify", a.string(), 2.0, 2.0)), exit_ok);
    ASSERT_EQ(run_quiet(hyperbolic_config("verify", b.string(), 2.0, 2.0)), exit_ok);
    for (const char* f : {"P.csv", "P.json", "gain.csv", "meta.json", "verification.json", "riccati_residual.csv"}) {
        EXPECT_EQ(read_file(a / f), read_file(b / f)) << f;
    }
}

TEST(MainEntry, ExitCodes) {
    const auto dir = scratch_dir("main_entry");
    const auto cfg = dir / "tanh.json";
    write_file(cfg, tanh_config("solve", (dir / "out").string()).dump());
    EXPECT_EQ(run_entry({"--config", cfg.string(), "--quiet"}), exit_ok);
    EXPECT_TRUE(std::filesystem::exists(dir / "out" / "P.csv"));
    EXPECT_EQ(run_entry({"--config", cfg.string(), "--quiet", "--mode", "fly", "--out", (dir / "bad").string()}),
              exit_validation);
    EXPECT_EQ(read_json(dir / "bad" / "diagnostics.json")["error"], "schema");
    EXPECT_EQ(run_entry({"--config", (dir / "missing.json").string()}), exit_error);
    EXPECT_EQ(run_entry({"--quiet"}), exit_validation);
    EXPECT_EQ(run_entry({"--config", cfg.string(), "--quiet", "--grid", "64", "--out", (dir / "g").string()}),
              exit_ok);
    EXPECT_EQ(read_json(dir / "g" / "meta.json")["grid"]["N"], 64);
}
