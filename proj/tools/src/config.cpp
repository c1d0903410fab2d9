#include "tilq_cli/config.hpp"

#include <tilq/families.hpp>

#include <json.hpp>

#include <cmath>
#include <set>

namespace tilq::cli {

using json = nlohmann::json;

std::string mode_name(Mode m) {
    switch (m) {
    case Mode::validate: return "validate";
    case Mode::solve: return "solve";
    case Mode::verify: return "verify";
    case Mode::simulate: return "simulate";
    case Mode::compare_oracle: return "compare-oracle";
    }
    return "solve";
}

std::optional<Mode> parse_mode(const std::string& s) {
    for (Mode m : {Mode::validate, Mode::solve, Mode::verify, Mode::simulate, Mode::compare_oracle}) {
        if (mode_name(m) == s) return m;
    }
    return std::nullopt;
}

namespace {

enum class Kind { one_time, kernel };

class Reader {
public:
    std::vector<SchemaError> errors;

    void fail(const std::string& path, const std::string& msg) { errors.push_back({path, msg}); }

    bool object(const json& j, const std::string& path) {
        if (!j.is_object()) {
            fail(path, "expected an object");
            return false;
        }
        return true;
    }

    void known_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
        const std::set<std::string> allowed(keys.begin(), keys.end());
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!allowed.count(it.key())) fail(join(path, it.key()), "unknown key");
        }
    }

    static std::string join(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }

    std::optional<double> number(const json& obj, const std::string& path, const char* key, bool required) {
        const std::string p = join(path, key);
        if (!obj.contains(key)) {
            if (required) fail(p, "required");
            return std::nullopt;
        }
        const json& v = obj.at(key);
        if (!v.is_number()) {
            fail(p, "expected a number");
            return std::nullopt;
        }
        const double x = v.get<double>();
        if (!std::isfinite(x)) {
            fail(p, "must be finite");
            return std::nullopt;
        }
        return x;
    }

    std::optional<long long> integer(const json& obj, const std::string& path, const char* key, bool required) {
        const std::string p = join(path, key);
        if (!obj.contains(key)) {
            if (required) fail(p, "required");
            return std::nullopt;
        }
        const json& v = obj.at(key);
        if (!v.is_number_integer()) {
            fail(p, "expected an integer");
            return std::nullopt;
        }
        return v.get<long long>();
    }

    std::optional<Matrix> matrix(const json& v, const std::string& p, int rows, int cols) {
        if (v.is_number() && rows == 1 && cols == 1) return Matrix::Constant(1, 1, v.get<double>());
        if (!v.is_array() || static_cast<int>(v.size()) != rows) {
            fail(p, "expected " + std::to_string(rows) + "x" + std::to_string(cols) + " matrix (array of rows)");
            return std::nullopt;
        }
        Matrix out(rows, cols);
        for (int i = 0; i < rows; ++i) {
            const json& row = v[static_cast<std::size_t>(i)];
            if (!row.is_array() || static_cast<int>(row.size()) != cols) {
                fail(p + "[" + std::to_string(i) + "]", "expected a row of " + std::to_string(cols) + " numbers");
                return std::nullopt;
            }
            for (int j = 0; j < cols; ++j) {
                const json& x = row[static_cast<std::size_t>(j)];
                if (!x.is_number() || !std::isfinite(x.get<double>())) {
                    fail(p + "[" + std::to_string(i) + "][" + std::to_string(j) + "]", "expected a finite number");
                    return std::nullopt;
                }
                out(i, j) = x.get<double>();
            }
        }
        return out;
    }

    void check_symmetric(const Matrix& m, const std::string& p) {
        const double scale = 1.0 + m.cwiseAbs().maxCoeff();
        if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) fail(p, "matrix must be symmetric");
    }

    CoefficientSpec coefficient(const json& obj, const std::string& path, const char* key, int rows, int cols,
                                Kind kind, bool symmetric, bool required) {
        CoefficientSpec c;
        c.value = Matrix::Zero(rows, cols);
        const std::string p = join(path, key);
        if (!obj.contains(key)) {
            if (required) fail(p, "required");
            return c;
        }
        const json& j = obj.at(key);
        if (!object(j, p)) return c;
        if (!j.contains("family") || !j.at("family").is_string()) {
            fail(join(p, "family"), "required string");
            return c;
        }
        c.family = j.at("family").get<std::string>();
        auto base = [&](const char* name) {
            const std::string bp = join(p, name);
            if (!j.contains(name)) {
                fail(bp, "required");
                return;
            }
            if (auto m = matrix(j.at(name), bp, rows, cols)) {
                c.value = *m;
                if (symmetric) check_symmetric(*m, bp);
            }
        };
        if (c.family == "constant") {
            known_keys(j, p, {"family", "value"});
            base("value");
        } else if (c.family == "polynomial") {
            if (kind == Kind::kernel) {
                known_keys(j, p, {"family", "coeffs", "variable"});
                if (j.contains("variable")) {
                    const json& v = j.at("variable");
                    if (!v.is_string() || (v.get<std::string>() != "s" && v.get<std::string>() != "lag")) {
                        fail(join(p, "variable"), "expected \"s\" or \"lag\"");
                    } else {
                        c.variable = v.get<std::string>();
                    }
                }
            } else {
                known_keys(j, p, {"family", "coeffs"});
                c.variable = "t";
            }
            const std::string cp = join(p, "coeffs");
            if (!j.contains("coeffs") || !j.at("coeffs").is_array() || j.at("coeffs").empty()) {
                fail(cp, "expected a non-empty array of matrices");
                return c;
            }
            const json& arr = j.at("coeffs");
            for (std::size_t i = 0; i < arr.size(); ++i) {
                const std::string ip = cp + "[" + std::to_string(i) + "]";
                if (auto m = matrix(arr[i], ip, rows, cols)) {
                    if (symmetric) check_symmetric(*m, ip);
                    c.coeffs.push_back(*m);
                }
            }
        } else if (c.family == "exponential") {
            known_keys(j, p, {"family", "base", "rho"});
            base("base");
            if (auto r = number(j, p, "rho", true)) c.rho = *r;
        } else if (c.family == "hyperbolic") {
            known_keys(j, p, {"family", "base", "k", "theta"});
            base("base");
            if (auto k = number(j, p, "k", true)) {
                if (*k < 0.0) fail(join(p, "k"), "must be nonnegative");
                c.k = *k;
            }
            if (auto th = number(j, p, "theta", true)) {
                if (*th < 0.0) fail(join(p, "theta"), "must be nonnegative");
                c.theta = *th;
            }
        } else {
            fail(join(p, "family"), "unknown family \"" + c.family + "\"");
        }
        return c;
    }
};

OneTimeMatrixFn one_time(const CoefficientSpec& c, double T) {
    if (c.family == "polynomial") return families::polynomial(c.coeffs, T);
    if (c.family == "exponential") return families::exponential_to_horizon(c.value, c.rho, T);
    if (c.family == "hyperbolic") return families::hyperbolic_to_horizon(c.value, c.k, c.theta, T);
    return families::constant(c.value, T);
}

TwoTimeKernel kernel(const CoefficientSpec& c, double T, bool symmetric) {
    if (c.family == "polynomial") {
        return c.variable == "lag" ? families::polynomial_lag(c.coeffs, T, symmetric)
                                   : families::polynomial_in_s(c.coeffs, T, symmetric);
    }
    if (c.family == "exponential") return families::exponential(c.value, c.rho, T, symmetric);
    if (c.family == "hyperbolic") return families::hyperbolic(c.value, c.k, c.theta, T, symmetric);
    return families::constant_kernel(c.value, T, symmetric);
}

}  // namespace

ParseResult parse_config(const std::string& text) {
    ParseResult out;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        out.errors.push_back({"", std::string("malformed JSON: ") + e.what()});
        return out;
    }
    Reader r;
    if (!r.object(doc, "")) {
        out.errors = std::move(r.errors);
        return out;
    }
    r.known_keys(doc, "", {"schema_version", "mode", "problem", "grid", "solver", "sampling", "simulate",
                           "verification", "output"});
    RunConfig cfg;

    if (auto v = r.integer(doc, "", "schema_version", true); v && *v != 1) {
        r.fail("schema_version", "unsupported version " + std::to_string(*v));
    }
    if (doc.contains("mode")) {
        const json& m = doc.at("mode");
        const auto parsed = m.is_string() ? parse_mode(m.get<std::string>()) : std::nullopt;
        if (!parsed) {
            r.fail("mode", "expected one of validate, solve, verify, simulate, compare-oracle");
        } else {
            cfg.mode = *parsed;
        }
    }

    bool dims_ok = false;
    if (!doc.contains("problem")) {
        r.fail("problem", "required");
    } else if (const json& pj = doc.at("problem"); r.object(pj, "problem")) {
        r.known_keys(pj, "problem", {"n", "m", "T", "A", "B", "Q", "S", "M", "G"});
        const auto n = r.integer(pj, "problem", "n", true);
        const auto m = r.integer(pj, "problem", "m", true);
        const auto T = r.number(pj, "problem", "T", true);
        if (n && *n < 1) r.fail("problem.n", "must be >= 1");
        if (m && *m < 1) r.fail("problem.m", "must be >= 1");
        if (T && !(*T > 0.0)) r.fail("problem.T", "must be positive");
        if (n && m && T && *n >= 1 && *m >= 1 && *T > 0.0) {
            dims_ok = true;
            cfg.n = static_cast<int>(*n);
            cfg.m = static_cast<int>(*m);
            cfg.T = *T;
            const int N = cfg.n;
            const int M = cfg.m;
            cfg.A = r.coefficient(pj, "problem", "A", N, N, Kind::one_time, false, true);
            cfg.B = r.coefficient(pj, "problem", "B", N, M, Kind::one_time, false, true);
            cfg.Q = r.coefficient(pj, "problem", "Q", N, N, Kind::kernel, true, true);
            cfg.S = r.coefficient(pj, "problem", "S", M, N, Kind::kernel, false, false);
            cfg.M = r.coefficient(pj, "problem", "M", M, M, Kind::kernel, true, true);
            cfg.G = r.coefficient(pj, "problem", "G", N, N, Kind::one_time, true, true);
        }
    }

    if (doc.contains("grid") && r.object(doc.at("grid"), "grid")) {
        const json& g = doc.at("grid");
        r.known_keys(g, "grid", {"N", "refinement"});
        if (auto N = r.integer(g, "grid", "N", false)) {
            if (*N < 16) r.fail("grid.N", "must be >= 16");
            cfg.N = static_cast<int>(*N);
        }
        if (auto f = r.integer(g, "grid", "refinement", false)) {
            if (*f < 1) r.fail("grid.refinement", "must be >= 1");
            cfg.refinement = static_cast<int>(*f);
        }
    }

    cfg.solver.tol = 1e-10;
    if (doc.contains("solver") && r.object(doc.at("solver"), "solver")) {
        const json& s = doc.at("solver");
        r.known_keys(s, "solver", {"tol", "max_iter", "window_override"});
        if (auto tol = r.number(s, "solver", "tol", false)) {
            if (!(*tol > 0.0)) r.fail("solver.tol", "must be positive");
            cfg.solver.tol = *tol;
        }
        if (auto it = r.integer(s, "solver", "max_iter", false)) {
            if (*it < 1) r.fail("solver.max_iter", "must be >= 1");
            cfg.solver.max_iter = static_cast<int>(*it);
        }
        if (auto w = r.number(s, "solver", "window_override", false)) {
            if (!(*w > 0.0)) r.fail("solver.window_override", "must be positive");
            cfg.solver.window_override = *w;
        }
    }

    if (doc.contains("sampling") && r.object(doc.at("sampling"), "sampling")) {
        const json& s = doc.at("sampling");
        r.known_keys(s, "sampling", {"t_count", "eps", "v_scale", "v_offset", "bvp_samples", "seed"});
        if (auto c = r.integer(s, "sampling", "t_count", false)) {
            if (*c < 1) r.fail("sampling.t_count", "must be >= 1");
            cfg.sampling.t_count = static_cast<int>(*c);
        }
        if (s.contains("eps")) {
            const json& e = s.at("eps");
            std::vector<double> eps;
            bool ok = e.is_array() && e.size() >= 2;
            for (std::size_t i = 0; ok && i < e.size(); ++i) {
                ok = e[i].is_number() && e[i].get<double>() > 0.0 && e[i].get<double>() < 1.0 &&
                     (i == 0 || e[i].get<double>() < eps.back());
                if (ok) eps.push_back(e[i].get<double>());
            }
            if (!ok) {
                r.fail("sampling.eps", "expected at least two decreasing fractions of T in (0, 1)");
            } else {
                cfg.sampling.eps = eps;
            }
        }
        if (auto v = r.number(s, "sampling", "v_scale", false)) {
            if (!(*v > 0.0)) r.fail("sampling.v_scale", "must be positive");
            cfg.sampling.v_scale = *v;
        }
        if (auto v = r.number(s, "sampling", "v_offset", false)) {
            if (!(*v > 0.0)) r.fail("sampling.v_offset", "must be positive");
            cfg.sampling.v_offset = *v;
        }
        if (auto c = r.integer(s, "sampling", "bvp_samples", false)) {
            if (*c < 1) r.fail("sampling.bvp_samples", "must be >= 1");
            cfg.sampling.bvp_samples = static_cast<int>(*c);
        }
        if (auto c = r.integer(s, "sampling", "seed", false)) {
            if (*c < 0) r.fail("sampling.seed", "must be nonnegative");
            cfg.sampling.seed = static_cast<unsigned>(*c);
        }
    }

    if (dims_ok) cfg.sim_x0 = Vector::Ones(cfg.n);
    if (doc.contains("simulate") && r.object(doc.at("simulate"), "simulate")) {
        const json& s = doc.at("simulate");
        r.known_keys(s, "simulate", {"t0", "x0"});
        if (auto t0 = r.number(s, "simulate", "t0", false)) {
            if (dims_ok && (*t0 < 0.0 || *t0 >= cfg.T)) r.fail("simulate.t0", "must lie in [0, T)");
            cfg.sim_t0 = *t0;
        }
        if (s.contains("x0") && dims_ok) {
            const json& x = s.at("x0");
            if (!x.is_array() || static_cast<int>(x.size()) != cfg.n) {
                r.fail("simulate.x0", "expected " + std::to_string(cfg.n) + " numbers");
            } else {
                for (int i = 0; i < cfg.n; ++i) {
                    const json& xi = x[static_cast<std::size_t>(i)];
                    if (!xi.is_number() || !std::isfinite(xi.get<double>())) {
                        r.fail("simulate.x0[" + std::to_string(i) + "]", "expected a finite number");
                    } else {
                        cfg.sim_x0(i) = xi.get<double>();
                    }
                }
            }
        }
    }

    if (doc.contains("verification") && r.object(doc.at("verification"), "verification")) {
        const json& v = doc.at("verification");
        r.known_keys(v, "verification",
                     {"corrupt_solution", "riccati_tol", "bvp_tol", "gap_tol", "oracle_tol"});
        if (auto c = r.number(v, "verification", "corrupt_solution", false)) cfg.verification.corrupt_solution = *c;
        auto positive = [&](const char* key, double& dst) {
            if (auto x = r.number(v, "verification", key, false)) {
                if (!(*x > 0.0)) r.fail(std::string("verification.") + key, "must be positive");
                dst = *x;
            }
        };
        positive("riccati_tol", cfg.verification.riccati_tol);
        positive("bvp_tol", cfg.verification.bvp_tol);
        positive("gap_tol", cfg.verification.gap_tol);
        positive("oracle_tol", cfg.verification.oracle_tol);
    }

    if (doc.contains("output") && r.object(doc.at("output"), "output")) {
        const json& o = doc.at("output");
        r.known_keys(o, "output", {"dir"});
        if (o.contains("dir")) {
            if (!o.at("dir").is_string() || o.at("dir").get<std::string>().empty()) {
                r.fail("output.dir", "expected a non-empty string");
            } else {
                cfg.out_dir = o.at("dir").get<std::string>();
            }
        }
    }

    out.errors = std::move(r.errors);
    if (out.errors.empty()) out.config = std::move(cfg);
    return out;
}

std::vector<SchemaError> apply_overrides(RunConfig& cfg, const Overrides& o) {
    std::vector<SchemaError> errs;
    if (o.mode) {
        if (auto m = parse_mode(*o.mode)) {
            cfg.mode = *m;
        } else {
            errs.push_back({"--mode", "expected one of validate, solve, verify, simulate, compare-oracle"});
        }
    }
    if (o.out_dir) cfg.out_dir = *o.out_dir;
    if (o.N) {
        if (*o.N < 16) {
            errs.push_back({"--grid", "must be >= 16"});
        } else {
            cfg.N = *o.N;
        }
    }
    if (o.tol) {
        if (!(*o.tol > 0.0) || !std::isfinite(*o.tol)) {
            errs.push_back({"--tol", "must be positive"});
        } else {
            cfg.solver.tol = *o.tol;
        }
    }
    return errs;
}

LQProblem build_problem(const RunConfig& cfg) {
    LQProblem p;
    p.n = cfg.n;
    p.m = cfg.m;
    p.T = cfg.T;
    p.A = one_time(cfg.A, cfg.T);
    p.B = one_time(cfg.B, cfg.T);
    p.Q = kernel(cfg.Q, cfg.T, true);
    p.S = kernel(cfg.S, cfg.T, false);
    p.M = kernel(cfg.M, cfg.T, true);
    p.G = one_time(cfg.G, cfg.T);
    p.check_dimensions();
    return p;
}

}  // namespace tilq::cli
