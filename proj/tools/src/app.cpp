#include "tilq_cli/output.hpp"
#include "tilq_cli/run.hpp"

#include <tilq/parallel.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace tilq::cli {

namespace {

std::optional<int> env_threads() {
    const char* v = std::getenv("TILQ_THREADS");
    if (!v || !*v) return std::nullopt;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 1) return std::nullopt;
    return static_cast<int>(n);
}

/// Output directory for diagnostics when the config itself is unusable.
std::string fallback_dir(const Overrides& o, const std::string& text) {
    if (o.out_dir) return *o.out_dir;
    const auto doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_object() && doc.contains("output") && doc["output"].is_object() && doc["output"].contains("dir") &&
        doc["output"]["dir"].is_string()) {
        return doc["output"]["dir"].get<std::string>();
    }
    return "tilq_out";
}

}  // namespace

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Equilibrium Riccati solver for time-inconsistent linear-quadratic problems"};
    std::string config_path;
    std::string mode;
    std::string out_dir;
    int grid = 0;
    double tol = 0.0;
    bool quiet = false;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    auto* mode_opt = app.add_option("--mode", mode, "validate | solve | verify | simulate | compare-oracle");
    auto* out_opt = app.add_option("--out", out_dir, "output directory");
    auto* grid_opt = app.add_option("--grid", grid, "grid intervals N");
    auto* tol_opt = app.add_option("--tol", tol, "fixed-point tolerance");
    app.add_flag("--quiet", quiet, "suppress progress output");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_validation;
    }

    Overrides ov;
    if (*mode_opt) ov.mode = mode;
    if (*out_opt) ov.out_dir = out_dir;
    if (*grid_opt) ov.N = grid;
    if (*tol_opt) ov.tol = tol;

    std::ifstream f(config_path, std::ios::binary);
    if (!f) {
        err << "error: cannot read " << config_path << '\n';
        return exit_error;
    }
    std::stringstream buf;
    buf << f.rdbuf();
    const std::string text = buf.str();

    ParseResult parsed = parse_config(text);
    std::vector<SchemaError> errors = parsed.errors;
    if (parsed.config) {
        auto more = apply_overrides(*parsed.config, ov);
        errors.insert(errors.end(), more.begin(), more.end());
    }
    if (!errors.empty()) {
        nlohmann::json list = nlohmann::json::array();
        for (const auto& e : errors) {
            err << "schema error at " << (e.path.empty() ? "<root>" : e.path) << ": " << e.message << '\n';
            list.push_back({{"path", e.path}, {"message", e.message}});
        }
        try {
            const std::filesystem::path dir = fallback_dir(ov, text);
            std::filesystem::create_directories(dir);
            write_json(dir / "diagnostics.json", {{"exit_code", static_cast<int>(exit_validation)},
                                                  {"error", "schema"},
                                                  {"message", "configuration rejected"},
                                                  {"details", {{"errors", list}}}});
        } catch (const std::exception& e) {
            err << "error: cannot write diagnostics: " << e.what() << '\n';
        }
        return exit_validation;
    }

    if (auto n = env_threads()) set_thread_limit(*n);
    RunOptions ro;
    ro.quiet = quiet;
    return run(*parsed.config, quiet ? err : out, ro);
}

}  // namespace tilq::cli
