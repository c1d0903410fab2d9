#pragma once

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace tilq::fixtures {

/// Fresh empty directory under the system temp directory.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("tilq_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

inline nlohmann::json read_json(const std::filesystem::path& p) { return nlohmann::json::parse(read_file(p)); }

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    f << text;
}

inline nlohmann::json constant_coeff(const nlohmann::json& value) {
    return {{"family", "constant"}, {"value", value}};
}

/// Scalar problem with A=0, B=1, Q=M=1, G=0 solved by tanh(1-t).
inline nlohmann::json tanh_config(const std::string& mode, const std::string& dir) {
    return {{"schema_version", 1},
            {"mode", mode},
            {"problem",
             {{"n", 1},
              {"m", 1},
              {"T", 1.0},
              {"A", constant_coeff({{0.0}})},
              {"B", constant_coeff({{1.0}})},
              {"Q", constant_coeff({{1.0}})},
              {"M", constant_coeff({{1.0}})},
              {"G", constant_coeff({{0.0}})}}},
            {"output", {{"dir", dir}}}};
}

/// Two states, one control, A=B=0, T=2: P(t) = G + (T - t) Q.
inline nlohmann::json decoupled_config(const std::string& mode, const std::string& dir) {
    return {{"schema_version", 1},
            {"mode", mode},
            {"problem",
             {{"n", 2},
              {"m", 1},
              {"T", 2.0},
              {"A", constant_coeff({{0.0, 0.0}, {0.0, 0.0}})},
              {"B", constant_coeff({{0.0}, {0.0}})},
              {"Q", constant_coeff({{1.0, 0.3}, {0.3, 2.0}})},
              {"M", constant_coeff({{1.0}})},
              {"G", constant_coeff({{0.5, 0.0}, {0.0, 0.25}})}}},
            {"output", {{"dir", dir}}}};
}

inline nlohmann::json hyperbolic_coeff(const nlohmann::json& base, double k, double theta) {
    return {{"family", "hyperbolic"}, {"base", base}, {"k", k}, {"theta", theta}};
}

/// Scalar hyperbolic-discount problem with A=0, B=1.
inline nlohmann::json hyperbolic_config(const std::string& mode, const std::string& dir, double k, double theta) {
    return {{"schema_version", 1},
            {"mode", mode},
            {"problem",
             {{"n", 1},
              {"m", 1},
              {"T", 1.0},
              {"A", constant_coeff({{0.0}})},
              {"B", constant_coeff({{1.0}})},
              {"Q", hyperbolic_coeff({{1.0}}, k, theta)},
              {"M", hyperbolic_coeff({{1.0}}, k, theta)},
              {"G", hyperbolic_coeff({{1.0}}, k, theta)}}},
            {"output", {{"dir", dir}}}};
}

}  // namespace tilq::fixtures
