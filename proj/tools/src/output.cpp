#include "tilq_cli/output.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace tilq::cli {

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string matrix_header(const std::string& prefix, int rows, int cols) {
    std::string out;
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            if (!out.empty()) out += ',';
            out += prefix + "_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
        }
    }
    return out;
}

std::string matrix_fields(const Matrix& m) {
    std::string out;
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            if (i > 0 || j > 0) out += ',';
            out += format_number(m(i, j));
        }
    }
    return out;
}

nlohmann::json matrix_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << content;
    if (!f) throw std::runtime_error("failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

std::string matrix_series_csv(const std::string& prefix, const std::vector<double>& t,
                              const std::vector<Matrix>& values) {
    std::ostringstream out;
    const int rows = values.empty() ? 0 : static_cast<int>(values[0].rows());
    const int cols = values.empty() ? 0 : static_cast<int>(values[0].cols());
    out << "t," << matrix_header(prefix, rows, cols) << '\n';
    for (std::size_t i = 0; i < values.size(); ++i) {
        out << format_number(t[i]) << ',' << matrix_fields(values[i]) << '\n';
    }
    return out.str();
}

}  // namespace tilq::cli
