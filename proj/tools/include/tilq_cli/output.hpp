#pragma once

#include <tilq/types.hpp>

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace tilq::cli {

/// Shortest-independent decimal form with 17 significant digits.
std::string format_number(double x);

/// "P_1_1,P_1_2,..." in row-major order.
std::string matrix_header(const std::string& prefix, int rows, int cols);
/// Row-major entries joined by commas.
std::string matrix_fields(const Matrix& m);
nlohmann::json matrix_json(const Matrix& m);

void write_text(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Columns: t followed by the entries of every matrix.
std::string matrix_series_csv(const std::string& prefix, const std::vector<double>& t,
                              const std::vector<Matrix>& values);

}  // namespace tilq::cli
