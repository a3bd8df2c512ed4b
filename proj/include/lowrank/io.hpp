#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace lowrank {

// Shortest-exact decimal form of a double ("%.17g" re-parsed down); the same
// value always prints the same bytes, which the determinism checks rely on.
std::string format_double(double value);

// Row-major, header-free CSV matrix (the factor-matrix exchange format).
Eigen::MatrixXd load_matrix_csv(const std::string& path);
void save_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// ISO-8601 UTC timestamp; excluded from all determinism comparisons.
std::string iso8601_now();

} // namespace lowrank
