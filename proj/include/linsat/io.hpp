#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace linsat {

// Header-free, row-major CSV.
Eigen::MatrixXd read_csv_matrix(const std::string& path);
void write_csv_matrix(const std::string& path, const Eigen::MatrixXd& m);

// Atomic text write (temp file + rename).
void write_text_atomic(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

// FNV-1a digest of a file's bytes, for run manifests.
uint64_t file_digest(const std::string& path);

}  // namespace linsat
