#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pcgs/sparse.hpp"

namespace pcgs::io {

/// Reads a Matrix Market coordinate file (real, integer or pattern;
/// general or symmetric). Indices in the file are 1-based.
SparseDesignMatrix read_matrix_market(const std::filesystem::path& path);
void write_matrix_market(const std::filesystem::path& path, const SparseDesignMatrix& x);

/// Dense numeric CSV, one row per observation. When has_header is set the
/// first line is skipped.
SparseDesignMatrix read_dense_csv(const std::filesystem::path& path, bool has_header);
void write_dense_csv(const std::filesystem::path& path, const Eigen::MatrixXd& x);

/// Single-column CSV. A non-numeric first line is treated as a header.
std::vector<double> read_vector_csv(const std::filesystem::path& path);
void write_vector_csv(const std::filesystem::path& path, const std::vector<double>& v,
                      const std::string& header = "");

/// Dispatches on extension: ".mtx" is Matrix Market, anything else dense CSV.
SparseDesignMatrix read_design(const std::filesystem::path& path, bool csv_header);

}  // namespace pcgs::io
