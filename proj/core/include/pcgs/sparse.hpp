#pragma once

#include <atomic>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "pcgs/dense.hpp"

namespace pcgs {

/// n×p design matrix in compressed sparse row form.
///
/// Standardization is stored as per-column (mean, scale) metadata and applied
/// algebraically by the kernels, so the stored nonzeros never change:
///   X_std = (X - 1 meanᵀ) diag(scale)⁻¹.
class SparseDesignMatrix {
 public:
  SparseDesignMatrix() = default;

  /// Validates the CSR invariants; throws ArgumentError.
  static SparseDesignMatrix from_csr(std::size_t n_rows, std::size_t n_cols,
                                     std::vector<std::size_t> row_ptr,
                                     std::vector<std::size_t> col_idx,
                                     std::vector<double> values);
  /// Duplicate (row, col) entries are summed. Indices are zero-based.
  static SparseDesignMatrix from_triplets(std::size_t n_rows, std::size_t n_cols,
                                          std::span<const std::size_t> rows,
                                          std::span<const std::size_t> cols,
                                          std::span<const double> values);
  /// Entries with |x| <= drop_tol are not stored.
  static SparseDesignMatrix from_dense(const Eigen::MatrixXd& dense, double drop_tol = 0.0);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return n_cols_; }
  std::size_t nnz() const { return values_.size(); }
  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::size_t> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

  bool standardized() const { return !col_means_.empty(); }
  std::span<const double> col_means() const { return col_means_; }
  std::span<const double> col_scales() const { return col_scales_; }
  /// Columns whose sample variance was zero when standardized (scale forced to 1).
  const std::vector<bool>& constant_columns() const { return constant_columns_; }

  /// Dense copy with standardization applied.
  Eigen::MatrixXd to_dense() const;

  /// New matrix with column j prepended as all ones (intercept).
  SparseDesignMatrix with_intercept() const;

  friend SparseDesignMatrix standardize(const SparseDesignMatrix& x,
                                        const std::vector<bool>& exclude);

 private:
  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
  std::vector<double> col_means_;
  std::vector<double> col_scales_;
  std::vector<bool> constant_columns_;
};

/// Returns a copy carrying centering/scaling metadata so that every column
/// (except those with exclude[j] set) has mean 0 and sample sd 1. An empty
/// mask excludes nothing.
SparseDesignMatrix standardize(const SparseDesignMatrix& x, const std::vector<bool>& exclude = {});

/// out = X v. Summation within a row runs left to right.
void matvec(const SparseDesignMatrix& x, std::span<const double> v, std::span<double> out);
std::vector<double> matvec(const SparseDesignMatrix& x, std::span<const double> v);

/// out = Xᵀ w. Rows are scattered; with several threads, per-chunk buffers
/// are merged in chunk order.
void matvec_t(const SparseDesignMatrix& x, std::span<const double> w, std::span<double> out);
std::vector<double> matvec_t(const SparseDesignMatrix& x, std::span<const double> w);

/// XᵀΩX as a dense matrix. Only for the direct path; throws ResourceError
/// when p exceeds dense_cap().
DenseSymmetric weighted_gram(const SparseDesignMatrix& x, std::span<const double> omega);

/// diag(XᵀΩX) in one pass over the nonzeros.
std::vector<double> gram_diagonal(const SparseDesignMatrix& x, std::span<const double> omega);

/// Dense n×k matrix of the selected (standardized) columns.
Eigen::MatrixXd dense_columns(const SparseDesignMatrix& x, std::span<const std::size_t> cols);

/// Call counters for the matrix-free contract tests.
struct KernelCounters {
  std::atomic<std::size_t> matvec{0};
  std::atomic<std::size_t> matvec_t{0};
  std::atomic<std::size_t> weighted_gram{0};
  void reset() {
    matvec = 0;
    matvec_t = 0;
    weighted_gram = 0;
  }
};
KernelCounters& kernel_counters();

}  // namespace pcgs
