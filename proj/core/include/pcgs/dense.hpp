#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace pcgs {

/// Dense symmetric matrix for desk-scale work: Φ for the direct sampler,
/// preconditioned matrices for spectrum diagnostics, oracle solves.
struct DenseSymmetric {
  Eigen::MatrixXd values;

  DenseSymmetric() = default;
  explicit DenseSymmetric(Eigen::MatrixXd m);

  std::size_t dim() const { return static_cast<std::size_t>(values.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
};

/// Largest dimension for which dense p×p work is allowed (default 5000).
std::size_t dense_cap();
void set_dense_cap(std::size_t cap);
/// Throws ResourceError if dim exceeds the cap.
void require_dense(std::size_t dim, const char* what);

/// Lower-triangular L with L Lᵀ = A. Throws NotPositiveDefiniteError.
Eigen::MatrixXd cholesky(const DenseSymmetric& a);

/// Eigenvalues sorted in descending order.
std::vector<double> sym_eigenvalues(const DenseSymmetric& a);

}  // namespace pcgs
