#pragma once

#include <atomic>
#include <cstddef>
#include <span>
#include <vector>

#include "pcgs/dense.hpp"
#include "pcgs/sparse.hpp"

namespace pcgs {

/// Matrix-free Φ = XᵀΩX + diag(prior_precision).
///
/// Holds a non-owning reference to the design; the design must outlive the
/// operator. apply() costs one matvec and one matvec_t.
class PrecisionOperator {
 public:
  PrecisionOperator(const SparseDesignMatrix& x, std::vector<double> omega,
                    std::vector<double> prior_precision);
  PrecisionOperator(const PrecisionOperator& other);
  PrecisionOperator& operator=(const PrecisionOperator& other);

  std::size_t dim() const { return prior_precision_.size(); }
  void apply(std::span<const double> v, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> v) const;

  std::size_t apply_count() const { return applies_.load(); }
  void reset_apply_count() { applies_ = 0; }

  const SparseDesignMatrix& design() const { return *x_; }
  std::span<const double> omega() const { return omega_; }
  std::span<const double> prior_precision() const { return prior_precision_; }

  /// Per-coordinate weights w for the termination metric p^{-1/2}‖w ⊙ r‖.
  /// Defaults to prior_precision^{-1/2} (τλ for shrunk coefficients), and 1
  /// where the prior precision is zero.
  std::span<const double> residual_scale() const { return residual_scale_; }
  void set_residual_scale(std::vector<double> scale);

  /// Dense Φ via weighted_gram; direct path and oracles only.
  DenseSymmetric dense() const;

 private:
  const SparseDesignMatrix* x_;
  std::vector<double> omega_;
  std::vector<double> prior_precision_;
  std::vector<double> residual_scale_;
  mutable std::atomic<std::size_t> applies_{0};
};

/// [σ⁻² for unshrunk (0 when σ = ∞), τ⁻²λ⁻² for shrunk].
std::vector<double> prior_precision_diagonal(double tau, std::span<const double> lambda,
                                             std::span<const double> unshrunk_prior_sd = {});

/// Gaussian full conditional N(Φ⁻¹ linear_term, Φ⁻¹).
struct GaussianTarget {
  PrecisionOperator precision;
  std::vector<double> linear_term;

  std::size_t dim() const { return precision.dim(); }
};

}  // namespace pcgs
