#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "pcgs/rng.hpp"
#include "pcgs/sparse.hpp"

namespace pcgs {

/// Factor-model simulation: x_i = Σ_ℓ f_iℓ u_ℓ + ε_i with orthonormal u_ℓ,
/// f_iℓ ~ N(0, max(m + 1 − ℓ, 1)²), ε_i ~ N(0, I_p); β_true,j = signal for j ≤ K.
struct SimSpec {
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t n_factors = 99;
  std::size_t n_signals = 10;
  std::uint64_t seed = 0;
  double signal_value = 1.0;

  void validate() const;
};

/// p×m matrix with orthonormal columns, uniform on the Stiefel manifold
/// (QR of a Gaussian matrix with the sign of diag(R) folded into Q).
Eigen::MatrixXd stiefel_sample(std::size_t p, std::size_t m, Rng& rng);

/// Dense n×p design with columns centred and scaled to sample sd 1.
/// Draw order: U, then the factor scores F, then the noise E.
Eigen::MatrixXd simulate_design(const SimSpec& spec, Rng& rng);
/// simulate_design with rng = Rng::substream(spec.seed, {design tag}).
Eigen::MatrixXd simulate_design(const SimSpec& spec);

std::vector<double> true_coefficients(const SimSpec& spec);

/// y_i ~ Bernoulli(logit⁻¹(x_iᵀβ_true)).
std::vector<double> simulate_outcomes(const SparseDesignMatrix& x, const SimSpec& spec, Rng& rng);
/// simulate_outcomes with rng = Rng::substream(spec.seed, {outcome tag}).
std::vector<double> simulate_outcomes(const SparseDesignMatrix& x, const SimSpec& spec);

/// Sample sd of the off-diagonal pairwise column correlations.
double pairwise_correlation_sd(const Eigen::MatrixXd& x);

}  // namespace pcgs
