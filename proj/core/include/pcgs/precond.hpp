#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pcgs/chain.hpp"
#include "pcgs/precision.hpp"
#include "pcgs/sparse.hpp"

namespace pcgs {

enum class PreconditionerKind { kPrior, kJacobi, kAugmentedPrior, kBlockThreshold, kIdentity };

std::string to_string(PreconditionerKind kind);

/// v -> M⁻¹v for the PCG engine. Immutable once built.
class Preconditioner {
 public:
  static Preconditioner identity(std::size_t dim);
  /// Diagonal preconditioner given M⁻¹ directly. Entries must be positive and finite.
  static Preconditioner diagonal(PreconditionerKind kind, std::vector<double> inv_diagonal);

  PreconditionerKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  bool is_diagonal() const { return kind_ != PreconditionerKind::kBlockThreshold; }

  void apply_inverse(std::span<const double> v, std::span<double> out) const;
  std::vector<double> apply_inverse(std::span<const double> v) const;

  /// Diagonal of M⁻¹ (all ones for identity). For the block preconditioner
  /// this is the outer scaling D in M⁻¹ = D B⁻¹ D.
  std::span<const double> inv_diagonal() const { return inv_diag_; }
  std::span<const std::size_t> block_indices() const { return block_; }
  const Eigen::MatrixXd& block_factor() const { return block_chol_; }

 private:
  friend Preconditioner block_threshold(const PrecisionOperator&, std::span<const double>, std::size_t);

  PreconditionerKind kind_ = PreconditionerKind::kIdentity;
  std::size_t dim_ = 0;
  std::vector<double> inv_diag_;
  std::vector<std::size_t> block_;
  Eigen::MatrixXd block_chol_;
};

/// M = τ⁻²Λ⁻²; apply_inverse multiplies by τ²λ_j².
Preconditioner prior_preconditioner(double tau, std::span<const double> lambda);

/// M = diag(Φ) with Φ_jj = Σ_i ω_i x_ij² + τ⁻²λ_j⁻².
Preconditioner jacobi_preconditioner(const SparseDesignMatrix& x, std::span<const double> omega,
                                     double tau, std::span<const double> lambda);
/// M = diag(Φ) for an arbitrary precision operator (unshrunk block included).
Preconditioner jacobi_preconditioner(const PrecisionOperator& phi);

/// M = diag(γ⁻², τ⁻²Λ⁻²): γ scales the leading unshrunk block.
Preconditioner augmented_prior(double tau, std::span<const double> lambda,
                               std::span<const double> gamma);

/// Thresholded prior-preconditioned matrix used as a second-level
/// preconditioner: I plus the k×k block of DΦD - I on the k largest
/// scale entries (ties to the lower index), where D = diag(scale).
/// M⁻¹ = D B̃⁻¹ D with B̃ identity off the block.
Preconditioner block_threshold(const PrecisionOperator& phi, std::span<const double> scale,
                               std::size_t k);
Preconditioner block_threshold(const SparseDesignMatrix& x, std::span<const double> omega,
                               double tau, std::span<const double> lambda, std::size_t k);

/// Indices of the k largest entries, descending, ties to the lower index.
std::vector<std::size_t> largest_indices(std::span<const double> values, std::size_t k);

struct GammaPolicy {
  double c = 1.0;
  double floor = 1e-3;
  /// Stand-in for an infinite prior sd before two draws exist.
  double flat_prior_cap = 10.0;
};

/// Preconditioner scales for the unshrunk block: c × running posterior sd of
/// each unshrunk coefficient (floored), or the prior sds (capped) before
/// two draws are available.
std::vector<double> gamma_policy(const ChainOutput& chain, const GammaPolicy& policy = {});

/// Preconditioner choice as configured by callers; block_size is used by
/// kBlockThreshold only. kPrior turns into kAugmentedPrior when unshrunk
/// coefficients are present.
struct PreconditionerSpec {
  PreconditionerKind kind = PreconditionerKind::kPrior;
  std::size_t block_size = 0;
};

/// Parses prior | jacobi | augmented | block:<k> | identity.
PreconditionerSpec parse_preconditioner(const std::string& text);
std::string to_string(const PreconditionerSpec& spec);

/// Builds the configured preconditioner for Φ. `gamma` holds the unshrunk
/// scales (length q + 1) and `shrunk_scale` holds τλ.
Preconditioner make_preconditioner(const PreconditionerSpec& spec, const PrecisionOperator& phi,
                                   std::span<const double> gamma, std::span<const double> shrunk_scale);

}  // namespace pcgs
