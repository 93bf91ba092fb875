#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pcgs/bounds.hpp"
#include "pcgs/cg.hpp"
#include "pcgs/dense.hpp"
#include "pcgs/precision.hpp"
#include "pcgs/precond.hpp"

namespace pcgs {

/// Fixed-width histogram on the log₁₀ scale.
struct LogHistogram {
  static constexpr double kBinWidth = 0.1;
  std::vector<double> bin_edges;  // counts.size() + 1 entries
  std::vector<std::size_t> counts;
  /// Entries ≤ 0 cannot be placed on a log axis and are counted here instead.
  std::size_t nonpositive = 0;
};

LogHistogram log10_histogram(std::span<const double> values);

struct SpectrumReport {
  std::vector<double> eigenvalues;  // descending
  LogHistogram histogram;
  /// log₁₀ range dropped from the plotted histogram so the tails are visible.
  std::pair<double, double> trim_range{0.0, 1.0};
  /// Number of eigenvalues with log₁₀ ν inside trim_range.
  std::size_t in_trim_range = 0;
};

/// Default trim: [0, 1] for prior, [−1, 0] for Jacobi, [−0.5, 0.5] otherwise.
std::pair<double, double> default_trim_range(PreconditionerKind kind);

/// Dense M^{-1/2} Φ M^{-1/2} (for the block preconditioner, the congruent
/// form L̃⁻¹DΦDL̃⁻ᵀ with the same spectrum as M⁻¹Φ). Subject to the dense cap.
DenseSymmetric preconditioned_matrix(const PrecisionOperator& phi, const Preconditioner& m);

SpectrumReport preconditioned_spectrum(const PrecisionOperator& phi, const Preconditioner& m,
                                       std::optional<std::pair<double, double>> trim = std::nullopt);

/// Spectra of G with the rows and columns of the k largest-λ indices removed
/// (ties to the lower index), one per requested k.
std::vector<SubmatrixSpectrum> submatrix_spectra(const DenseSymmetric& gram, std::span<const double> lambda,
                                                 std::span<const std::size_t> ks);

/// One grid point of the eigenvalue clustering check with 0-based counts
/// k (largest scales removed) and ℓ:
///   1 ≤ ν_{k+ℓ+1}(Φ̃) ≤ 1 + τ²λ_(k+1)² ν_{ℓ+1}(G_(−k)) ≤ 1 + τ²λ_(k+1)² ν_{ℓ+1}(G),
/// with ν descending and λ_(1) the largest local scale.
struct EigenBoundCheck {
  std::size_t k = 0;
  std::size_t l = 0;
  double eigenvalue = 0.0;
  double submatrix_bound = 0.0;
  double full_bound = 0.0;
  bool pass = false;
};

/// Evaluates the check on every (k, ℓ) with k + ℓ < p. Relative slack
/// applies to each inequality. X must hold the shrunk columns only.
std::vector<EigenBoundCheck> verify_eigen_bounds(const SparseDesignMatrix& x, std::span<const double> omega,
                                                 double tau, std::span<const double> lambda,
                                                 std::span<const std::size_t> ks, std::span<const std::size_t> ls,
                                                 double slack = 1e-8);

/// Per-iteration error metrics of a CG trajectory against a known solution.
struct ErrorTrace {
  /// Mean over j of |(x_k − x*)_j / x*_j|, skipping |x*_j| < 1e-300.
  std::vector<double> rel_coord_error;
  /// ‖x_k − x*‖₂.
  std::vector<double> l2_error;
  /// ‖x_k − x*‖_Φ.
  std::vector<double> phi_norm_error;
  std::vector<double> rms_precond_residual;
  /// Coordinates skipped by rel_coord_error.
  std::size_t guarded = 0;
};

/// Requires a report traced at TraceLevel::kFull.
ErrorTrace error_trace(const CGReport& report, std::span<const double> solution, const PrecisionOperator& phi);

/// Elementwise geometric mean of equally indexed series, truncated to the
/// shortest one.
std::vector<double> geometric_mean(const std::vector<std::vector<double>>& series);

/// First index with value ≤ tol; nullopt if never reached.
std::optional<std::size_t> first_below(std::span<const double> series, double tol);

struct TauLambdaProfile {
  std::vector<double> sorted;    // τλ_j descending
  std::vector<double> relative;  // top entries divided by the maximum
  LogHistogram histogram;
};

TauLambdaProfile tau_lambda_profile(double tau, std::span<const double> lambda, std::size_t top = 250);

}  // namespace pcgs
