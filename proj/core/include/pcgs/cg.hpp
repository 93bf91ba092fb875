#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "pcgs/chain.hpp"
#include "pcgs/precision.hpp"
#include "pcgs/precond.hpp"

namespace pcgs {

enum class TraceLevel { kNone, kNorms, kFull };
enum class Termination { kConverged, kMaxIter };

struct CGConfig {
  /// 0 means 2p.
  std::size_t max_iter = 0;
  /// Threshold on p^{-1/2}‖w ⊙ r_k‖₂ with w = phi.residual_scale().
  /// Zero disables the test so CG runs to max_iter or an exact zero residual.
  double rtol = 1e-6;
  TraceLevel trace_level = TraceLevel::kNorms;
};

struct CGReport {
  std::size_t iterations = 0;
  Termination termination = Termination::kMaxIter;
  /// Entry k is the scaled RMS residual of iterate k, starting at x0.
  std::vector<double> rms_precond_residual_trace;
  std::vector<double> solution;
  std::size_t matvec_count = 0;
  /// CG step lengths α_k and direction coefficients β_k, one per iteration.
  std::vector<double> alphas;
  std::vector<double> betas;
  /// Iterates x_0 … x_k (TraceLevel::kFull only).
  std::vector<std::vector<double>> iterates;

  bool converged() const { return termination == Termination::kConverged; }
};

/// Scaled RMS residual p^{-1/2}‖w ⊙ r‖₂.
double scaled_rms(std::span<const double> r, std::span<const double> w);

/// Classical preconditioned CG for Φx = b. Performs exactly one Φ-apply for
/// the initial residual and one per iteration; Φ is never formed.
CGReport pcg_solve(const PrecisionOperator& phi, std::span<const double> b, const Preconditioner& m,
                   std::span<const double> x0, const CGConfig& cfg = {});

/// Warm start τλ ⊙ (running mean of β / τλ); unshrunk entries use the plain
/// running mean. Zero vector when the chain has no recorded updates.
std::vector<double> initial_vector(const ChainOutput& chain, double tau, std::span<const double> lambda);

/// Lanczos tridiagonal of the preconditioned operator implied by the CG
/// coefficients (k×k for k iterations).
Eigen::MatrixXd lanczos_tridiagonal(const CGReport& report);
/// Eigenvalues of the Lanczos tridiagonal, descending.
std::vector<double> ritz_values(const CGReport& report);

}  // namespace pcgs
