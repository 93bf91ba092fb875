#pragma once

#include <span>
#include <vector>

#include "pcgs/cg.hpp"
#include "pcgs/precision.hpp"
#include "pcgs/precond.hpp"
#include "pcgs/rng.hpp"

namespace pcgs {

/// b = linear_term + Xᵀ(ω^{1/2} ⊙ η) + prior_precision^{1/2} ⊙ δ, which has
/// mean linear_term and covariance Φ.
std::vector<double> generate_rhs(const GaussianTarget& target, std::span<const double> eta,
                                 std::span<const double> delta);
/// Draws η ∈ ℝⁿ elementwise first, then δ ∈ ℝᵖ.
std::vector<double> generate_rhs(const GaussianTarget& target, Rng& rng);

struct CGSample {
  std::vector<double> beta;
  CGReport report;
};

/// β ~ N(Φ⁻¹ linear_term, Φ⁻¹) up to CG tolerance: b from generate_rhs,
/// then Φβ = b by PCG.
CGSample cg_sample(const GaussianTarget& target, const Preconditioner& m, std::span<const double> x0,
                   const CGConfig& cfg, Rng& rng);

/// Φ⁻¹b through a dense Cholesky factor. Subject to the dense cap.
std::vector<double> direct_solve(const GaussianTarget& target, std::span<const double> b);

/// μ + L⁻ᵀz with Φ = LLᵀ and z ~ N(0, I_p).
std::vector<double> direct_sample(const GaussianTarget& target, Rng& rng);

}  // namespace pcgs
