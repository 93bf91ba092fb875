#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pcgs {

/// Φ-norm error-ratio bound after k CG iterations on a system with
/// condition number κ: 2((√κ−1)/(√κ+1))^k. Equals 2 at k = 0 for every κ,
/// since no iteration has been taken.
double cg_condition_bound(double kappa, std::size_t k);

/// Per-iteration contraction factor (√κ−1)/(√κ+1).
double cg_contraction(double kappa);

/// Descending spectrum of (XᵀΩX) with the rows and columns of the k
/// largest-λ indices removed.
struct SubmatrixSpectrum {
  std::size_t k = 0;
  std::vector<double> eigenvalues;
};

/// Effective condition number governing prior-preconditioned CG after m
/// iterations: 1 + min over k + ℓ = m of τ²λ_(k+1)² ν_{ℓ+1}(sub_k), over the
/// k available in `spectra`. Eigenvalue or λ indices past the end count as 0.
/// Throws ArgumentError if m > p or no supplied k satisfies k ≤ m.
double clustered_condition(double tau, std::span<const double> lambda,
                           std::span<const SubmatrixSpectrum> spectra, std::size_t m);

/// Bound on ‖e_{m+m'}‖_Φ / ‖e_0‖_Φ given κ̃_m.
double clustered_error_bound(double kappa_m, std::size_t m_extra);

/// Residual-polynomial bound for k iterations on a discrete spectrum using
/// the shifted and scaled Chebyshev polynomial on [ν_min, ν_max]:
/// max_j |T_k((ν_max+ν_min−2ν_j)/(ν_max−ν_min))| / T_k((ν_max+ν_min)/(ν_max−ν_min)).
/// Evaluated in log space so large k does not overflow.
double chebyshev_discrete_bound(std::span<const double> spectrum, std::size_t k);

/// Bound after r + k iterations when the r largest eigenvalues are treated
/// as outliers: 2((√(ν_{r+1}/ν_p)−1)/(√(ν_{r+1}/ν_p)+1))^k, spectrum descending.
double large_eigenvalue_removal_bound(std::span<const double> spectrum_desc, std::size_t r, std::size_t k);

}  // namespace pcgs
