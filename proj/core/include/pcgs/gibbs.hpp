#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pcgs/cg.hpp"
#include "pcgs/chain.hpp"
#include "pcgs/precond.hpp"
#include "pcgs/rng.hpp"
#include "pcgs/sparse.hpp"

namespace pcgs {

/// Bridge prior π(β_j | τ) ∝ τ⁻¹ exp(−|β_j/τ|^α) with φ = τ^{−α} ~ Gamma(a₀, b₀).
struct BridgeConfig {
  double alpha = 1.0;
  double global_shape = 1.0;
  /// Zero gives the improper scale-invariant prior; allowed while Σ|β|^α > 0.
  double global_rate = 1.0;
  /// Prior sds of the leading unshrunk coefficients; infinity means flat.
  std::vector<double> unshrunk_prior_sd;

  void validate() const;
};

/// β holds the unshrunk block (length q + 1) followed by the p shrunk
/// coefficients; λ has length p.
struct ShrinkageState {
  std::vector<double> beta;
  std::vector<double> omega;
  std::vector<double> lambda;
  double tau = 1.0;

  std::size_t n_unshrunk() const { return beta.size() - lambda.size(); }
  std::span<const double> shrunk_beta() const {
    return std::span<const double>(beta).subspan(n_unshrunk());
  }
  void validate(std::size_t n, std::size_t p_total) const;
};

/// β = 0, ω = 1/4 (the PG(1, 0) mean), λ = 1, τ = 1.
ShrinkageState initial_state(std::size_t n, std::size_t n_unshrunk, std::size_t p_shrunk);

/// Per-scan stream keys: draws for index i in iteration t under purpose tag
/// g come from Rng::substream(seed, {t, g, i}) so parallel and serial scans
/// agree bit for bit.
struct ScanStreams {
  std::uint64_t seed = 0;
  std::uint64_t iteration = 0;

  Rng stream(StreamTag purpose, std::uint64_t index = 0) const {
    return Rng::substream(seed, {iteration, tag(purpose), index});
  }
};

struct OmegaUpdate {
  std::vector<double> omega;
  /// y′ = (y − 1/2) / ω.
  std::vector<double> pseudo_outcome;
};

/// ω_i ~ PG(1, x_iᵀβ), independently per observation.
OmegaUpdate update_omega(const ShrinkageState& state, const SparseDesignMatrix& x,
                         std::span<const double> y, const ScanStreams& streams);

/// Collapsed draw of τ given the shrunk coefficients with λ integrated out:
/// φ = τ^{−α} ~ Gamma(a₀ + p/α, b₀ + Σ|β_j|^α), τ = φ^{−1/α}.
double update_global_scale(std::span<const double> beta_shrunk, const BridgeConfig& cfg, Rng& rng);

/// Replaceable λ | β, τ update. Implementations must draw index j from
/// streams.stream(StreamTag::kLocalScale, j) to stay reproducible.
using LocalScaleUpdate = std::function<std::vector<double>(
    std::span<const double> beta_shrunk, double tau, const BridgeConfig& cfg, const ScanStreams& streams)>;

/// α = 1 update: 1/λ_j² ~ InverseGaussian(τ/|β_j|, 1); β_j = 0 uses the
/// limiting law λ_j² ~ Gamma(1/2, rate 1/2). Throws UnsupportedUpdateError
/// for α ≠ 1.
std::vector<double> update_local_scales(std::span<const double> beta_shrunk, double tau,
                                        const BridgeConfig& cfg, const ScanStreams& streams);

/// Density of λ_j² under the α = 1 prior: Exp(rate 1/2).
double lasso_mixing_density(double lambda_sq);
/// Bridge prior density (2τ Γ(1 + 1/α))⁻¹ exp(−|β/τ|^α).
double bridge_prior_density(double beta, double tau, double alpha);

/// log π(β, τ | y, X) up to an additive constant, λ integrated out.
double log_density(const SparseDesignMatrix& x, std::span<const double> y, std::span<const double> beta,
                   double tau, const BridgeConfig& cfg);

enum class BetaSampler { kCg, kDirect };

struct GibbsConfig {
  BridgeConfig bridge;
  std::size_t n_iter = 0;
  std::size_t burn_in = 0;
  std::size_t thin = 1;
  BetaSampler sampler = BetaSampler::kCg;
  std::uint64_t seed = 0;

  CGConfig cg;
  PreconditionerSpec preconditioner;
  GammaPolicy gamma;
  /// Start CG at the rescaled running mean instead of zero.
  bool warm_start = true;

  LocalScaleUpdate local_scale_update;  // empty selects update_local_scales

  /// Conjugate-check hooks: hold ω fixed at these values, and/or hold τ, λ
  /// at their initial values.
  std::optional<std::vector<double>> fixed_omega;
  bool freeze_scales = false;

  /// Called after every scan with (iteration, state); may be empty.
  std::function<void(std::size_t, const ShrinkageState&)> on_iteration;

  void validate() const;
};

/// Xᵀ(y − 1/2), the linear term of every β conditional.
std::vector<double> outcome_linear_term(const SparseDesignMatrix& x, std::span<const double> y);

/// β | ω, τ, λ, y at a fixed state. The CG termination scale is [γ, τλ].
struct BetaConditional {
  GaussianTarget target;
  std::vector<double> shrunk_scale;  // τλ
};

/// Throws NumericBreakdownError (iteration 0) if some τλ is not positive and finite.
BetaConditional beta_conditional(const SparseDesignMatrix& x, std::span<const double> linear_term,
                                 const ShrinkageState& state, std::span<const double> unshrunk_prior_sd,
                                 std::span<const double> gamma);

/// Runs n_iter scans of (ω, τ, λ, β), updating `state` in place. Draws at
/// iterations burn_in, burn_in + thin, … are stored. A failed scan throws
/// GibbsError carrying the iteration index.
ChainOutput gibbs_run(const SparseDesignMatrix& x, std::span<const double> y, const GibbsConfig& cfg,
                      ShrinkageState& state);

}  // namespace pcgs
