#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pcgs {

/// Welford running mean / variance over fixed-length vectors.
struct RunningMoments {
  std::size_t count = 0;
  std::vector<double> mean;
  std::vector<double> m2;

  void push(std::span<const double> x);
  /// Sample variance (n - 1 denominator); zeros when count < 2.
  std::vector<double> variance() const;
};

/// Stored MCMC output plus the running statistics consumed by the CG
/// initial-vector and unshrunk-preconditioner policies.
struct ChainOutput {
  std::uint64_t seed = 0;
  /// Number of leading unshrunk coefficients (q + 1).
  std::size_t n_unshrunk = 0;
  std::vector<double> unshrunk_prior_sd;

  /// Post burn-in, thinned draws of β (length q + 1 + p each).
  std::vector<std::vector<double>> draws;
  std::vector<double> tau_draws;
  /// Log density at each stored draw.
  std::vector<double> draw_logdensity;

  /// One entry per Gibbs iteration, burn-in included.
  std::vector<double> logdensity_trace;
  std::vector<std::size_t> cg_iterations;

  /// Running mean of β / (τλ) over every β update (unshrunk entries unscaled).
  RunningMoments scaled_beta;
  /// Running moments of the unshrunk block over every β update.
  RunningMoments unshrunk;

  std::size_t iterations_run = 0;

  /// Records one β update made under the given conditional prior scales
  /// (τλ for shrunk entries; scale entries for unshrunk are ignored).
  void record_update(std::span<const double> beta, std::span<const double> shrunk_scale);
};

}  // namespace pcgs
