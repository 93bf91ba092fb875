#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace pcgs {

double normal_cdf(double x);

/// Effective sample size from Geyer's initial positive sequence of summed
/// autocovariance pairs. Returns 0 for a constant series.
double effective_sample_size(std::span<const double> series);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Kolmogorov tail probability Q(λ) = 2 Σ (−1)^{k−1} exp(−2k²λ²).
double kolmogorov_q(double lambda);

/// One-sample KS test against a continuous CDF.
KsResult ks_test(std::span<const double> sample, const std::function<double(double)>& cdf);
/// Two-sample KS test.
KsResult ks_test_two_sample(std::span<const double> a, std::span<const double> b);

struct StandardizedDifferences {
  /// (m_A − m_B) / sqrt(v_A/ESS_A + v_B/ESS_B) per coefficient; 0 when the
  /// chains agree exactly.
  std::vector<double> z;
  std::vector<double> ess_a;
  std::vector<double> ess_b;
  /// True where either ESS is below the minimum; such entries are left out
  /// of the omnibus test.
  std::vector<bool> flagged;

  std::vector<double> unflagged() const;
};

/// Compares per-coefficient posterior means of two chains of equal width.
/// Rows are draws. Throws ArgumentError below min_draws draws per chain.
StandardizedDifferences standardized_difference_test(const std::vector<std::vector<double>>& chain_a,
                                                     const std::vector<std::vector<double>>& chain_b,
                                                     double min_ess = 10.0, std::size_t min_draws = 500);

}  // namespace pcgs
