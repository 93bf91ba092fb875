#include "pcgs/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "pcgs/errors.hpp"

namespace pcgs {

double cg_contraction(double kappa) {
  if (!(kappa >= 1.0) || std::isnan(kappa)) throw ArgumentError("condition number must be >= 1");
  if (std::isinf(kappa)) return 1.0;
  const double s = std::sqrt(kappa);
  return (s - 1.0) / (s + 1.0);
}

double cg_condition_bound(double kappa, std::size_t k) {
  const double c = cg_contraction(kappa);
  if (k == 0) return 2.0;
  if (c == 0.0) return 0.0;
  return 2.0 * std::exp(static_cast<double>(k) * std::log(c));
}

double clustered_condition(double tau, std::span<const double> lambda,
                           std::span<const SubmatrixSpectrum> spectra, std::size_t m) {
  const std::size_t p = lambda.size();
  if (m > p) throw ArgumentError("clustered_condition: m exceeds p");
  if (!(tau > 0.0)) throw ArgumentError("clustered_condition: tau must be positive");
  std::vector<double> sorted(lambda.begin(), lambda.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());

  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : spectra) {
    if (s.k > m) continue;
    const std::size_t l = m - s.k;
    const double lam = s.k < p ? sorted[s.k] : 0.0;
    const double nu = l < s.eigenvalues.size() ? std::max(s.eigenvalues[l], 0.0) : 0.0;
    best = std::min(best, tau * tau * lam * lam * nu);
  }
  if (std::isinf(best)) throw ArgumentError("clustered_condition: no submatrix spectrum with k <= m");
  return 1.0 + best;
}

double clustered_error_bound(double kappa_m, std::size_t m_extra) {
  return cg_condition_bound(kappa_m, m_extra);
}

double chebyshev_discrete_bound(std::span<const double> spectrum, std::size_t k) {
  if (spectrum.empty()) throw ArgumentError("chebyshev_discrete_bound: empty spectrum");
  const auto [lo_it, hi_it] = std::minmax_element(spectrum.begin(), spectrum.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(lo > 0.0)) throw ArgumentError("chebyshev_discrete_bound: spectrum must be positive");
  if (k == 0) return 1.0;
  if (hi == lo) return 0.0;
  const double kd = static_cast<double>(k);
  // log T_k(y) for y ≥ 1 via cosh(k acosh y).
  auto log_cosh_k = [&](double y) {
    const double t = kd * std::acosh(y);
    return t + std::log1p(std::exp(-2.0 * t)) - std::log(2.0);
  };
  const double log_denom = log_cosh_k((hi + lo) / (hi - lo));
  double worst = 0.0;
  for (double nu : spectrum) {
    const double x = (hi + lo - 2.0 * nu) / (hi - lo);
    double v;
    if (std::abs(x) <= 1.0) {
      v = std::abs(std::cos(kd * std::acos(std::clamp(x, -1.0, 1.0)))) * std::exp(-log_denom);
    } else {
      v = std::exp(log_cosh_k(std::abs(x)) - log_denom);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

double large_eigenvalue_removal_bound(std::span<const double> spectrum_desc, std::size_t r, std::size_t k) {
  if (r >= spectrum_desc.size()) throw ArgumentError("large_eigenvalue_removal_bound: r out of range");
  const double smallest = spectrum_desc.back();
  if (!(smallest > 0.0)) throw ArgumentError("large_eigenvalue_removal_bound: spectrum must be positive");
  return cg_condition_bound(std::max(spectrum_desc[r] / smallest, 1.0), k);
}

}  // namespace pcgs
