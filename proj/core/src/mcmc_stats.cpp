#include "pcgs/mcmc_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pcgs/errors.hpp"

namespace pcgs {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double effective_sample_size(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 2) return static_cast<double>(n);
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> c(series.size());
  for (std::size_t i = 0; i < n; ++i) c[i] = series[i] - mean;
  auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += c[i] * c[i + lag];
    return s / static_cast<double>(n);
  };
  const double gamma0 = autocov(0);
  if (gamma0 <= 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
    const double pair = (m == 0 ? gamma0 : autocov(2 * m)) + autocov(2 * m + 1);
    if (pair <= 0.0) break;
    sum += pair;
  }
  const double asym_var = std::max(-gamma0 + 2.0 * sum, gamma0 * 1e-12);
  return static_cast<double>(n) * gamma0 / asym_var;
}

double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0, sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) <= 1e-12 * std::abs(sum)) return std::clamp(2.0 * sum, 0.0, 1.0);
    sign = -sign;
  }
  // Series failed to settle; only happens for tiny λ where Q is 1.
  return 1.0;
}

namespace {

double corrected_p(double d, double ne) {
  const double sn = std::sqrt(ne);
  return kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
}

}  // namespace

KsResult ks_test(std::span<const double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw ArgumentError("ks_test: empty sample");
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, corrected_p(d, n)};
}

KsResult ks_test_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ArgumentError("ks_test_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, corrected_p(d, na * nb / (na + nb))};
}

std::vector<double> StandardizedDifferences::unflagged() const {
  std::vector<double> out;
  for (std::size_t j = 0; j < z.size(); ++j)
    if (!flagged[j]) out.push_back(z[j]);
  return out;
}

StandardizedDifferences standardized_difference_test(const std::vector<std::vector<double>>& chain_a,
                                                     const std::vector<std::vector<double>>& chain_b,
                                                     double min_ess, std::size_t min_draws) {
  if (chain_a.size() < min_draws || chain_b.size() < min_draws)
    throw ArgumentError("standardized_difference_test: need at least " + std::to_string(min_draws) +
                        " draws per chain");
  if (chain_a.empty() || chain_b.empty()) throw ArgumentError("standardized_difference_test: empty chain");
  const std::size_t p = chain_a.front().size();
  for (const auto& row : chain_a)
    if (row.size() != p) throw ArgumentError("standardized_difference_test: ragged chain");
  for (const auto& row : chain_b)
    if (row.size() != p) throw ArgumentError("standardized_difference_test: chains differ in width");

  StandardizedDifferences out;
  out.z.resize(p);
  out.ess_a.resize(p);
  out.ess_b.resize(p);
  out.flagged.assign(p, false);
  auto column = [](const std::vector<std::vector<double>>& chain, std::size_t j) {
    std::vector<double> c(chain.size());
    for (std::size_t i = 0; i < chain.size(); ++i) c[i] = chain[i][j];
    return c;
  };
  auto moments = [](const std::vector<double>& c) {
    double m = 0.0;
    for (double v : c) m += v;
    m /= static_cast<double>(c.size());
    double s = 0.0;
    for (double v : c) s += (v - m) * (v - m);
    return std::pair{m, c.size() > 1 ? s / static_cast<double>(c.size() - 1) : 0.0};
  };
  for (std::size_t j = 0; j < p; ++j) {
    const auto ca = column(chain_a, j), cb = column(chain_b, j);
    const auto [ma, va] = moments(ca);
    const auto [mb, vb] = moments(cb);
    out.ess_a[j] = effective_sample_size(ca);
    out.ess_b[j] = effective_sample_size(cb);
    out.flagged[j] = out.ess_a[j] < min_ess || out.ess_b[j] < min_ess;
    const double diff = ma - mb;
    if (diff == 0.0) {
      out.z[j] = 0.0;
      continue;
    }
    const double se2 = (out.ess_a[j] > 0 ? va / out.ess_a[j] : 0.0) + (out.ess_b[j] > 0 ? vb / out.ess_b[j] : 0.0);
    out.z[j] = se2 > 0.0 ? diff / std::sqrt(se2) : std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  return out;
}

}  // namespace pcgs
