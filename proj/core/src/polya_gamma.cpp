#include "pcgs/polya_gamma.hpp"

#include <cmath>
#include <numbers>

#include "pcgs/errors.hpp"

namespace pcgs {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTrunc = 0.64;

double log_normal_cdf(double x) {
  if (x > -30.0) return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2));
  // Mills-ratio asymptote once erfc underflows.
  return -0.5 * x * x - std::log(-x) - 0.5 * std::log(2.0 * kPi);
}

// n-th coefficient of the alternating series for the J*(1) density.
double series_coef(int n, double x) {
  const double k = (n + 0.5) * kPi;
  if (x > kTrunc) return k * std::exp(-0.5 * k * k * x);
  if (x <= 0.0) return 0.0;
  const double e = -1.5 * (std::log(0.5 * kPi) + std::log(x)) + std::log(k) - 2.0 * (n + 0.5) * (n + 0.5) / x;
  return std::exp(e);
}

// Probability that the proposal falls in the exponential tail region.
double mass_texpon(double z) {
  const double t = kTrunc;
  const double fz = 0.125 * kPi * kPi + 0.5 * z * z;
  const double b = std::sqrt(1.0 / t) * (t * z - 1.0);
  const double a = -std::sqrt(1.0 / t) * (t * z + 1.0);
  const double x0 = std::log(fz) + fz * t;
  const double xb = x0 - z + log_normal_cdf(b);
  const double xa = x0 + z + log_normal_cdf(a);
  const double qdivp = 4.0 / kPi * (std::exp(xb) + std::exp(xa));
  return 1.0 / (1.0 + qdivp);
}

// Inverse Gaussian with mean 1/z, shape 1, truncated to (0, t).
double truncated_inverse_gaussian(double z, Rng& rng) {
  const double t = kTrunc;
  double x = t + 1.0;
  if (1.0 / t > z) {
    double accept = 0.0;
    while (rng.uniform() > accept) {
      double e1 = rng.exponential();
      double e2 = rng.exponential();
      while (e1 * e1 > 2.0 * e2 / t) {
        e1 = rng.exponential();
        e2 = rng.exponential();
      }
      x = 1.0 + e1 * t;
      x = t / (x * x);
      accept = std::exp(-0.5 * z * z * x);
    }
  } else {
    const double mu = 1.0 / z;
    while (x > t) {
      double y = rng.normal();
      y *= y;
      const double half_mu = 0.5 * mu;
      const double mu_y = mu * y;
      x = mu + half_mu * mu_y - half_mu * std::sqrt(4.0 * mu_y + mu_y * mu_y);
      if (rng.uniform() > mu / (mu + x)) x = mu * mu / x;
    }
  }
  return x;
}

}  // namespace

double pg_draw(double z, Rng& rng) {
  if (!std::isfinite(z)) throw ArgumentError("pg_draw: z must be finite");
  const double h = 0.5 * std::abs(z);
  const double fz = 0.125 * kPi * kPi + 0.5 * h * h;
  const double p_exp = mass_texpon(h);
  while (true) {
    const double x = rng.uniform() < p_exp ? kTrunc + rng.exponential() / fz
                                            : truncated_inverse_gaussian(h, rng);
    double s = series_coef(0, x);
    const double u = rng.uniform() * s;
    for (int n = 1;; ++n) {
      if (n % 2 == 1) {
        s -= series_coef(n, x);
        if (u <= s) return 0.25 * x;
      } else {
        s += series_coef(n, x);
        if (u > s) break;
      }
    }
  }
}

double pg_mean(double z) {
  const double a = std::abs(z);
  if (a < 1e-6) return 0.25 - a * a / 48.0;
  return std::tanh(0.5 * a) / (2.0 * a);
}

}  // namespace pcgs
