#include "doctest.h"

#include <cmath>
#include <limits>

#include "pcgs/errors.hpp"
#include "pcgs/mcmc_stats.hpp"
#include "pcgs/polya_gamma.hpp"

using namespace pcgs;

namespace {

// Moments of PG(1, z) from its Laplace transform.
double analytic_mean(double z) { return z == 0.0 ? 0.25 : std::tanh(z / 2) / (2 * z); }
double analytic_var(double z) {
  if (std::abs(z) < 1e-3) return 1.0 / 24.0;
  const double c = std::cosh(z / 2);
  return (std::sinh(z) - z) / (4 * z * z * z * c * c);
}

std::vector<double> draws(double z, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (double& v : out) v = pg_draw(z, rng);
  return out;
}

}  // namespace

TEST_CASE("sample means match tanh(z/2)/(2z)") {
  for (double z : {0.0, 2.0, 0.5, 7.0, 25.0}) {
    const auto d = draws(z, 100000, 100 + static_cast<std::uint64_t>(z * 10));
    double m = 0, m2 = 0;
    for (double v : d) {
      CHECK(v > 0.0);
      m += v;
      m2 += v * v;
    }
    m /= static_cast<double>(d.size());
    const double var = m2 / static_cast<double>(d.size()) - m * m;
    const double se = std::sqrt(analytic_var(z) / static_cast<double>(d.size()));
    CHECK(std::abs(m - analytic_mean(z)) <= 4 * se);
    CHECK(std::abs(var - analytic_var(z)) <= 0.05 * analytic_var(z));
  }
  CHECK(analytic_mean(2.0) == doctest::Approx(0.190399).epsilon(1e-5));
}

TEST_CASE("symmetric in z") {
  const auto a = draws(-3.0, 10000, 5);
  const auto b = draws(3.0, 10000, 6);
  CHECK(ks_test_two_sample(a, b).p_value > 0.01);
}

TEST_CASE("closed-form mean helper") {
  CHECK(pg_mean(0.0) == 0.25);
  CHECK(pg_mean(2.0) == doctest::Approx(std::tanh(1.0) / 4.0));
  CHECK(pg_mean(-2.0) == pg_mean(2.0));
  CHECK(pg_mean(1e-8) == doctest::Approx(0.25));
}

TEST_CASE("non-finite argument rejected") {
  Rng rng(1);
  CHECK_THROWS_AS(pg_draw(std::numeric_limits<double>::infinity(), rng), ArgumentError);
  CHECK_THROWS_AS(pg_draw(std::nan(""), rng), ArgumentError);
}

TEST_CASE("extreme arguments stay finite and positive") {
  Rng rng(2);
  for (double z : {1e-12, 80.0, 500.0}) {
    const double v = pg_draw(z, rng);
    CHECK(v > 0.0);
    CHECK(std::isfinite(v));
  }
}
