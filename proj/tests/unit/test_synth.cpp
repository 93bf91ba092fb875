#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pcgs/errors.hpp"
#include "pcgs/synth.hpp"

using namespace pcgs;

TEST_CASE("Stiefel sample has orthonormal columns") {
  Rng rng(1);
  const auto u = stiefel_sample(60, 20, rng);
  CHECK(u.rows() == 60);
  CHECK(u.cols() == 20);
  CHECK((u.transpose() * u - Eigen::MatrixXd::Identity(20, 20)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(stiefel_sample(5, 0, rng).cols() == 0);
  CHECK_THROWS_AS(stiefel_sample(3, 4, rng), ArgumentError);
}

TEST_CASE("design columns are standardized") {
  for (std::size_t m : {std::size_t{0}, std::size_t{5}}) {
    const SimSpec spec{.n = 120, .p = 30, .n_factors = m, .n_signals = 3, .seed = 9};
    const auto x = simulate_design(spec);
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double mean = x.col(j).mean();
      const double var = (x.col(j).array() - mean).square().sum() / static_cast<double>(x.rows() - 1);
      CHECK(std::abs(mean) < 1e-10);
      CHECK(std::abs(var - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("simulation is reproducible from the seed") {
  const SimSpec spec{.n = 50, .p = 12, .n_factors = 3, .n_signals = 2, .seed = 77};
  const auto a = simulate_design(spec);
  const auto b = simulate_design(spec);
  CHECK(a == b);
  const auto xs = SparseDesignMatrix::from_dense(a);
  CHECK(simulate_outcomes(xs, spec) == simulate_outcomes(xs, spec));
  SimSpec other = spec;
  other.seed = 78;
  CHECK(simulate_design(other) != a);
}

TEST_CASE("true coefficients") {
  const auto beta = true_coefficients({.n = 10, .p = 6, .n_factors = 0, .n_signals = 2, .signal_value = 1.5});
  CHECK(beta == std::vector<double>{1.5, 1.5, 0, 0, 0, 0});
}

TEST_CASE("outcomes follow the logistic link") {
  SUBCASE("no signals gives fair coins") {
    const SimSpec spec{.n = 4000, .p = 5, .n_factors = 0, .n_signals = 0, .seed = 3};
    const auto y = simulate_outcomes(SparseDesignMatrix::from_dense(simulate_design(spec)), spec);
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / 4000.0;
    CHECK(std::abs(mean - 0.5) < 4 * 0.5 / std::sqrt(4000.0));
  }
  SUBCASE("huge positive linear predictor gives all ones") {
    const std::size_t n = 50;
    Eigen::MatrixXd x = Eigen::MatrixXd::Ones(n, 1);
    const SimSpec spec{.n = n, .p = 1, .n_factors = 0, .n_signals = 1, .seed = 4, .signal_value = 100};
    const auto y = simulate_outcomes(SparseDesignMatrix::from_dense(x), spec);
    CHECK(std::all_of(y.begin(), y.end(), [](double v) { return v == 1.0; }));
  }
  SUBCASE("success rate increases across deciles of the linear predictor") {
    const SimSpec spec{.n = 5000, .p = 10, .n_factors = 2, .n_signals = 3, .seed = 5, .signal_value = 1.0};
    const auto xd = simulate_design(spec);
    const auto y = simulate_outcomes(SparseDesignMatrix::from_dense(xd), spec);
    const Eigen::VectorXd eta = xd * Eigen::Map<const Eigen::VectorXd>(true_coefficients(spec).data(), 10);
    std::vector<std::size_t> order(spec.n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return eta(static_cast<Eigen::Index>(a)) < eta(static_cast<Eigen::Index>(b)); });
    std::vector<double> rate(10, 0.0);
    for (std::size_t i = 0; i < spec.n; ++i) rate[i * 10 / spec.n] += y[order[i]] / 500.0;
    CHECK(rate.front() < 0.25);
    CHECK(rate.back() > 0.75);
    for (std::size_t d = 2; d < 10; ++d) CHECK(rate[d] > rate[d - 2]);
  }
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS((SimSpec{.n = 1, .p = 5}.validate()), ArgumentError);
  CHECK_THROWS_AS((SimSpec{.n = 10, .p = 5, .n_factors = 6}.validate()), ArgumentError);
  CHECK_THROWS_AS((SimSpec{.n = 10, .p = 5, .n_factors = 0, .n_signals = 6}.validate()), ArgumentError);
}

TEST_CASE("pairwise correlation sd") {
  Eigen::MatrixXd x(4, 3);
  x << 1, 2, 3, 2, 4, 6, 3, 6, 9, 4, 8, 12;
  CHECK(pairwise_correlation_sd(x) == 0.0);
  Eigen::MatrixXd z(4, 3);
  z << 1, 1, -1, 2, 2, -2, 3, 3, -3, 4, 4, -4;
  // Correlations are {1, -1, -1}; sample sd is 2/sqrt(3).
  CHECK(pairwise_correlation_sd(z) == doctest::Approx(2.0 / std::sqrt(3.0)));
}
