#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "pcgs/diagnostics.hpp"
#include "pcgs/errors.hpp"
#include "pcgs/precond.hpp"

using namespace pcgs;

namespace {

struct Instance {
  oracle::Design d;
  std::vector<double> omega, lambda;
  double tau;
};

Instance make_instance(Rng& rng, std::size_t n = 30, std::size_t p = 12) {
  Instance in{oracle::random_design(n, p, 0.5, rng), oracle::positive_vector(n, rng),
              oracle::positive_vector(p, rng, 0.05, 3.0), 0.3 + rng.uniform()};
  return in;
}

}  // namespace

TEST_CASE("prior preconditioner") {
  SUBCASE("unit scales give the identity") {
    const auto m = prior_preconditioner(1.0, std::vector<double>{1, 1, 1});
    CHECK(m.apply_inverse(std::vector<double>{1, 2, 3}) == std::vector<double>{1, 2, 3});
  }
  SUBCASE("elementwise arithmetic") {
    const auto m = prior_preconditioner(2.0, std::vector<double>{1, 3});
    CHECK(m.apply_inverse(std::vector<double>{1, 1}) == std::vector<double>{4, 36});
    CHECK(m.kind() == PreconditionerKind::kPrior);
  }
  SUBCASE("invalid scales") {
    CHECK_THROWS_AS(prior_preconditioner(0.0, std::vector<double>{1}), ArgumentError);
    CHECK_THROWS_AS(prior_preconditioner(1.0, std::vector<double>{-1}), ArgumentError);
  }
  SUBCASE("preconditioned matrix equals tau^2 L X'WX L + I") {
    Rng rng(9);
    const auto in = make_instance(rng);
    PrecisionOperator phi(in.d.sparse, in.omega, prior_precision_diagonal(in.tau, in.lambda));
    const auto pm = preconditioned_matrix(phi, prior_preconditioner(in.tau, in.lambda));
    const Eigen::VectorXd s = in.tau * oracle::vec(in.lambda);
    Eigen::MatrixXd ref = s.asDiagonal() * (in.d.dense.transpose() * oracle::vec(in.omega).asDiagonal() * in.d.dense) *
                          s.asDiagonal();
    ref.diagonal().array() += 1.0;
    CHECK((pm.values - ref).norm() <= 1e-12 * ref.norm());
    CHECK(sym_eigenvalues(pm).back() >= 1.0 - 1e-8);
  }
}

TEST_CASE("Jacobi preconditioner") {
  SUBCASE("zero design equals the prior preconditioner") {
    const auto x = SparseDesignMatrix::from_csr(3, 2, {0, 0, 0, 0}, {}, {});
    const std::vector<double> lambda{0.5, 2.0};
    const auto j = jacobi_preconditioner(x, std::vector<double>(3, 1.0), 1.5, lambda);
    const auto p = prior_preconditioner(1.5, lambda);
    for (std::size_t i = 0; i < 2; ++i) CHECK(j.inv_diagonal()[i] == doctest::Approx(p.inv_diagonal()[i]).epsilon(1e-15));
  }
  SUBCASE("identity pattern") {
    const auto x = SparseDesignMatrix::from_csr(2, 2, {0, 1, 2}, {0, 1}, {1, 1});
    const auto j = jacobi_preconditioner(x, std::vector<double>{1, 1}, 1.0, std::vector<double>{1, 1});
    CHECK(j.inv_diagonal()[0] == 0.5);
    CHECK(j.inv_diagonal()[1] == 0.5);
  }
  SUBCASE("random instance: diagonal of dense Phi, unit-diagonal preconditioned matrix") {
    Rng rng(10);
    const auto in = make_instance(rng);
    const std::vector<double> prior = prior_precision_diagonal(in.tau, in.lambda);
    const Eigen::MatrixXd phi_ref = oracle::phi(in.d.dense, in.omega, prior);
    const auto j = jacobi_preconditioner(in.d.sparse, in.omega, in.tau, in.lambda);
    for (std::size_t i = 0; i < prior.size(); ++i)
      CHECK(std::abs(1.0 / j.inv_diagonal()[i] - phi_ref(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i))) <=
            1e-12 * phi_ref.diagonal().maxCoeff());
    PrecisionOperator phi(in.d.sparse, in.omega, prior);
    const auto pm = preconditioned_matrix(phi, j);
    CHECK((pm.values.diagonal().array() - 1.0).abs().maxCoeff() <= 1e-12);
  }
  SUBCASE("zero diagonal is degenerate") {
    const auto x = SparseDesignMatrix::from_csr(1, 2, {0, 1}, {0}, {1.0});
    PrecisionOperator phi(x, {1.0}, {0.0, 0.0});
    CHECK_THROWS_AS(jacobi_preconditioner(phi), DegeneratePreconditionerError);
  }
}

TEST_CASE("augmented prior preconditioner") {
  const std::vector<double> lambda{1.0, 2.0};
  SUBCASE("no unshrunk block equals prior") {
    const auto a = augmented_prior(0.7, lambda, {});
    const auto p = prior_preconditioner(0.7, lambda);
    CHECK(a.apply_inverse(std::vector<double>{1, 1}) == p.apply_inverse(std::vector<double>{1, 1}));
  }
  SUBCASE("unit scales give the identity") {
    const auto a = augmented_prior(1.0, std::vector<double>{1.0}, std::vector<double>{1.0});
    CHECK(a.apply_inverse(std::vector<double>{3, 4}) == std::vector<double>{3, 4});
    CHECK(a.kind() == PreconditionerKind::kAugmentedPrior);
  }
  SUBCASE("non-positive gamma rejected") {
    CHECK_THROWS_AS(augmented_prior(1.0, lambda, std::vector<double>{0.0}), ArgumentError);
  }
  SUBCASE("interlacing: all but q+1 eigenvalues within the shrunk-block range") {
    Rng rng(31);
    const std::size_t q1 = 2, p = 10;
    const auto d = oracle::random_design(40, q1 + p, 0.6, rng);
    const auto omega = oracle::positive_vector(40, rng);
    const auto lam = oracle::positive_vector(p, rng);
    const double tau = 0.8;
    const std::vector<double> sd{1.0, 3.0};
    PrecisionOperator phi(d.sparse, omega, prior_precision_diagonal(tau, lam, sd));
    const auto m = augmented_prior(tau, lam, std::vector<double>{0.4, 2.5});
    const auto ev = sym_eigenvalues(preconditioned_matrix(phi, m));
    const auto full = preconditioned_matrix(phi, m).values;
    const auto shrunk = oracle::eigen_desc(full.bottomRightCorner(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p)));
    const double lo = shrunk.back(), hi = shrunk.front();
    // Interlacing bounds each side separately: at most q+1 above and q+1 below.
    std::size_t above = 0, below = 0;
    for (double v : ev) {
      if (v > hi + 1e-10) ++above;
      if (v < lo - 1e-10) ++below;
    }
    CHECK(above <= q1);
    CHECK(below <= q1);
  }
}

TEST_CASE("gamma policy") {
  ChainOutput chain;
  chain.n_unshrunk = 1;
  chain.unshrunk_prior_sd = {std::numeric_limits<double>::infinity()};
  SUBCASE("cold start caps an infinite prior sd") {
    CHECK(gamma_policy(chain)[0] == 10.0);
    chain.unshrunk_prior_sd = {2.0};
    CHECK(gamma_policy(chain)[0] == 2.0);
  }
  SUBCASE("constant chain falls back to the floor") {
    for (int i = 0; i < 5; ++i) chain.record_update(std::vector<double>{5.0}, {});
    CHECK(gamma_policy(chain)[0] == 1e-3);
  }
  SUBCASE("two-point sd") {
    chain.record_update(std::vector<double>{0.0}, {});
    chain.record_update(std::vector<double>{2.0}, {});
    CHECK(gamma_policy(chain)[0] == doctest::Approx(std::sqrt(2.0)));
    CHECK(gamma_policy(chain, {.c = 2.0})[0] == doctest::Approx(2.0 * std::sqrt(2.0)));
  }
  SUBCASE("known Gaussian chain") {
    Rng rng(77);
    for (int i = 0; i < 1000; ++i) chain.record_update(std::vector<double>{1.0 + 3.0 * rng.normal()}, {});
    CHECK(std::abs(gamma_policy(chain)[0] / 3.0 - 1.0) < 0.1);
  }
  SUBCASE("c below one rejected") { CHECK_THROWS_AS(gamma_policy(chain, {.c = 0.5}), ArgumentError); }
}

TEST_CASE("block-threshold preconditioner") {
  Rng rng(41);
  const auto in = make_instance(rng, 40, 15);
  PrecisionOperator phi(in.d.sparse, in.omega, prior_precision_diagonal(in.tau, in.lambda));
  SUBCASE("k = 0 reduces to the prior preconditioner") {
    const auto b = block_threshold(in.d.sparse, in.omega, in.tau, in.lambda, 0);
    const auto p = prior_preconditioner(in.tau, in.lambda);
    const auto v = oracle::random_vector(15, rng);
    CHECK(oracle::max_abs_diff(b.apply_inverse(v), p.apply_inverse(v)) <= 1e-14);
    const auto ev = sym_eigenvalues(preconditioned_matrix(phi, b));
    const auto ev_p = sym_eigenvalues(preconditioned_matrix(phi, p));
    CHECK(oracle::max_abs_diff(ev, ev_p) <= 1e-10);
  }
  SUBCASE("k = p inverts Phi exactly") {
    const auto b = block_threshold(in.d.sparse, in.omega, in.tau, in.lambda, 15);
    const auto v = oracle::random_vector(15, rng);
    const Eigen::MatrixXd ref = oracle::phi(in.d.dense, in.omega, prior_precision_diagonal(in.tau, in.lambda));
    CHECK(oracle::rel_l2(b.apply_inverse(v), oracle::stdvec(oracle::solve(ref, oracle::vec(v)))) <= 1e-10);
  }
  SUBCASE("block indices are the largest scales, ties to the lower index") {
    const std::vector<double> lam{1.0, 3.0, 3.0, 0.5, 2.0};
    CHECK(largest_indices(lam, 3) == std::vector<std::size_t>{1, 2, 4});
    const auto x = SparseDesignMatrix::from_dense(Eigen::MatrixXd::Identity(5, 5));
    const auto b = block_threshold(x, std::vector<double>(5, 1.0), 1.0, lam, 2);
    CHECK(std::vector<std::size_t>(b.block_indices().begin(), b.block_indices().end()) == std::vector<std::size_t>{1, 2});
  }
  SUBCASE("k above p rejected") {
    CHECK_THROWS_AS(block_threshold(in.d.sparse, in.omega, in.tau, in.lambda, 16), ArgumentError);
  }
}

TEST_CASE("apply_inverse is linear") {
  Rng rng(51);
  const auto in = make_instance(rng);
  PrecisionOperator phi(in.d.sparse, in.omega, prior_precision_diagonal(in.tau, in.lambda));
  std::vector<double> scale(in.lambda.size());
  for (std::size_t j = 0; j < scale.size(); ++j) scale[j] = in.tau * in.lambda[j];
  for (const auto& m : {prior_preconditioner(in.tau, in.lambda), jacobi_preconditioner(phi),
                        block_threshold(phi, scale, 4), Preconditioner::identity(scale.size())}) {
    const auto v = oracle::random_vector(scale.size(), rng);
    const auto w = oracle::random_vector(scale.size(), rng);
    std::vector<double> comb(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) comb[j] = 2.5 * v[j] - 0.75 * w[j];
    const auto mv = m.apply_inverse(v), mw = m.apply_inverse(w), mc = m.apply_inverse(comb);
    for (std::size_t j = 0; j < v.size(); ++j) CHECK(std::abs(mc[j] - (2.5 * mv[j] - 0.75 * mw[j])) <= 1e-12 * (1 + std::abs(mc[j])));
  }
}

TEST_CASE("preconditioner spec parsing") {
  CHECK(parse_preconditioner("prior").kind == PreconditionerKind::kPrior);
  CHECK(parse_preconditioner("jacobi").kind == PreconditionerKind::kJacobi);
  CHECK(parse_preconditioner("augmented").kind == PreconditionerKind::kAugmentedPrior);
  CHECK(parse_preconditioner("identity").kind == PreconditionerKind::kIdentity);
  const auto b = parse_preconditioner("block:25");
  CHECK(b.kind == PreconditionerKind::kBlockThreshold);
  CHECK(b.block_size == 25);
  CHECK(to_string(b) == "block:25");
  CHECK_THROWS_AS(parse_preconditioner("block:"), ArgumentError);
  CHECK_THROWS_AS(parse_preconditioner("block:x"), ArgumentError);
  CHECK_THROWS_AS(parse_preconditioner("ssor"), ArgumentError);
}
