#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "pcgs/bounds.hpp"
#include "pcgs/cg.hpp"
#include "pcgs/errors.hpp"

using namespace pcgs;

namespace {

struct System {
  oracle::Design d;
  std::vector<double> omega, lambda, prior;
  double tau;
  Eigen::MatrixXd phi;
};

System random_system(Rng& rng, std::size_t n, std::size_t p, double density = 0.5) {
  System s{oracle::random_design(n, p, density, rng), oracle::positive_vector(n, rng),
           oracle::positive_vector(p, rng, 0.05, 2.0), {}, 0.2 + rng.uniform(), {}};
  s.prior = prior_precision_diagonal(s.tau, s.lambda);
  s.phi = oracle::phi(s.d.dense, s.omega, s.prior);
  return s;
}

double phi_norm(const Eigen::MatrixXd& phi, const std::vector<double>& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd e = oracle::vec(a) - b;
  return std::sqrt(std::max(e.dot(phi * e), 0.0));
}

}  // namespace

TEST_CASE("identity system converges in one iteration") {
  const auto x = SparseDesignMatrix::from_csr(3, 4, {0, 0, 0, 0}, {}, {});
  PrecisionOperator phi(x, std::vector<double>(3, 1.0), std::vector<double>(4, 1.0));
  const std::vector<double> b{1, -2, 3, 0.5};
  const auto rep = pcg_solve(phi, b, prior_preconditioner(1.0, std::vector<double>(4, 1.0)), {});
  CHECK(rep.iterations == 1);
  CHECK(rep.converged());
  CHECK(rep.solution == b);
}

TEST_CASE("low-rank plus identity terminates within rank + 1 iterations") {
  Rng rng(100);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::MatrixXd f = oracle::random_dense(100, 5, 1.0, rng);
    const auto x = SparseDesignMatrix::from_dense(f.transpose());
    PrecisionOperator phi(x, std::vector<double>(5, 1.0), std::vector<double>(100, 1.0));
    const auto b = oracle::random_vector(100, rng);
    const auto r = pcg_solve(phi, b, prior_preconditioner(1.0, std::vector<double>(100, 1.0)), {},
                             {.max_iter = 6, .rtol = 1e-10});
    CHECK(r.converged());
    CHECK(r.iterations <= 6);
    CHECK(r.rms_precond_residual_trace.back() <= 1e-10);
  }
}

TEST_CASE("matches a dense solve on random systems") {
  Rng rng(101);
  for (int rep = 0; rep < 10; ++rep) {
    const auto s = random_system(rng, 80, 50);
    PrecisionOperator phi(s.d.sparse, s.omega, s.prior);
    const auto b = oracle::random_vector(50, rng);
    const auto rep_cg = pcg_solve(phi, b, prior_preconditioner(s.tau, s.lambda), {}, {.rtol = 1e-12});
    const auto ref = oracle::stdvec(oracle::solve(s.phi, oracle::vec(b)));
    CHECK(oracle::rel_l2(rep_cg.solution, ref) <= 1e-8);
  }
}

TEST_CASE("report invariants and matrix-free apply count") {
  Rng rng(102);
  const auto s = random_system(rng, 60, 40);
  PrecisionOperator phi(s.d.sparse, s.omega, s.prior);
  const auto b = oracle::random_vector(40, rng);
  for (const auto& m : {prior_preconditioner(s.tau, s.lambda), jacobi_preconditioner(phi),
                        Preconditioner::identity(40)}) {
    phi.reset_apply_count();
    kernel_counters().reset();
    const auto r = pcg_solve(phi, b, m, {});
    CHECK(phi.apply_count() == r.iterations + 1);
    CHECK(r.matvec_count == r.iterations + 1);
    CHECK(kernel_counters().matvec == r.iterations + 1);
    CHECK(kernel_counters().matvec_t == r.iterations + 1);
    CHECK(kernel_counters().weighted_gram == 0);
    CHECK(r.rms_precond_residual_trace.size() == r.iterations + 1);
    if (r.converged()) CHECK(r.rms_precond_residual_trace.back() <= 1e-6);
    CHECK(r.alphas.size() == r.iterations);
  }
}

TEST_CASE("max_iter termination") {
  Rng rng(103);
  const auto s = random_system(rng, 60, 40);
  PrecisionOperator phi(s.d.sparse, s.omega, s.prior);
  const auto r = pcg_solve(phi, oracle::random_vector(40, rng), Preconditioner::identity(40), {},
                           {.max_iter = 2, .rtol = 1e-14});
  CHECK(r.termination == Termination::kMaxIter);
  CHECK(r.iterations == 2);
  CHECK(r.rms_precond_residual_trace.size() == 3);
}

TEST_CASE("default max_iter is 2p") {
  const auto x = SparseDesignMatrix::from_csr(1, 3, {0, 3}, {0, 1, 2}, {1.0, 1.0, 1.0});
  PrecisionOperator phi(x, {1.0}, {1.0, 1.0, 1.0});
  const auto r = pcg_solve(phi, std::vector<double>{1, 2, 3}, Preconditioner::identity(3), {},
                           {.rtol = 0.0});
  CHECK(r.iterations <= 6);
}

TEST_CASE("Phi-norm error is nonincreasing and negligible by iteration 2p") {
  Rng rng(104);
  for (int rep = 0; rep < 5; ++rep) {
    const auto s = random_system(rng, 50, 30);
    PrecisionOperator phi(s.d.sparse, s.omega, s.prior);
    const auto b = oracle::random_vector(30, rng);
    const Eigen::VectorXd star = oracle::solve(s.phi, oracle::vec(b));
    const auto r = pcg_solve(phi, b, prior_preconditioner(s.tau, s.lambda), {},
                             {.max_iter = 60, .rtol = 0.0, .trace_level = TraceLevel::kFull});
    const double e0 = phi_norm(s.phi, r.iterates.front(), star);
    double prev = e0;
    for (const auto& it : r.iterates) {
      const double e = phi_norm(s.phi, it, star);
      CHECK(e <= prev * (1.0 + 1e-10) + 1e-14);
      prev = e;
    }
    // Rounding delays finite termination past p; 2p leaves ample margin.
    CHECK(phi_norm(s.phi, r.iterates.back(), star) / e0 <= 1e-6);
  }
}

TEST_CASE("condition-number bound holds along the trajectory") {
  Rng rng(105);
  for (int rep = 0; rep < 5; ++rep) {
    const auto s = random_system(rng, 60, 40);
    PrecisionOperator phi(s.d.sparse, s.omega, s.prior);
    const auto b = oracle::random_vector(40, rng);
    const Eigen::VectorXd star = oracle::solve(s.phi, oracle::vec(b));
    const Eigen::VectorXd sc = s.tau * oracle::vec(s.lambda);
    const auto ev = oracle::eigen_desc(sc.asDiagonal() * s.phi * sc.asDiagonal());
    const double kappa = ev.front() / ev.back();
    const auto r = pcg_solve(phi, b, prior_preconditioner(s.tau, s.lambda), {},
                             {.max_iter = 40, .rtol = 1e-13, .trace_level = TraceLevel::kFull});
    const double e0 = phi_norm(s.phi, r.iterates.front(), star);
    for (std::size_t k = 0; k < r.iterates.size(); ++k) {
      const double ratio = phi_norm(s.phi, r.iterates[k], star) / e0;
      CHECK(ratio <= cg_condition_bound(kappa, k) + 1e-9);
      CHECK(ratio <= chebyshev_discrete_bound(ev, k) + 1e-9);
    }
  }
}

TEST_CASE("error equals scaled inverse of the prior-preconditioned residual") {
  Rng rng(106);
  const auto s = random_system(rng, 50, 20);
  PrecisionOperator phi(s.d.sparse, s.omega, s.prior);
  const auto b = oracle::random_vector(20, rng);
  const Eigen::VectorXd star = oracle::solve(s.phi, oracle::vec(b));
  const Eigen::VectorXd sc = s.tau * oracle::vec(s.lambda);
  const Eigen::MatrixXd phit = sc.asDiagonal() * s.phi * sc.asDiagonal();
  const auto r = pcg_solve(phi, b, prior_preconditioner(s.tau, s.lambda), {},
                           {.max_iter = 8, .rtol = 0.0, .trace_level = TraceLevel::kFull});
  for (const auto& it : r.iterates) {
    const Eigen::VectorXd xk = oracle::vec(it);
    const Eigen::VectorXd rt = sc.asDiagonal() * (s.phi * xk - oracle::vec(b));
    const Eigen::VectorXd via = sc.asDiagonal() * phit.ldlt().solve(rt);
    CHECK((xk - star - via).norm() <= 1e-9 * (1.0 + star.norm()));
    CHECK(phit.ldlt().solve(rt).norm() <= rt.norm() * (1.0 + 1e-10));
  }
}

TEST_CASE("breakdown errors") {
  SUBCASE("singular operator reports non-positive curvature") {
    const auto x = SparseDesignMatrix::from_csr(1, 2, {0, 0}, {}, {});
    PrecisionOperator phi(x, {1.0}, {0.0, 0.0});
    CHECK_THROWS_AS(pcg_solve(phi, std::vector<double>{1, 1}, Preconditioner::identity(2), {}),
                    NotPositiveDefiniteError);
  }
  SUBCASE("non-finite rhs") {
    const auto x = SparseDesignMatrix::from_csr(1, 2, {0, 0}, {}, {});
    PrecisionOperator phi(x, {1.0}, {1.0, 1.0});
    try {
      pcg_solve(phi, std::vector<double>{NAN, 1}, Preconditioner::identity(2), {});
      FAIL("expected breakdown");
    } catch (const NumericBreakdownError& e) {
      CHECK(e.iteration() == 0);
    }
  }
  SUBCASE("overflow carries the iteration index") {
    const auto x = SparseDesignMatrix::from_csr(1, 2, {0, 0}, {}, {});
    PrecisionOperator phi(x, {1.0}, {1e300, 1e300});
    try {
      pcg_solve(phi, std::vector<double>{1e300, 1e300}, Preconditioner::identity(2), {});
      FAIL("expected breakdown");
    } catch (const NumericBreakdownError& e) {
      CHECK(e.iteration() == 1);
    }
  }
  SUBCASE("shape errors") {
    const auto x = SparseDesignMatrix::from_csr(1, 2, {0, 0}, {}, {});
    PrecisionOperator phi(x, {1.0}, {1.0, 1.0});
    CHECK_THROWS_AS(pcg_solve(phi, std::vector<double>{1}, Preconditioner::identity(2), {}), ArgumentError);
    CHECK_THROWS_AS(pcg_solve(phi, std::vector<double>{1, 1}, Preconditioner::identity(3), {}), ArgumentError);
  }
}

TEST_CASE("Lanczos tridiagonal and Ritz values") {
  Rng rng(107);
  const auto s = random_system(rng, 60, 30);
  PrecisionOperator phi(s.d.sparse, s.omega, s.prior);
  const auto b = oracle::random_vector(30, rng);
  const auto r = pcg_solve(phi, b, prior_preconditioner(s.tau, s.lambda), {}, {.max_iter = 30, .rtol = 0.0});
  const Eigen::VectorXd sc = s.tau * oracle::vec(s.lambda);
  const auto ev = oracle::eigen_desc(sc.asDiagonal() * s.phi * sc.asDiagonal());
  const Eigen::MatrixXd t = lanczos_tridiagonal(r);
  CHECK(t.rows() == static_cast<Eigen::Index>(r.iterations));
  CHECK((t - t.transpose()).norm() == 0.0);
  const auto ritz = ritz_values(r);
  for (double v : ritz) {
    CHECK(v <= ev.front() * (1 + 1e-8));
    CHECK(v >= ev.back() * (1 - 1e-8));
  }
  CHECK(ritz.front() == doctest::Approx(ev.front()).epsilon(1e-6));
}

TEST_CASE("initial vector") {
  ChainOutput chain;
  SUBCASE("empty chain gives zeros") {
    CHECK(initial_vector(chain, 0.5, std::vector<double>{1, 1}) == std::vector<double>{0, 0});
  }
  SUBCASE("hand arithmetic") {
    chain.record_update(std::vector<double>{2, 4}, std::vector<double>{1, 1});
    CHECK(initial_vector(chain, 0.5, std::vector<double>{1, 1}) == std::vector<double>{1, 2});
  }
  SUBCASE("unshrunk entries use the plain running mean") {
    chain.n_unshrunk = 1;
    chain.record_update(std::vector<double>{3, 4}, std::vector<double>{2});
    chain.record_update(std::vector<double>{5, 8}, std::vector<double>{4});
    const auto x = initial_vector(chain, 1.0, std::vector<double>{3});
    CHECK(x[0] == 4.0);
    CHECK(x[1] == doctest::Approx(6.0));
  }
  SUBCASE("Monte Carlo: rescaled mean tracks the conditional mean") {
    Rng rng(9);
    const std::vector<double> s{0.5, 2.0};
    const std::vector<double> mu{1.0, -3.0};
    for (int i = 0; i < 5000; ++i)
      chain.record_update(std::vector<double>{mu[0] + s[0] * rng.normal(), mu[1] + s[1] * rng.normal()}, s);
    const auto x = initial_vector(chain, 1.0, std::vector<double>{1.5, 0.25});
    const double se0 = 1.5 * 1.0 / std::sqrt(5000.0), se1 = 0.25 * 1.0 / std::sqrt(5000.0);
    CHECK(std::abs(x[0] - 1.5 * mu[0] / s[0]) <= 3 * se0);
    CHECK(std::abs(x[1] - 0.25 * mu[1] / s[1]) <= 3 * se1);
  }
}

TEST_CASE("termination metric uses the operator's residual scale") {
  Rng rng(108);
  const auto s = random_system(rng, 40, 10);
  PrecisionOperator phi(s.d.sparse, s.omega, s.prior);
  const auto b = oracle::random_vector(10, rng);
  const auto r = pcg_solve(phi, b, jacobi_preconditioner(phi), {}, {.rtol = 1e-9});
  std::vector<double> resid = phi.apply(r.solution);
  for (std::size_t j = 0; j < 10; ++j) resid[j] = b[j] - resid[j];
  std::vector<double> w(10);
  for (std::size_t j = 0; j < 10; ++j) w[j] = s.tau * s.lambda[j];
  CHECK(scaled_rms(resid, w) <= 1e-9 * 1.001);
}
