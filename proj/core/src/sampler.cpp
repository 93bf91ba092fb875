#include "pcgs/sampler.hpp"

#include <cmath>

#include <Eigen/Core>

#include "pcgs/dense.hpp"
#include "pcgs/errors.hpp"

namespace pcgs {

std::vector<double> generate_rhs(const GaussianTarget& target, std::span<const double> eta,
                                 std::span<const double> delta) {
  const auto& phi = target.precision;
  const std::size_t n = phi.design().n_rows();
  const std::size_t p = phi.dim();
  if (eta.size() != n || delta.size() != p) throw ArgumentError("generate_rhs: noise length mismatch");
  if (target.linear_term.size() != p) throw ArgumentError("generate_rhs: linear term length != p");
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = std::sqrt(phi.omega()[i]) * eta[i];
  std::vector<double> b = matvec_t(phi.design(), w);
  for (std::size_t j = 0; j < p; ++j)
    b[j] += target.linear_term[j] + std::sqrt(phi.prior_precision()[j]) * delta[j];
  return b;
}

std::vector<double> generate_rhs(const GaussianTarget& target, Rng& rng) {
  const std::size_t n = target.precision.design().n_rows();
  std::vector<double> eta(n), delta(target.dim());
  for (double& e : eta) e = rng.normal();
  for (double& d : delta) d = rng.normal();
  return generate_rhs(target, eta, delta);
}

CGSample cg_sample(const GaussianTarget& target, const Preconditioner& m, std::span<const double> x0,
                   const CGConfig& cfg, Rng& rng) {
  const std::vector<double> b = generate_rhs(target, rng);
  CGSample out;
  out.report = pcg_solve(target.precision, b, m, x0, cfg);
  out.beta = out.report.solution;
  return out;
}

namespace {

Eigen::VectorXd to_eigen(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::vector<double> direct_solve(const GaussianTarget& target, std::span<const double> b) {
  if (b.size() != target.dim()) throw ArgumentError("direct_solve: rhs length != p");
  require_dense(target.dim(), "direct_solve");
  const Eigen::MatrixXd l = cholesky(target.precision.dense());
  Eigen::VectorXd x = to_eigen(b);
  l.triangularView<Eigen::Lower>().solveInPlace(x);
  l.triangularView<Eigen::Lower>().transpose().solveInPlace(x);
  return to_std(x);
}

std::vector<double> direct_sample(const GaussianTarget& target, Rng& rng) {
  const std::size_t p = target.dim();
  if (target.linear_term.size() != p) throw ArgumentError("direct_sample: linear term length != p");
  require_dense(p, "direct_sample");
  const Eigen::MatrixXd l = cholesky(target.precision.dense());
  Eigen::VectorXd mu = to_eigen(target.linear_term);
  l.triangularView<Eigen::Lower>().solveInPlace(mu);
  l.triangularView<Eigen::Lower>().transpose().solveInPlace(mu);
  Eigen::VectorXd z(static_cast<Eigen::Index>(p));
  for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = rng.normal();
  l.triangularView<Eigen::Lower>().transpose().solveInPlace(z);
  return to_std(mu + z);
}

}  // namespace pcgs
