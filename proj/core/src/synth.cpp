#include "pcgs/synth.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>

#include "pcgs/errors.hpp"

namespace pcgs {

void SimSpec::validate() const {
  if (n < 2 || p == 0) throw ArgumentError("simulation needs n >= 2 and p >= 1");
  if (n_factors >= p) throw ArgumentError("number of factors must be below p");
  if (n_signals > p) throw ArgumentError("number of signals must not exceed p");
  if (!std::isfinite(signal_value)) throw ArgumentError("signal value must be finite");
}

Eigen::MatrixXd stiefel_sample(std::size_t p, std::size_t m, Rng& rng) {
  if (m > p) throw ArgumentError("stiefel_sample: m exceeds p");
  const auto pi = static_cast<Eigen::Index>(p), mi = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd g(pi, mi);
  for (Eigen::Index j = 0; j < mi; ++j)
    for (Eigen::Index i = 0; i < pi; ++i) g(i, j) = rng.normal();
  if (m == 0) return g;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(pi, mi);
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < mi; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

Eigen::MatrixXd simulate_design(const SimSpec& spec, Rng& rng) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(spec.n), p = static_cast<Eigen::Index>(spec.p);
  const auto m = static_cast<Eigen::Index>(spec.n_factors);
  const Eigen::MatrixXd u = stiefel_sample(spec.p, spec.n_factors, rng);
  Eigen::MatrixXd f(n, m);
  for (Eigen::Index l = 0; l < m; ++l) {
    const double scale = std::max(static_cast<double>(m - l), 1.0);
    for (Eigen::Index i = 0; i < n; ++i) f(i, l) = scale * rng.normal();
  }
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = rng.normal();
  if (m > 0) x.noalias() += f * u.transpose();
  for (Eigen::Index j = 0; j < p; ++j) {
    const double mean = x.col(j).mean();
    x.col(j).array() -= mean;
    const double sd = n > 1 ? std::sqrt(x.col(j).squaredNorm() / static_cast<double>(n - 1)) : 0.0;
    if (sd > 0.0) x.col(j) /= sd;
  }
  return x;
}

Eigen::MatrixXd simulate_design(const SimSpec& spec) {
  Rng rng = Rng::substream(spec.seed, {tag(StreamTag::kDesign)});
  return simulate_design(spec, rng);
}

std::vector<double> true_coefficients(const SimSpec& spec) {
  std::vector<double> b(spec.p, 0.0);
  for (std::size_t j = 0; j < std::min(spec.n_signals, spec.p); ++j) b[j] = spec.signal_value;
  return b;
}

std::vector<double> simulate_outcomes(const SparseDesignMatrix& x, const SimSpec& spec, Rng& rng) {
  if (x.n_cols() != spec.p) throw ArgumentError("simulate_outcomes: design has the wrong width");
  if (spec.n_signals > spec.p) throw ArgumentError("simulate_outcomes: K exceeds p");
  const std::vector<double> eta = matvec(x, true_coefficients(spec));
  std::vector<double> y(eta.size());
  for (std::size_t i = 0; i < eta.size(); ++i) {
    const double prob = 1.0 / (1.0 + std::exp(-eta[i]));
    y[i] = rng.uniform() < prob ? 1.0 : 0.0;
  }
  return y;
}

std::vector<double> simulate_outcomes(const SparseDesignMatrix& x, const SimSpec& spec) {
  Rng rng = Rng::substream(spec.seed, {tag(StreamTag::kOutcome)});
  return simulate_outcomes(x, spec, rng);
}

double pairwise_correlation_sd(const Eigen::MatrixXd& x) {
  const Eigen::Index p = x.cols();
  if (p < 2 || x.rows() < 2) throw ArgumentError("pairwise_correlation_sd: need two columns and two rows");
  Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
  for (Eigen::Index j = 0; j < p; ++j) {
    const double nrm = c.col(j).norm();
    if (nrm > 0.0) c.col(j) /= nrm;
  }
  const Eigen::MatrixXd r = c.transpose() * c;
  double sum = 0.0, sum2 = 0.0;
  std::size_t count = 0;
  for (Eigen::Index a = 0; a < p; ++a)
    for (Eigen::Index b = a + 1; b < p; ++b) {
      sum += r(a, b);
      sum2 += r(a, b) * r(a, b);
      ++count;
    }
  const double mean = sum / static_cast<double>(count);
  const double var = (sum2 - static_cast<double>(count) * mean * mean) / static_cast<double>(count - 1);
  return std::sqrt(std::max(var, 0.0));
}

}  // namespace pcgs
