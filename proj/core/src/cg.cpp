#include "pcgs/cg.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "pcgs/errors.hpp"

namespace pcgs {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

bool all_zero(std::span<const double> v) {
  for (double x : v)
    if (x != 0.0) return false;
  return true;
}

}  // namespace

double scaled_rms(std::span<const double> r, std::span<const double> w) {
  if (r.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t j = 0; j < r.size(); ++j) {
    const double t = w[j] * r[j];
    s += t * t;
  }
  return std::sqrt(s / static_cast<double>(r.size()));
}

CGReport pcg_solve(const PrecisionOperator& phi, std::span<const double> b, const Preconditioner& m,
                   std::span<const double> x0, const CGConfig& cfg) {
  const std::size_t p = phi.dim();
  if (b.size() != p) throw ArgumentError("pcg_solve: rhs length != p");
  if (m.dim() != p) throw ArgumentError("pcg_solve: preconditioner dimension != p");
  if (!x0.empty() && x0.size() != p) throw ArgumentError("pcg_solve: x0 length != p");
  if (!(cfg.rtol >= 0.0) || !std::isfinite(cfg.rtol)) throw ArgumentError("pcg_solve: rtol must be finite and >= 0");
  const std::size_t max_iter = cfg.max_iter == 0 ? std::max<std::size_t>(2 * p, 1) : cfg.max_iter;
  const auto w = phi.residual_scale();

  CGReport rep;
  std::vector<double>& x = rep.solution;
  x.assign(p, 0.0);
  if (!x0.empty()) x.assign(x0.begin(), x0.end());

  std::vector<double> r(p), q(p), z(p), dir(p);
  phi.apply(x, q);
  ++rep.matvec_count;
  for (std::size_t j = 0; j < p; ++j) r[j] = b[j] - q[j];
  if (!all_finite(r)) throw NumericBreakdownError("pcg_solve: non-finite initial residual", 0);

  auto record = [&](double rms) {
    if (cfg.trace_level != TraceLevel::kNone) rep.rms_precond_residual_trace.push_back(rms);
    if (cfg.trace_level == TraceLevel::kFull) rep.iterates.push_back(x);
  };
  auto done = [&](double rms) { return all_zero(r) || (cfg.rtol > 0.0 && rms <= cfg.rtol); };

  double rms = scaled_rms(r, w);
  record(rms);
  if (done(rms)) {
    rep.termination = Termination::kConverged;
    return rep;
  }

  m.apply_inverse(r, z);
  dir = z;
  double rz = dot(r, z);

  for (std::size_t k = 1; k <= max_iter; ++k) {
    phi.apply(dir, q);
    ++rep.matvec_count;
    const double curvature = dot(dir, q);
    if (!std::isfinite(curvature)) throw NumericBreakdownError("pcg_solve: non-finite curvature", k);
    if (curvature <= 0.0)
      throw NotPositiveDefiniteError("pcg_solve: non-positive curvature at iteration " + std::to_string(k));
    const double alpha = rz / curvature;
    for (std::size_t j = 0; j < p; ++j) {
      x[j] += alpha * dir[j];
      r[j] -= alpha * q[j];
    }
    rep.alphas.push_back(alpha);
    rep.iterations = k;
    rms = scaled_rms(r, w);
    if (!std::isfinite(rms)) throw NumericBreakdownError("pcg_solve: non-finite residual", k);
    record(rms);
    if (done(rms)) {
      rep.termination = Termination::kConverged;
      return rep;
    }
    if (k == max_iter) break;
    m.apply_inverse(r, z);
    const double rz_next = dot(r, z);
    if (!std::isfinite(rz_next)) throw NumericBreakdownError("pcg_solve: non-finite preconditioned residual", k);
    const double beta = rz_next / rz;
    rep.betas.push_back(beta);
    for (std::size_t j = 0; j < p; ++j) dir[j] = z[j] + beta * dir[j];
    rz = rz_next;
  }
  rep.termination = Termination::kMaxIter;
  return rep;
}

std::vector<double> initial_vector(const ChainOutput& chain, double tau, std::span<const double> lambda) {
  const std::size_t q1 = chain.n_unshrunk;
  std::vector<double> x(q1 + lambda.size(), 0.0);
  if (chain.scaled_beta.count == 0) return x;
  if (chain.scaled_beta.mean.size() != x.size())
    throw ArgumentError("initial_vector: chain length does not match lambda");
  for (std::size_t j = 0; j < q1; ++j) x[j] = chain.scaled_beta.mean[j];
  for (std::size_t j = 0; j < lambda.size(); ++j) x[q1 + j] = tau * lambda[j] * chain.scaled_beta.mean[q1 + j];
  return x;
}

Eigen::MatrixXd lanczos_tridiagonal(const CGReport& report) {
  const auto k = static_cast<Eigen::Index>(report.alphas.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double a = report.alphas[static_cast<std::size_t>(i)];
    double d = 1.0 / a;
    if (i > 0) d += report.betas[static_cast<std::size_t>(i - 1)] / report.alphas[static_cast<std::size_t>(i - 1)];
    t(i, i) = d;
    if (i + 1 < k) {
      const double off = std::sqrt(report.betas[static_cast<std::size_t>(i)]) / a;
      t(i, i + 1) = off;
      t(i + 1, i) = off;
    }
  }
  return t;
}

std::vector<double> ritz_values(const CGReport& report) {
  const Eigen::MatrixXd t = lanczos_tridiagonal(report);
  if (t.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t, Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + t.rows());
  return {ev.rbegin(), ev.rend()};
}

}  // namespace pcgs
