#include "pcgs/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Core>

#include "pcgs/errors.hpp"

namespace pcgs {

LogHistogram log10_histogram(std::span<const double> values) {
  LogHistogram h;
  std::vector<double> logs;
  logs.reserve(values.size());
  for (double v : values) {
    if (v > 0.0) {
      logs.push_back(std::log10(v));
    } else {
      ++h.nonpositive;
    }
  }
  if (logs.empty()) return h;
  const auto [mn, mx] = std::minmax_element(logs.begin(), logs.end());
  const double w = LogHistogram::kBinWidth;
  // Edges sit on multiples of the bin width so histograms are comparable.
  const long lo = static_cast<long>(std::floor(*mn / w + 1e-9));
  long hi = static_cast<long>(std::floor(*mx / w + 1e-9)) + 1;
  if (hi <= lo) hi = lo + 1;
  for (long e = lo; e <= hi; ++e) h.bin_edges.push_back(static_cast<double>(e) * w);
  h.counts.assign(static_cast<std::size_t>(hi - lo), 0);
  for (double l : logs) {
    long b = static_cast<long>(std::floor(l / w + 1e-9)) - lo;
    b = std::clamp(b, 0L, hi - lo - 1);
    ++h.counts[static_cast<std::size_t>(b)];
  }
  return h;
}

std::pair<double, double> default_trim_range(PreconditionerKind kind) {
  switch (kind) {
    case PreconditionerKind::kPrior:
    case PreconditionerKind::kAugmentedPrior:
      return {0.0, 1.0};
    case PreconditionerKind::kJacobi:
      return {-1.0, 0.0};
    default:
      return {-0.5, 0.5};
  }
}

DenseSymmetric preconditioned_matrix(const PrecisionOperator& phi, const Preconditioner& m) {
  if (m.dim() != phi.dim()) throw ArgumentError("preconditioned_matrix: dimension mismatch");
  require_dense(phi.dim(), "preconditioned_matrix");
  Eigen::MatrixXd a = phi.dense().values;
  Eigen::VectorXd d(a.rows());
  const auto inv = m.inv_diagonal();
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    const double s = inv[static_cast<std::size_t>(j)];
    d(j) = m.is_diagonal() ? std::sqrt(s) : s;
  }
  a = d.asDiagonal() * a * d.asDiagonal();
  const auto block = m.block_indices();
  if (!block.empty()) {
    const auto k = static_cast<Eigen::Index>(block.size());
    Eigen::MatrixXd rows(k, a.cols());
    for (Eigen::Index i = 0; i < k; ++i) rows.row(i) = a.row(static_cast<Eigen::Index>(block[static_cast<std::size_t>(i)]));
    m.block_factor().triangularView<Eigen::Lower>().solveInPlace(rows);
    for (Eigen::Index i = 0; i < k; ++i) a.row(static_cast<Eigen::Index>(block[static_cast<std::size_t>(i)])) = rows.row(i);
    Eigen::MatrixXd cols(a.rows(), k);
    for (Eigen::Index i = 0; i < k; ++i) cols.col(i) = a.col(static_cast<Eigen::Index>(block[static_cast<std::size_t>(i)]));
    Eigen::MatrixXd colst = cols.transpose();
    m.block_factor().triangularView<Eigen::Lower>().solveInPlace(colst);
    for (Eigen::Index i = 0; i < k; ++i) a.col(static_cast<Eigen::Index>(block[static_cast<std::size_t>(i)])) = colst.row(i).transpose();
  }
  return DenseSymmetric(0.5 * (a + a.transpose()));
}

SpectrumReport preconditioned_spectrum(const PrecisionOperator& phi, const Preconditioner& m,
                                       std::optional<std::pair<double, double>> trim) {
  SpectrumReport r;
  r.eigenvalues = sym_eigenvalues(preconditioned_matrix(phi, m));
  r.histogram = log10_histogram(r.eigenvalues);
  r.trim_range = trim.value_or(default_trim_range(m.kind()));
  for (double v : r.eigenvalues) {
    if (v <= 0.0) continue;
    const double l = std::log10(v);
    if (l >= r.trim_range.first && l <= r.trim_range.second) ++r.in_trim_range;
  }
  return r;
}

namespace {

DenseSymmetric drop_indices(const DenseSymmetric& g, std::span<const std::size_t> drop) {
  const std::size_t p = g.dim();
  std::vector<bool> gone(p, false);
  for (std::size_t j : drop) gone[j] = true;
  std::vector<Eigen::Index> keep;
  for (std::size_t j = 0; j < p; ++j)
    if (!gone[j]) keep.push_back(static_cast<Eigen::Index>(j));
  const auto q = static_cast<Eigen::Index>(keep.size());
  Eigen::MatrixXd s(q, q);
  for (Eigen::Index a = 0; a < q; ++a)
    for (Eigen::Index b = 0; b < q; ++b) s(a, b) = g.values(keep[static_cast<std::size_t>(a)], keep[static_cast<std::size_t>(b)]);
  return DenseSymmetric(std::move(s));
}

}  // namespace

std::vector<SubmatrixSpectrum> submatrix_spectra(const DenseSymmetric& gram, std::span<const double> lambda,
                                                 std::span<const std::size_t> ks) {
  if (lambda.size() != gram.dim()) throw ArgumentError("submatrix_spectra: lambda length != dimension");
  const std::vector<std::size_t> order = largest_indices(lambda, lambda.size());
  std::vector<SubmatrixSpectrum> out;
  for (std::size_t k : ks) {
    if (k > lambda.size()) throw ArgumentError("submatrix_spectra: k exceeds p");
    SubmatrixSpectrum s;
    s.k = k;
    if (k < lambda.size())
      s.eigenvalues = sym_eigenvalues(drop_indices(gram, std::span(order).subspan(0, k)));
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<EigenBoundCheck> verify_eigen_bounds(const SparseDesignMatrix& x, std::span<const double> omega,
                                                 double tau, std::span<const double> lambda,
                                                 std::span<const std::size_t> ks, std::span<const std::size_t> ls,
                                                 double slack) {
  const std::size_t p = lambda.size();
  if (x.n_cols() != p) throw ArgumentError("verify_eigen_bounds: design must hold the shrunk columns only");
  const DenseSymmetric gram = weighted_gram(x, omega);
  PrecisionOperator phi(x, std::vector<double>(omega.begin(), omega.end()), prior_precision_diagonal(tau, lambda));
  const std::vector<double> nu = sym_eigenvalues(preconditioned_matrix(phi, prior_preconditioner(tau, lambda)));
  const std::vector<double> full = sym_eigenvalues(gram);
  std::vector<double> sorted(lambda.begin(), lambda.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());

  std::vector<std::size_t> valid_ks;
  for (std::size_t k : ks)
    if (k < p) valid_ks.push_back(k);
  const auto subs = submatrix_spectra(gram, lambda, valid_ks);

  std::vector<EigenBoundCheck> out;
  for (const auto& sub : subs) {
    const double scale = tau * tau * sorted[sub.k] * sorted[sub.k];
    for (std::size_t l : ls) {
      if (sub.k + l >= p) continue;
      EigenBoundCheck c;
      c.k = sub.k;
      c.l = l;
      c.eigenvalue = nu[sub.k + l];
      c.submatrix_bound = 1.0 + scale * std::max(l < sub.eigenvalues.size() ? sub.eigenvalues[l] : 0.0, 0.0);
      c.full_bound = 1.0 + scale * std::max(full[l], 0.0);
      c.pass = c.eigenvalue >= 1.0 - slack &&
               c.eigenvalue <= c.submatrix_bound * (1.0 + slack) &&
               c.submatrix_bound <= c.full_bound * (1.0 + slack);
      out.push_back(c);
    }
  }
  return out;
}

ErrorTrace error_trace(const CGReport& report, std::span<const double> solution, const PrecisionOperator& phi) {
  if (report.iterates.empty()) throw ArgumentError("error_trace: report has no stored iterates (use full tracing)");
  const std::size_t p = solution.size();
  ErrorTrace t;
  for (double s : solution)
    if (std::abs(s) < 1e-300) ++t.guarded;
  std::vector<double> e(p);
  for (const auto& xk : report.iterates) {
    if (xk.size() != p) throw ArgumentError("error_trace: iterate length != solution length");
    double rel = 0.0, l2 = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      e[j] = xk[j] - solution[j];
      l2 += e[j] * e[j];
      if (std::abs(solution[j]) >= 1e-300) rel += std::abs(e[j] / solution[j]);
    }
    const std::vector<double> pe = phi.apply(e);
    double en = 0.0;
    for (std::size_t j = 0; j < p; ++j) en += e[j] * pe[j];
    const std::size_t counted = p - t.guarded;
    t.rel_coord_error.push_back(counted > 0 ? rel / static_cast<double>(counted) : 0.0);
    t.l2_error.push_back(std::sqrt(l2));
    t.phi_norm_error.push_back(std::sqrt(std::max(en, 0.0)));
  }
  t.rms_precond_residual = report.rms_precond_residual_trace;
  t.rms_precond_residual.resize(t.rel_coord_error.size(), 0.0);
  return t;
}

std::vector<double> geometric_mean(const std::vector<std::vector<double>>& series) {
  if (series.empty()) return {};
  std::size_t len = series.front().size();
  for (const auto& s : series) len = std::min(len, s.size());
  std::vector<double> out(len, 0.0);
  for (std::size_t i = 0; i < len; ++i) {
    double acc = 0.0;
    bool zero = false;
    for (const auto& s : series) {
      if (s[i] <= 0.0) {
        zero = true;
        break;
      }
      acc += std::log(s[i]);
    }
    out[i] = zero ? 0.0 : std::exp(acc / static_cast<double>(series.size()));
  }
  return out;
}

std::optional<std::size_t> first_below(std::span<const double> series, double tol) {
  for (std::size_t i = 0; i < series.size(); ++i)
    if (series[i] <= tol) return i;
  return std::nullopt;
}

TauLambdaProfile tau_lambda_profile(double tau, std::span<const double> lambda, std::size_t top) {
  TauLambdaProfile prof;
  prof.sorted.resize(lambda.size());
  for (std::size_t j = 0; j < lambda.size(); ++j) prof.sorted[j] = tau * lambda[j];
  std::sort(prof.sorted.begin(), prof.sorted.end(), std::greater<>());
  const std::size_t m = std::min(top, prof.sorted.size());
  for (std::size_t j = 0; j < m; ++j) prof.relative.push_back(prof.sorted[j] / prof.sorted.front());
  prof.histogram = log10_histogram(prof.sorted);
  return prof;
}

}  // namespace pcgs
