#include "pcgs/precision.hpp"

#include <cmath>

#include "pcgs/errors.hpp"

namespace pcgs {

PrecisionOperator::PrecisionOperator(const SparseDesignMatrix& x, std::vector<double> omega,
                                     std::vector<double> prior_precision)
    : x_(&x), omega_(std::move(omega)), prior_precision_(std::move(prior_precision)) {
  if (omega_.size() != x.n_rows()) throw ArgumentError("PrecisionOperator: omega length != n");
  if (prior_precision_.size() != x.n_cols())
    throw ArgumentError("PrecisionOperator: prior precision length != p");
  for (double w : omega_)
    if (!(w >= 0.0) || !std::isfinite(w)) throw ArgumentError("PrecisionOperator: omega must be finite and >= 0");
  residual_scale_.resize(prior_precision_.size());
  for (std::size_t j = 0; j < prior_precision_.size(); ++j) {
    const double d = prior_precision_[j];
    if (!(d >= 0.0) || !std::isfinite(d))
      throw ArgumentError("PrecisionOperator: prior precision must be finite and >= 0");
    residual_scale_[j] = d > 0.0 ? 1.0 / std::sqrt(d) : 1.0;
  }
}

PrecisionOperator::PrecisionOperator(const PrecisionOperator& other)
    : x_(other.x_),
      omega_(other.omega_),
      prior_precision_(other.prior_precision_),
      residual_scale_(other.residual_scale_),
      applies_(0) {}

PrecisionOperator& PrecisionOperator::operator=(const PrecisionOperator& other) {
  x_ = other.x_;
  omega_ = other.omega_;
  prior_precision_ = other.prior_precision_;
  residual_scale_ = other.residual_scale_;
  applies_ = 0;
  return *this;
}

void PrecisionOperator::set_residual_scale(std::vector<double> scale) {
  if (scale.size() != dim()) throw ArgumentError("set_residual_scale: length != p");
  for (double s : scale)
    if (!(s > 0.0) || !std::isfinite(s)) throw ArgumentError("set_residual_scale: entries must be positive");
  residual_scale_ = std::move(scale);
}

void PrecisionOperator::apply(std::span<const double> v, std::span<double> out) const {
  if (v.size() != dim() || out.size() != dim()) throw ArgumentError("PrecisionOperator::apply: dimension mismatch");
  ++applies_;
  std::vector<double> xv = matvec(*x_, v);
  for (std::size_t i = 0; i < xv.size(); ++i) xv[i] *= omega_[i];
  matvec_t(*x_, xv, out);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += prior_precision_[j] * v[j];
}

std::vector<double> PrecisionOperator::apply(std::span<const double> v) const {
  std::vector<double> out(dim());
  apply(v, out);
  return out;
}

DenseSymmetric PrecisionOperator::dense() const {
  DenseSymmetric g = weighted_gram(*x_, omega_);
  for (std::size_t j = 0; j < dim(); ++j) g.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) += prior_precision_[j];
  return g;
}

std::vector<double> prior_precision_diagonal(double tau, std::span<const double> lambda,
                                             std::span<const double> unshrunk_prior_sd) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ArgumentError("prior precision: tau must be positive and finite");
  std::vector<double> d;
  d.reserve(unshrunk_prior_sd.size() + lambda.size());
  for (double s : unshrunk_prior_sd) {
    if (!(s > 0.0)) throw ArgumentError("prior precision: unshrunk prior sd must be positive");
    d.push_back(std::isinf(s) ? 0.0 : 1.0 / (s * s));
  }
  for (double l : lambda) {
    if (!(l > 0.0) || !std::isfinite(l)) throw ArgumentError("prior precision: lambda must be positive and finite");
    const double sd = tau * l;
    d.push_back(1.0 / (sd * sd));
  }
  return d;
}

}  // namespace pcgs
