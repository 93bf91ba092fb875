#include "pcgs/precond.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Cholesky>

#include "pcgs/errors.hpp"

namespace pcgs {

std::string to_string(PreconditionerKind kind) {
  switch (kind) {
    case PreconditionerKind::kPrior: return "prior";
    case PreconditionerKind::kJacobi: return "jacobi";
    case PreconditionerKind::kAugmentedPrior: return "augmented";
    case PreconditionerKind::kBlockThreshold: return "block";
    case PreconditionerKind::kIdentity: return "identity";
  }
  return "unknown";
}

Preconditioner Preconditioner::identity(std::size_t dim) {
  Preconditioner m;
  m.kind_ = PreconditionerKind::kIdentity;
  m.dim_ = dim;
  m.inv_diag_.assign(dim, 1.0);
  return m;
}

Preconditioner Preconditioner::diagonal(PreconditionerKind kind, std::vector<double> inv_diagonal) {
  if (kind == PreconditionerKind::kBlockThreshold)
    throw ArgumentError("Preconditioner::diagonal: block preconditioner is not diagonal");
  for (double d : inv_diagonal)
    if (!(d > 0.0) || !std::isfinite(d))
      throw DegeneratePreconditionerError("preconditioner diagonal must be positive and finite");
  Preconditioner m;
  m.kind_ = kind;
  m.dim_ = inv_diagonal.size();
  m.inv_diag_ = std::move(inv_diagonal);
  return m;
}

void Preconditioner::apply_inverse(std::span<const double> v, std::span<double> out) const {
  if (v.size() != dim_ || out.size() != dim_) throw ArgumentError("apply_inverse: dimension mismatch");
  if (kind_ != PreconditionerKind::kBlockThreshold) {
    for (std::size_t j = 0; j < dim_; ++j) out[j] = inv_diag_[j] * v[j];
    return;
  }
  for (std::size_t j = 0; j < dim_; ++j) out[j] = inv_diag_[j] * v[j];
  if (!block_.empty()) {
    const auto k = static_cast<Eigen::Index>(block_.size());
    Eigen::VectorXd rhs(k);
    for (Eigen::Index a = 0; a < k; ++a) rhs(a) = out[block_[static_cast<std::size_t>(a)]];
    block_chol_.triangularView<Eigen::Lower>().solveInPlace(rhs);
    block_chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(rhs);
    for (Eigen::Index a = 0; a < k; ++a) out[block_[static_cast<std::size_t>(a)]] = rhs(a);
  }
  for (std::size_t j = 0; j < dim_; ++j) out[j] *= inv_diag_[j];
}

std::vector<double> Preconditioner::apply_inverse(std::span<const double> v) const {
  std::vector<double> out(dim_);
  apply_inverse(v, out);
  return out;
}

namespace {

void check_scales(double tau, std::span<const double> lambda) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ArgumentError("tau must be positive and finite");
  for (double l : lambda)
    if (!(l > 0.0) || !std::isfinite(l)) throw ArgumentError("lambda entries must be positive and finite");
}

}  // namespace

Preconditioner prior_preconditioner(double tau, std::span<const double> lambda) {
  check_scales(tau, lambda);
  std::vector<double> inv(lambda.size());
  for (std::size_t j = 0; j < lambda.size(); ++j) {
    const double s = tau * lambda[j];
    inv[j] = s * s;
  }
  return Preconditioner::diagonal(PreconditionerKind::kPrior, std::move(inv));
}

Preconditioner jacobi_preconditioner(const SparseDesignMatrix& x, std::span<const double> omega,
                                     double tau, std::span<const double> lambda) {
  check_scales(tau, lambda);
  if (lambda.size() != x.n_cols()) throw ArgumentError("jacobi_preconditioner: lambda length != p");
  PrecisionOperator phi(x, std::vector<double>(omega.begin(), omega.end()),
                        prior_precision_diagonal(tau, lambda));
  return jacobi_preconditioner(phi);
}

Preconditioner jacobi_preconditioner(const PrecisionOperator& phi) {
  std::vector<double> d = gram_diagonal(phi.design(), phi.omega());
  for (std::size_t j = 0; j < d.size(); ++j) {
    d[j] += phi.prior_precision()[j];
    if (!(d[j] > 0.0) || !std::isfinite(d[j]))
      throw DegeneratePreconditionerError("jacobi_preconditioner: zero diagonal entry at " +
                                          std::to_string(j));
    d[j] = 1.0 / d[j];
  }
  return Preconditioner::diagonal(PreconditionerKind::kJacobi, std::move(d));
}

Preconditioner augmented_prior(double tau, std::span<const double> lambda,
                               std::span<const double> gamma) {
  check_scales(tau, lambda);
  std::vector<double> inv;
  inv.reserve(gamma.size() + lambda.size());
  for (double g : gamma) {
    if (!(g > 0.0) || !std::isfinite(g)) throw ArgumentError("augmented_prior: gamma must be positive and finite");
    inv.push_back(g * g);
  }
  for (double l : lambda) inv.push_back((tau * l) * (tau * l));
  return Preconditioner::diagonal(
      gamma.empty() ? PreconditionerKind::kPrior : PreconditionerKind::kAugmentedPrior, std::move(inv));
}

std::vector<std::size_t> largest_indices(std::span<const double> values, std::size_t k) {
  if (k > values.size()) throw ArgumentError("largest_indices: k exceeds length");
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  idx.resize(k);
  return idx;
}

Preconditioner block_threshold(const PrecisionOperator& phi, std::span<const double> scale,
                               std::size_t k) {
  const std::size_t p = phi.dim();
  if (scale.size() != p) throw ArgumentError("block_threshold: scale length != p");
  if (k > p) throw ArgumentError("block_threshold: k exceeds p");
  require_dense(k, "block_threshold");
  for (double s : scale)
    if (!(s > 0.0) || !std::isfinite(s)) throw ArgumentError("block_threshold: scales must be positive");

  Preconditioner m;
  m.kind_ = PreconditionerKind::kBlockThreshold;
  m.dim_ = p;
  m.inv_diag_.assign(scale.begin(), scale.end());
  m.block_ = largest_indices(scale, k);
  if (k == 0) return m;

  // B = D_b (X_bᵀ Ω X_b + prior_b) D_b; equals I + τ²Λ_b (XᵀΩX)_bb Λ_b on shrunk entries.
  Eigen::MatrixXd xb = dense_columns(phi.design(), m.block_);
  const auto ki = static_cast<Eigen::Index>(k);
  Eigen::VectorXd sw(xb.rows());
  for (Eigen::Index i = 0; i < xb.rows(); ++i) sw(i) = std::sqrt(phi.omega()[static_cast<std::size_t>(i)]);
  xb = sw.asDiagonal() * xb;
  Eigen::VectorXd db(ki);
  for (Eigen::Index a = 0; a < ki; ++a) db(a) = scale[m.block_[static_cast<std::size_t>(a)]];
  xb = xb * db.asDiagonal();
  Eigen::MatrixXd b = xb.transpose() * xb;
  for (Eigen::Index a = 0; a < ki; ++a) {
    const std::size_t j = m.block_[static_cast<std::size_t>(a)];
    b(a, a) += phi.prior_precision()[j] * scale[j] * scale[j];
  }
  Eigen::LLT<Eigen::MatrixXd> llt(b);
  if (llt.info() != Eigen::Success) throw NotPositiveDefiniteError("block_threshold: block is not positive definite");
  m.block_chol_ = llt.matrixL();
  return m;
}

Preconditioner block_threshold(const SparseDesignMatrix& x, std::span<const double> omega,
                               double tau, std::span<const double> lambda, std::size_t k) {
  check_scales(tau, lambda);
  if (lambda.size() != x.n_cols()) throw ArgumentError("block_threshold: lambda length != p");
  PrecisionOperator phi(x, std::vector<double>(omega.begin(), omega.end()),
                        prior_precision_diagonal(tau, lambda));
  std::vector<double> scale(lambda.size());
  for (std::size_t j = 0; j < scale.size(); ++j) scale[j] = tau * lambda[j];
  return block_threshold(phi, scale, k);
}

std::vector<double> gamma_policy(const ChainOutput& chain, const GammaPolicy& policy) {
  if (policy.c < 1.0) throw ArgumentError("gamma_policy: c must be >= 1");
  const std::size_t q1 = chain.n_unshrunk;
  std::vector<double> gamma(q1);
  if (chain.unshrunk.count < 2) {
    for (std::size_t j = 0; j < q1; ++j) {
      const double s = j < chain.unshrunk_prior_sd.size() ? chain.unshrunk_prior_sd[j]
                                                          : std::numeric_limits<double>::infinity();
      gamma[j] = std::min(s, policy.flat_prior_cap);
    }
    return gamma;
  }
  const auto var = chain.unshrunk.variance();
  for (std::size_t j = 0; j < q1; ++j) gamma[j] = std::max(policy.c * std::sqrt(var[j]), policy.floor);
  return gamma;
}

PreconditionerSpec parse_preconditioner(const std::string& text) {
  if (text == "prior") return {PreconditionerKind::kPrior, 0};
  if (text == "jacobi") return {PreconditionerKind::kJacobi, 0};
  if (text == "augmented") return {PreconditionerKind::kAugmentedPrior, 0};
  if (text == "identity") return {PreconditionerKind::kIdentity, 0};
  if (text.rfind("block:", 0) == 0) {
    const std::string digits = text.substr(6);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      throw ArgumentError("preconditioner: block size must be a non-negative integer, got '" + digits + "'");
    return {PreconditionerKind::kBlockThreshold, static_cast<std::size_t>(std::stoull(digits))};
  }
  throw ArgumentError("unknown preconditioner '" + text + "' (expected prior|jacobi|augmented|block:<k>|identity)");
}

std::string to_string(const PreconditionerSpec& spec) {
  if (spec.kind == PreconditionerKind::kBlockThreshold) return "block:" + std::to_string(spec.block_size);
  return to_string(spec.kind);
}

Preconditioner make_preconditioner(const PreconditionerSpec& spec, const PrecisionOperator& phi,
                                   std::span<const double> gamma, std::span<const double> shrunk_scale) {
  if (gamma.size() + shrunk_scale.size() != phi.dim())
    throw ArgumentError("make_preconditioner: scale lengths do not match the operator");
  switch (spec.kind) {
    case PreconditionerKind::kIdentity:
      return Preconditioner::identity(phi.dim());
    case PreconditionerKind::kJacobi:
      return jacobi_preconditioner(phi);
    case PreconditionerKind::kPrior:
    case PreconditionerKind::kAugmentedPrior: {
      std::vector<double> inv;
      inv.reserve(phi.dim());
      for (double g : gamma) inv.push_back(g * g);
      for (double s : shrunk_scale) inv.push_back(s * s);
      return Preconditioner::diagonal(
          gamma.empty() ? PreconditionerKind::kPrior : PreconditionerKind::kAugmentedPrior, std::move(inv));
    }
    case PreconditionerKind::kBlockThreshold: {
      std::vector<double> scale(gamma.begin(), gamma.end());
      scale.insert(scale.end(), shrunk_scale.begin(), shrunk_scale.end());
      return block_threshold(phi, scale, spec.block_size);
    }
  }
  throw ArgumentError("make_preconditioner: unknown kind");
}

}  // namespace pcgs
