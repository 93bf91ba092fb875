#include "pcgs/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

#include "pcgs/errors.hpp"
#include "pcgs/parallel.hpp"

namespace pcgs {

KernelCounters& kernel_counters() {
  static KernelCounters counters;
  return counters;
}

SparseDesignMatrix SparseDesignMatrix::from_csr(std::size_t n_rows, std::size_t n_cols,
                                                std::vector<std::size_t> row_ptr,
                                                std::vector<std::size_t> col_idx,
                                                std::vector<double> values) {
  if (row_ptr.size() != n_rows + 1) throw ArgumentError("CSR: row_ptr must have n_rows + 1 entries");
  if (row_ptr.front() != 0) throw ArgumentError("CSR: row_ptr[0] must be 0");
  if (col_idx.size() != values.size() || row_ptr.back() != values.size())
    throw ArgumentError("CSR: row_ptr[n_rows], col_idx and values lengths disagree");
  for (std::size_t i = 0; i < n_rows; ++i) {
    if (row_ptr[i + 1] < row_ptr[i]) throw ArgumentError("CSR: row_ptr is decreasing");
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      if (col_idx[k] >= n_cols) throw ArgumentError("CSR: column index out of range");
      if (k > row_ptr[i] && col_idx[k] <= col_idx[k - 1])
        throw ArgumentError("CSR: column indices must be strictly increasing within a row");
    }
  }
  SparseDesignMatrix x;
  x.n_rows_ = n_rows;
  x.n_cols_ = n_cols;
  x.row_ptr_ = std::move(row_ptr);
  x.col_idx_ = std::move(col_idx);
  x.values_ = std::move(values);
  return x;
}

SparseDesignMatrix SparseDesignMatrix::from_triplets(std::size_t n_rows, std::size_t n_cols,
                                                     std::span<const std::size_t> rows,
                                                     std::span<const std::size_t> cols,
                                                     std::span<const double> values) {
  if (rows.size() != cols.size() || rows.size() != values.size())
    throw ArgumentError("triplets: array lengths disagree");
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t k = 0; k < rows.size(); ++k)
    if (rows[k] >= n_rows || cols[k] >= n_cols) throw ArgumentError("triplets: index out of range");
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rows[a] != rows[b] ? rows[a] < rows[b] : cols[a] < cols[b];
  });
  std::vector<std::size_t> row_ptr(n_rows + 1, 0), col_idx;
  std::vector<double> vals;
  col_idx.reserve(order.size());
  vals.reserve(order.size());
  std::size_t last_row = n_rows, last_col = n_cols;
  for (std::size_t k : order) {
    if (rows[k] == last_row && cols[k] == last_col) {
      vals.back() += values[k];
      continue;
    }
    col_idx.push_back(cols[k]);
    vals.push_back(values[k]);
    ++row_ptr[rows[k] + 1];
    last_row = rows[k];
    last_col = cols[k];
  }
  std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
  return from_csr(n_rows, n_cols, std::move(row_ptr), std::move(col_idx), std::move(vals));
}

SparseDesignMatrix SparseDesignMatrix::from_dense(const Eigen::MatrixXd& dense, double drop_tol) {
  const auto n = static_cast<std::size_t>(dense.rows());
  const auto p = static_cast<std::size_t>(dense.cols());
  std::vector<std::size_t> row_ptr(n + 1, 0), col_idx;
  std::vector<double> vals;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      const double v = dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (std::abs(v) > drop_tol) {
        col_idx.push_back(j);
        vals.push_back(v);
      }
    }
    row_ptr[i + 1] = vals.size();
  }
  return from_csr(n, p, std::move(row_ptr), std::move(col_idx), std::move(vals));
}

Eigen::MatrixXd SparseDesignMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_rows_),
                                            static_cast<Eigen::Index>(n_cols_));
  for (std::size_t i = 0; i < n_rows_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col_idx_[k])) = values_[k];
  if (standardized()) {
    for (std::size_t j = 0; j < n_cols_; ++j) {
      auto c = d.col(static_cast<Eigen::Index>(j));
      c.array() = (c.array() - col_means_[j]) / col_scales_[j];
    }
  }
  return d;
}

SparseDesignMatrix SparseDesignMatrix::with_intercept() const {
  SparseDesignMatrix x;
  x.n_rows_ = n_rows_;
  x.n_cols_ = n_cols_ + 1;
  x.row_ptr_.assign(n_rows_ + 1, 0);
  x.col_idx_.reserve(nnz() + n_rows_);
  x.values_.reserve(nnz() + n_rows_);
  for (std::size_t i = 0; i < n_rows_; ++i) {
    x.col_idx_.push_back(0);
    x.values_.push_back(1.0);
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      x.col_idx_.push_back(col_idx_[k] + 1);
      x.values_.push_back(values_[k]);
    }
    x.row_ptr_[i + 1] = x.values_.size();
  }
  if (standardized()) {
    x.col_means_.assign(1, 0.0);
    x.col_means_.insert(x.col_means_.end(), col_means_.begin(), col_means_.end());
    x.col_scales_.assign(1, 1.0);
    x.col_scales_.insert(x.col_scales_.end(), col_scales_.begin(), col_scales_.end());
    x.constant_columns_.assign(1, false);
    x.constant_columns_.insert(x.constant_columns_.end(), constant_columns_.begin(),
                               constant_columns_.end());
  }
  return x;
}

SparseDesignMatrix standardize(const SparseDesignMatrix& x, const std::vector<bool>& exclude) {
  const std::size_t n = x.n_rows_, p = x.n_cols_;
  if (!exclude.empty() && exclude.size() != p)
    throw ArgumentError("standardize: exclusion mask length must equal n_cols");
  // Raw column sums; existing metadata is discarded and recomputed.
  std::vector<double> sum(p, 0.0), sumsq(p, 0.0);
  for (std::size_t k = 0; k < x.nnz(); ++k) {
    sum[x.col_idx_[k]] += x.values_[k];
    sumsq[x.col_idx_[k]] += x.values_[k] * x.values_[k];
  }
  SparseDesignMatrix out = x;
  out.col_means_.assign(p, 0.0);
  out.col_scales_.assign(p, 1.0);
  out.constant_columns_.assign(p, false);
  const double dn = static_cast<double>(n);
  for (std::size_t j = 0; j < p; ++j) {
    if (!exclude.empty() && exclude[j]) continue;
    const double mean = n > 0 ? sum[j] / dn : 0.0;
    // Implicit zeros contribute to n only.
    const double ss = sumsq[j] - dn * mean * mean;
    out.col_means_[j] = mean;
    const double var = n > 1 ? std::max(ss, 0.0) / (dn - 1.0) : 0.0;
    const double sd = std::sqrt(var);
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
      out.constant_columns_[j] = true;
      out.col_scales_[j] = 1.0;
    } else {
      out.col_scales_[j] = sd;
    }
  }
  return out;
}

namespace {

void check_len(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw ArgumentError(std::string(what) + ": dimension mismatch (" + std::to_string(got) +
                        " vs " + std::to_string(want) + ")");
}

}  // namespace

void matvec(const SparseDesignMatrix& x, std::span<const double> v, std::span<double> out) {
  check_len(v.size(), x.n_cols(), "matvec input");
  check_len(out.size(), x.n_rows(), "matvec output");
  ++kernel_counters().matvec;
  const auto rp = x.row_ptr();
  const auto ci = x.col_idx();
  const auto val = x.values();
  std::span<const double> u = v;
  std::vector<double> scaled;
  double shift = 0.0;
  if (x.standardized()) {
    scaled.resize(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
      scaled[j] = v[j] / x.col_scales()[j];
      shift += x.col_means()[j] * scaled[j];
    }
    u = scaled;
  }
  parallel_chunks(x.n_rows(), [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double acc = 0.0;
      for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) acc += val[k] * u[ci[k]];
      out[i] = acc - shift;
    }
  });
}

std::vector<double> matvec(const SparseDesignMatrix& x, std::span<const double> v) {
  std::vector<double> out(x.n_rows());
  matvec(x, v, out);
  return out;
}

void matvec_t(const SparseDesignMatrix& x, std::span<const double> w, std::span<double> out) {
  check_len(w.size(), x.n_rows(), "matvec_t input");
  check_len(out.size(), x.n_cols(), "matvec_t output");
  ++kernel_counters().matvec_t;
  const auto rp = x.row_ptr();
  const auto ci = x.col_idx();
  const auto val = x.values();
  const std::size_t p = x.n_cols();
  const std::size_t chunks = std::min(num_threads(), std::max<std::size_t>(1, x.n_rows()));
  std::fill(out.begin(), out.end(), 0.0);
  if (chunks <= 1) {
    for (std::size_t i = 0; i < x.n_rows(); ++i)
      for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) out[ci[k]] += val[k] * w[i];
  } else {
    std::vector<std::vector<double>> partial(chunks);
    parallel_chunks(x.n_rows(), [&](std::size_t c, std::size_t begin, std::size_t end) {
      auto& buf = partial[c];
      buf.assign(p, 0.0);
      for (std::size_t i = begin; i < end; ++i)
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) buf[ci[k]] += val[k] * w[i];
    });
    for (const auto& buf : partial)
      for (std::size_t j = 0; j < buf.size(); ++j) out[j] += buf[j];
  }
  if (x.standardized()) {
    double wsum = 0.0;
    for (double wi : w) wsum += wi;
    for (std::size_t j = 0; j < p; ++j)
      out[j] = (out[j] - x.col_means()[j] * wsum) / x.col_scales()[j];
  }
}

std::vector<double> matvec_t(const SparseDesignMatrix& x, std::span<const double> w) {
  std::vector<double> out(x.n_cols());
  matvec_t(x, w, out);
  return out;
}

std::vector<double> gram_diagonal(const SparseDesignMatrix& x, std::span<const double> omega) {
  check_len(omega.size(), x.n_rows(), "gram_diagonal weights");
  const auto rp = x.row_ptr();
  const auto ci = x.col_idx();
  const auto val = x.values();
  std::vector<double> d(x.n_cols(), 0.0);
  std::vector<double> cross;
  if (x.standardized()) cross.assign(x.n_cols(), 0.0);
  for (std::size_t i = 0; i < x.n_rows(); ++i) {
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
      d[ci[k]] += omega[i] * val[k] * val[k];
      if (!cross.empty()) cross[ci[k]] += omega[i] * val[k];
    }
  }
  if (x.standardized()) {
    double wsum = 0.0;
    for (double w : omega) wsum += w;
    for (std::size_t j = 0; j < d.size(); ++j) {
      const double m = x.col_means()[j], s = x.col_scales()[j];
      d[j] = (d[j] - 2.0 * m * cross[j] + m * m * wsum) / (s * s);
    }
  }
  return d;
}

DenseSymmetric weighted_gram(const SparseDesignMatrix& x, std::span<const double> omega) {
  check_len(omega.size(), x.n_rows(), "weighted_gram weights");
  require_dense(x.n_cols(), "weighted_gram");
  ++kernel_counters().weighted_gram;
  for (double w : omega)
    if (!(w >= 0.0)) throw ArgumentError("weighted_gram: weights must be nonnegative");

  const auto n = x.n_rows();
  const auto p = static_cast<Eigen::Index>(x.n_cols());
  const auto rp = x.row_ptr();
  const auto ci = x.col_idx();
  const auto val = x.values();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(p, p);

  const double density =
      n == 0 || p == 0 ? 0.0 : static_cast<double>(x.nnz()) / (static_cast<double>(n) * p);
  if (density > 0.05) {
    // Dense rows: stream blocks of √ω-weighted rows through a rank-k update.
    constexpr std::size_t kBlock = 512;
    Eigen::MatrixXd block;
    for (std::size_t start = 0; start < n; start += kBlock) {
      const std::size_t rows = std::min(kBlock, n - start);
      block.setZero(static_cast<Eigen::Index>(rows), p);
      for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t i = start + r;
        const double sw = std::sqrt(omega[i]);
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k)
          block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(ci[k])) = sw * val[k];
      }
      g.selfadjointView<Eigen::Lower>().rankUpdate(block.transpose());
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t a = rp[i]; a < rp[i + 1]; ++a) {
        const double wa = omega[i] * val[a];
        for (std::size_t b = rp[i]; b <= a; ++b)
          g(static_cast<Eigen::Index>(ci[a]), static_cast<Eigen::Index>(ci[b])) += wa * val[b];
      }
    }
  }
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();

  if (x.standardized()) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(p);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = rp[i]; k < rp[i + 1]; ++k)
        a(static_cast<Eigen::Index>(ci[k])) += omega[i] * val[k];
    double wsum = 0.0;
    for (double w : omega) wsum += w;
    const Eigen::Map<const Eigen::VectorXd> m(x.col_means().data(), p);
    const Eigen::Map<const Eigen::VectorXd> s(x.col_scales().data(), p);
    g -= m * a.transpose() + a * m.transpose();
    g += wsum * m * m.transpose();
    const Eigen::VectorXd inv = s.cwiseInverse();
    g = inv.asDiagonal() * g * inv.asDiagonal();
    g = 0.5 * (g + g.transpose()).eval();
  }
  DenseSymmetric out;
  out.values = std::move(g);
  return out;
}

Eigen::MatrixXd dense_columns(const SparseDesignMatrix& x, std::span<const std::size_t> cols) {
  std::unordered_map<std::size_t, Eigen::Index> pos;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c] >= x.n_cols()) throw ArgumentError("dense_columns: column out of range");
    pos.emplace(cols[c], static_cast<Eigen::Index>(c));
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(x.n_rows()),
                                              static_cast<Eigen::Index>(cols.size()));
  const auto rp = x.row_ptr();
  const auto ci = x.col_idx();
  const auto val = x.values();
  for (std::size_t i = 0; i < x.n_rows(); ++i)
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k)
      if (auto it = pos.find(ci[k]); it != pos.end())
        out(static_cast<Eigen::Index>(i), it->second) = val[k];
  if (x.standardized()) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      auto col = out.col(static_cast<Eigen::Index>(c));
      col.array() = (col.array() - x.col_means()[cols[c]]) / x.col_scales()[cols[c]];
    }
  }
  return out;
}

}  // namespace pcgs
