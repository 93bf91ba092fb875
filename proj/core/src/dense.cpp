#include "pcgs/dense.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "pcgs/errors.hpp"

namespace pcgs {
namespace {
std::atomic<std::size_t> g_dense_cap{5000};
}

DenseSymmetric::DenseSymmetric(Eigen::MatrixXd m) : values(std::move(m)) {
  if (values.rows() != values.cols()) throw ArgumentError("DenseSymmetric: matrix is not square");
  const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
  if ((values - values.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ArgumentError("DenseSymmetric: matrix is not symmetric");
  values = 0.5 * (values + values.transpose()).eval();
}

std::size_t dense_cap() { return g_dense_cap.load(); }
void set_dense_cap(std::size_t cap) { g_dense_cap = cap; }

void require_dense(std::size_t dim, const char* what) {
  if (dim > dense_cap())
    throw ResourceError(std::string(what) + ": dimension " + std::to_string(dim) +
                        " exceeds the dense cap of " + std::to_string(dense_cap()) +
                        "; use the matrix-free CG path instead");
}

Eigen::MatrixXd cholesky(const DenseSymmetric& a) {
  require_dense(a.dim(), "cholesky");
  Eigen::LLT<Eigen::MatrixXd> llt(a.values);
  if (llt.info() != Eigen::Success) throw NotPositiveDefiniteError("cholesky: non-positive pivot");
  Eigen::MatrixXd l = llt.matrixL();
  if (!l.allFinite()) throw NotPositiveDefiniteError("cholesky: non-finite factor");
  return l;
}

std::vector<double> sym_eigenvalues(const DenseSymmetric& a) {
  require_dense(a.dim(), "sym_eigenvalues");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.values, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericBreakdownError("sym_eigenvalues: no convergence", 0);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + a.dim());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

}  // namespace pcgs
