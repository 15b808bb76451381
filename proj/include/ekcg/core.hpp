#pragma once

// Dense block and sparse SPD primitives shared by every solver component.
//
// Dense data uses plain Eigen column-major types; the only owned type here is
// SparseSpdMatrix, which wraps a row-major Eigen sparse matrix and validates
// symmetry and a positive diagonal at construction.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "ekcg/errors.hpp"

namespace ekcg {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// n x m column block (W_k, P_k, V_k, retained bases, split residuals).
template <typename Scalar>
using Block = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Small dense matrices: Gram matrices, step coefficients, Cholesky factors.
template <typename Scalar>
using SmallDense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct Triplet {
  Index row;
  Index col;
  Scalar value;
};

/// Symmetric positive definite operator in full (both triangles) CSR storage.
template <typename ScalarT>
class SparseSpdMatrix {
 public:
  using Scalar = ScalarT;
  using CsrMatrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor, int>;

  SparseSpdMatrix() = default;

  /// Takes ownership of an Eigen sparse matrix and validates it.
  explicit SparseSpdMatrix(CsrMatrix m) : csr_(std::move(m)) {
    csr_.makeCompressed();
    validate();
  }

  /// Builds from coordinate entries; duplicates are summed.
  static SparseSpdMatrix from_triplets(Index n, const std::vector<Triplet<Scalar>>& entries) {
    std::vector<Eigen::Triplet<Scalar, int>> trip;
    trip.reserve(entries.size());
    for (const auto& e : entries) {
      if (e.row < 0 || e.row >= n || e.col < 0 || e.col >= n)
        throw InvalidArgument("triplet index out of range");
      trip.emplace_back(static_cast<int>(e.row), static_cast<int>(e.col), e.value);
    }
    CsrMatrix m(n, n);
    m.setFromTriplets(trip.begin(), trip.end());
    return SparseSpdMatrix(std::move(m));
  }

  /// Builds from raw CSR arrays; rows must have sorted, in-range columns.
  static SparseSpdMatrix from_csr(Index n, std::vector<int> row_ptr, std::vector<int> col_idx,
                                  std::vector<Scalar> values) {
    if (static_cast<Index>(row_ptr.size()) != n + 1 || row_ptr.front() != 0)
      throw InvalidArgument("row_ptr must have n+1 entries starting at 0");
    if (col_idx.size() != values.size() || static_cast<std::size_t>(row_ptr.back()) != values.size())
      throw InvalidArgument("row_ptr, col_idx and values disagree on nonzero count");
    for (Index i = 0; i < n; ++i) {
      if (row_ptr[i + 1] < row_ptr[i]) throw InvalidArgument("row_ptr not monotone");
      for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
        if (col_idx[p] < 0 || col_idx[p] >= n) throw InvalidArgument("column index out of range");
        if (p > row_ptr[i] && col_idx[p] <= col_idx[p - 1])
          throw InvalidArgument("column indices not strictly increasing within a row");
      }
    }
    const auto nnz = static_cast<Index>(values.size());
    Eigen::Map<const CsrMatrix> view(n, n, nnz, row_ptr.data(), col_idx.data(), values.data());
    return SparseSpdMatrix(CsrMatrix(view));
  }

  Index rows() const { return csr_.rows(); }
  Index cols() const { return csr_.cols(); }
  Index nonzeros() const { return csr_.nonZeros(); }

  const CsrMatrix& csr() const { return csr_; }
  const int* row_ptr() const { return csr_.outerIndexPtr(); }
  const int* col_idx() const { return csr_.innerIndexPtr(); }
  const Scalar* values() const { return csr_.valuePtr(); }

  /// Y = A X.
  Block<Scalar> apply(const Block<Scalar>& x) const;

  Block<Scalar> to_dense() const { return Block<Scalar>(csr_); }

  Vector<Scalar> diagonal() const { return csr_.diagonal(); }

  friend bool operator==(const SparseSpdMatrix& a, const SparseSpdMatrix& b) {
    if (a.rows() != b.rows() || a.nonzeros() != b.nonzeros()) return false;
    return std::equal(a.row_ptr(), a.row_ptr() + a.rows() + 1, b.row_ptr()) &&
           std::equal(a.col_idx(), a.col_idx() + a.nonzeros(), b.col_idx()) &&
           std::equal(a.values(), a.values() + a.nonzeros(), b.values());
  }

 private:
  void validate() const {
    if (csr_.rows() != csr_.cols()) throw InvalidArgument("matrix must be square");
    const Index n = csr_.rows();
    const int* rp = row_ptr();
    const int* ci = col_idx();
    const Scalar* v = values();
    for (Index i = 0; i < n; ++i) {
      bool has_diag = false;
      for (int p = rp[i]; p < rp[i + 1]; ++p) {
        const Index j = ci[p];
        if (!std::isfinite(static_cast<double>(v[p]))) throw InvalidArgument("non-finite matrix entry");
        if (j == i) {
          has_diag = true;
          if (!(v[p] > Scalar(0)))
            throw InvalidArgument("nonpositive diagonal at row " + std::to_string(i));
          continue;
        }
        // (j, i) must be stored with exactly the same value.
        const int* first = ci + rp[j];
        const int* last = ci + rp[j + 1];
        const int* hit = std::lower_bound(first, last, static_cast<int>(i));
        if (hit == last || *hit != i || v[hit - ci] != v[p])
          throw InvalidArgument("matrix is not symmetric at (" + std::to_string(i) + ", " +
                                std::to_string(j) + ")");
      }
      if (!has_diag) throw InvalidArgument("missing diagonal at row " + std::to_string(i));
    }
  }

  CsrMatrix csr_;
};

template <typename Scalar>
Vector<Scalar> spmv(const SparseSpdMatrix<Scalar>& a, const Vector<Scalar>& x) {
  if (x.size() != a.rows()) throw DimensionMismatch("spmv: vector length does not match matrix");
  const int* rp = a.row_ptr();
  const int* ci = a.col_idx();
  const Scalar* v = a.values();
  Vector<Scalar> y(a.rows());
  for (Index i = 0; i < a.rows(); ++i) {
    Scalar s(0);
    for (int p = rp[i]; p < rp[i + 1]; ++p) s += v[p] * x[ci[p]];
    y[i] = s;
  }
  return y;
}

template <typename Scalar>
Block<Scalar> spmm(const SparseSpdMatrix<Scalar>& a, const Block<Scalar>& x) {
  if (x.rows() != a.rows()) throw DimensionMismatch("spmm: block rows do not match matrix");
  const int* rp = a.row_ptr();
  const int* ci = a.col_idx();
  const Scalar* v = a.values();
  Block<Scalar> y(a.rows(), x.cols());
  for (Index c = 0; c < x.cols(); ++c) {
    const Scalar* xc = x.col(c).data();
    Scalar* yc = y.col(c).data();
    for (Index i = 0; i < a.rows(); ++i) {
      Scalar s(0);
      for (int p = rp[i]; p < rp[i + 1]; ++p) s += v[p] * xc[ci[p]];
      yc[i] = s;
    }
  }
  return y;
}

template <typename T>
Block<T> SparseSpdMatrix<T>::apply(const Block<T>& x) const {
  return spmm(*this, x);
}

/// Xᵀ Y.
template <typename DerivedX, typename DerivedY>
auto gram(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  if (x.rows() != y.rows()) throw DimensionMismatch("gram: row counts differ");
  SmallDense<Scalar> g = x.transpose() * y;
  return g;
}

/// Upper-triangular R with B = RᵀR and a positive diagonal.
///
/// Throws Breakdown when a pivot falls to or below breakdown_tol times the
/// largest diagonal entry of B.
template <typename Derived>
auto cholesky_small(const Eigen::MatrixBase<Derived>& b, double breakdown_tol = 1e-14) {
  using Scalar = typename Derived::Scalar;
  if (b.rows() != b.cols()) throw DimensionMismatch("cholesky_small: matrix is not square");
  const Index m = b.rows();
  SmallDense<Scalar> r = SmallDense<Scalar>::Zero(m, m);
  if (m == 0) return r;
  const Scalar scale = b.diagonal().cwiseAbs().maxCoeff();
  const Scalar floor = Scalar(breakdown_tol) * scale;
  for (Index j = 0; j < m; ++j) {
    Scalar d = b(j, j) - r.col(j).head(j).squaredNorm();
    if (!(d > floor) || scale == Scalar(0))
      throw Breakdown("cholesky_small: pivot " + std::to_string(j) + " below breakdown tolerance", j);
    const Scalar rjj = std::sqrt(d);
    r(j, j) = rjj;
    for (Index c = j + 1; c < m; ++c)
      r(j, c) = (b(j, c) - r.col(j).head(j).dot(r.col(c).head(j))) / rjj;
  }
  return r;
}

/// X R⁻¹ for upper-triangular R.
template <typename Scalar>
Block<Scalar> trsm_right_inv(const Block<Scalar>& x, const SmallDense<Scalar>& r) {
  if (r.rows() != r.cols() || r.rows() != x.cols())
    throw DimensionMismatch("trsm_right_inv: factor does not match block width");
  for (Index i = 0; i < r.rows(); ++i)
    if (r(i, i) == Scalar(0)) throw Breakdown("trsm_right_inv: singular triangular factor", i);
  Block<Scalar> out = x;
  r.template triangularView<Eigen::Upper>().template solveInPlace<Eigen::OnTheRight>(out);
  return out;
}

template <typename Derived>
auto norm2(const Eigen::MatrixBase<Derived>& v) {
  return v.norm();
}

/// Y += X·C (block axpy).
template <typename Scalar>
void block_axpy(Block<Scalar>& y, const Block<Scalar>& x, const SmallDense<Scalar>& c) {
  if (y.rows() != x.rows() || x.cols() != c.rows() || y.cols() != c.cols())
    throw DimensionMismatch("block_axpy: shapes disagree");
  y.noalias() += x * c;
}

/// Max-abs entry of XᵀY − I; the A-orthonormality defect when Y = A X.
template <typename Scalar>
Scalar orthonormality_defect(const Block<Scalar>& x, const Block<Scalar>& ax) {
  SmallDense<Scalar> g = gram(x, ax);
  g -= SmallDense<Scalar>::Identity(g.rows(), g.cols());
  return g.size() == 0 ? Scalar(0) : g.cwiseAbs().maxCoeff();
}

}  // namespace ekcg
