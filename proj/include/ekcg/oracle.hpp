#pragma once

// Dense brute-force references for desk-scale instances: materialized
// enlarged Krylov bases, affine energy minimizers over a given basis, and
// span comparisons. Nothing here shares code with the iterative solvers.

#include <Eigen/QR>

#include "ekcg/core.hpp"
#include "ekcg/partition.hpp"

namespace ekcg::oracle {

inline constexpr Index kMaxDenseSize = 500;

/// Columns A^i T_j(r0) for i = 0..k-1, j = 1..t, no orthogonalization.
template <typename Scalar>
Block<Scalar> dense_enlarged_basis(const Block<Scalar>& a, const Vector<Scalar>& r0, const Partition& p, int k) {
  const Index n = a.rows();
  if (n > kMaxDenseSize) throw InvalidArgument("dense_enlarged_basis: n exceeds the desk-scale limit");
  if (k < 1 || static_cast<Index>(k) * p.count() > n)
    throw InvalidArgument("dense_enlarged_basis: need 1 <= k and k*t <= n");
  if (r0.size() != n || p.size() != n) throw DimensionMismatch("dense_enlarged_basis: sizes differ");
  const Index t = p.count();
  Block<Scalar> basis(n, k * t);
  Block<Scalar> power = project_t(r0, p);
  for (int i = 0; i < k; ++i) {
    basis.middleCols(i * t, t) = power;
    if (i + 1 < k) power = a * power;
  }
  return basis;
}

template <typename Scalar>
Block<Scalar> dense_enlarged_basis(const SparseSpdMatrix<Scalar>& a, const Vector<Scalar>& r0, const Partition& p,
                                   int k) {
  if (a.rows() > kMaxDenseSize) throw InvalidArgument("dense_enlarged_basis: n exceeds the desk-scale limit");
  return dense_enlarged_basis(a.to_dense(), r0, p, k);
}

/// Orthonormal basis of span(B) after dropping numerically dependent columns.
///
/// Columns are scaled to unit norm first; a column is kept while the pivoted
/// QR diagonal stays above pivot_tol times the leading one.
template <typename Scalar>
Block<Scalar> orthonormal_span(const Block<Scalar>& b, double pivot_tol = 1e-12) {
  Block<Scalar> scaled = b;
  for (Index c = 0; c < scaled.cols(); ++c) {
    const Scalar nrm = scaled.col(c).norm();
    if (nrm > Scalar(0)) scaled.col(c) /= nrm;
  }
  Eigen::ColPivHouseholderQR<Block<Scalar>> qr(scaled);
  qr.setThreshold(pivot_tol);
  const Index rank = qr.rank();
  Block<Scalar> q = qr.householderQ() * Block<Scalar>::Identity(b.rows(), rank);
  return q;
}

/// Orthonormal basis of the same enlarged space built by dense block Arnoldi
/// (Euclidean, pivoted Householder QR per step, two projection passes).
/// Stays accurate where the raw power basis is too ill-conditioned.
template <typename Scalar>
Block<Scalar> orthonormal_enlarged_basis(const Block<Scalar>& a, const Vector<Scalar>& r0, const Partition& p, int k,
                                         double pivot_tol = 1e-12) {
  const Index n = a.rows();
  if (n > kMaxDenseSize) throw InvalidArgument("orthonormal_enlarged_basis: n exceeds the desk-scale limit");
  if (k < 1 || static_cast<Index>(k) * p.count() > n)
    throw InvalidArgument("orthonormal_enlarged_basis: need 1 <= k and k*t <= n");
  if (r0.size() != n || p.size() != n) throw DimensionMismatch("orthonormal_enlarged_basis: sizes differ");
  Block<Scalar> v = orthonormal_span(Block<Scalar>(project_t(r0, p)), pivot_tol);
  Block<Scalar> basis = v;
  for (int i = 1; i < k && v.cols() > 0; ++i) {
    Block<Scalar> w = a * v;
    for (int pass = 0; pass < 2; ++pass) w -= basis * (basis.transpose() * w);
    // Drop directions that were already (numerically) in the basis.
    Block<Scalar> kept(n, 0);
    for (Index c = 0; c < w.cols(); ++c)
      if (w.col(c).norm() > pivot_tol * (a * v.col(c)).norm()) {
        kept.conservativeResize(Eigen::NoChange, kept.cols() + 1);
        kept.rightCols(1) = w.col(c);
      }
    v = kept.cols() ? orthonormal_span(kept, pivot_tol) : kept;
    if (v.cols()) {
      v -= basis * (basis.transpose() * v);
      v = orthonormal_span(v, pivot_tol);
    }
    basis.conservativeResize(Eigen::NoChange, basis.cols() + v.cols());
    basis.rightCols(v.cols()) = v;
  }
  return basis;
}

template <typename Scalar>
Block<Scalar> orthonormal_enlarged_basis(const SparseSpdMatrix<Scalar>& a, const Vector<Scalar>& r0,
                                         const Partition& p, int k) {
  if (a.rows() > kMaxDenseSize) throw InvalidArgument("orthonormal_enlarged_basis: n exceeds the desk-scale limit");
  return orthonormal_enlarged_basis(a.to_dense(), r0, p, k);
}

/// The minimizer of 1/2 xᵀAx − xᵀb over x0 + span(B).
template <typename Scalar>
Vector<Scalar> projection_solution(const Block<Scalar>& a, const Vector<Scalar>& b, const Vector<Scalar>& x0,
                                   const Block<Scalar>& basis) {
  if (a.rows() != basis.rows() || b.size() != a.rows() || x0.size() != a.rows())
    throw DimensionMismatch("projection_solution: sizes differ");
  const Block<Scalar> q = orthonormal_span(basis);
  if (q.cols() == 0) throw InvalidArgument("projection_solution: basis has no independent columns");
  const Vector<Scalar> r0 = b - a * x0;
  const Block<Scalar> reduced = q.transpose() * a * q;
  const Vector<Scalar> coeff = reduced.partialPivLu().solve(q.transpose() * r0);
  return x0 + q * coeff;
}

template <typename Scalar>
Vector<Scalar> projection_solution(const SparseSpdMatrix<Scalar>& a, const Vector<Scalar>& b,
                                   const Vector<Scalar>& x0, const Block<Scalar>& basis) {
  return projection_solution(a.to_dense(), b, x0, basis);
}

/// Largest relative residual of projecting the columns of `from` onto span(onto).
template <typename Scalar>
Scalar max_projection_residual(const Block<Scalar>& from, const Block<Scalar>& onto) {
  if (from.rows() != onto.rows()) throw DimensionMismatch("max_projection_residual: row counts differ");
  const Block<Scalar> q = orthonormal_span(onto);
  Scalar worst(0);
  for (Index c = 0; c < from.cols(); ++c) {
    const Scalar nrm = from.col(c).norm();
    if (nrm == Scalar(0)) continue;
    const Vector<Scalar> residual = from.col(c) - q * (q.transpose() * from.col(c));
    worst = std::max(worst, residual.norm() / nrm);
  }
  return worst;
}

/// True when span(B1) ⊆ span(B2) at relative tolerance `tol`.
template <typename Scalar>
bool span_contains(const Block<Scalar>& b2, const Block<Scalar>& b1, double tol) {
  return max_projection_residual(b1, b2) <= Scalar(tol);
}

/// True when each span contains the other at relative tolerance `tol`.
template <typename Scalar>
bool span_equal(const Block<Scalar>& b1, const Block<Scalar>& b2, double tol) {
  if (b1.rows() != b2.rows()) throw DimensionMismatch("span_equal: row counts differ");
  return span_contains(b2, b1, tol) && span_contains(b1, b2, tol);
}

/// Classical Krylov basis [v, Av, ..., A^{k-1} v].
template <typename Scalar>
Block<Scalar> dense_krylov_basis(const Block<Scalar>& a, const Vector<Scalar>& v, int k) {
  Block<Scalar> basis(a.rows(), k);
  Vector<Scalar> w = v;
  for (int i = 0; i < k; ++i) {
    basis.col(i) = w;
    if (i + 1 < k) w = a * w;
  }
  return basis;
}

}  // namespace ekcg::oracle
