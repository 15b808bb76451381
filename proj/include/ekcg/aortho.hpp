#pragma once

// Block orthonormalization in the inner product induced by an SPD operator.
//
// Operators are anything with rows() and apply(Block) -> Block; both the
// sparse matrix and the implicit split-preconditioned operator qualify.

#include <concepts>

#include "ekcg/core.hpp"

namespace ekcg {

template <typename Op>
concept SpdOperator = requires(const Op& op, const Block<typename Op::Scalar>& x) {
  typename Op::Scalar;
  { op.rows() } -> std::convertible_to<Index>;
  { op.apply(x) } -> std::convertible_to<Block<typename Op::Scalar>>;
};

/// Two passes of block classical Gram-Schmidt: W ← W − Q(QᵀAW).
///
/// Q must be A-orthonormal. An empty Q returns W unchanged.
template <SpdOperator Op>
Block<typename Op::Scalar> a_orthogonalize_against(const Op& a, Block<typename Op::Scalar> w,
                                                    const Block<typename Op::Scalar>& q) {
  if (w.rows() != a.rows() || (q.cols() > 0 && q.rows() != a.rows()))
    throw DimensionMismatch("a_orthogonalize_against: row counts differ");
  if (q.cols() == 0 || w.cols() == 0) return w;
  for (int pass = 0; pass < 2; ++pass) {
    const Block<typename Op::Scalar> aw = a.apply(w);
    w.noalias() -= q * gram(q, aw);
  }
  return w;
}

/// Same projection using a cached A·Q, so no operator applications occur.
template <typename Scalar>
Block<Scalar> a_orthogonalize_against_cached(Block<Scalar> w, const Block<Scalar>& q,
                                             const Block<Scalar>& aq) {
  if (q.cols() != aq.cols() || q.rows() != aq.rows())
    throw DimensionMismatch("a_orthogonalize_against_cached: Q and AQ shapes differ");
  if (q.cols() > 0 && q.rows() != w.rows())
    throw DimensionMismatch("a_orthogonalize_against_cached: row counts differ");
  if (q.cols() == 0 || w.cols() == 0) return w;
  for (int pass = 0; pass < 2; ++pass) w.noalias() -= q * gram(aq, w);
  return w;
}

/// A-CholQR: W R⁻¹ with RᵀR = WᵀAW.
template <SpdOperator Op>
Block<typename Op::Scalar> a_cholqr(const Op& a, const Block<typename Op::Scalar>& w,
                                    double breakdown_tol = 1e-14) {
  using Scalar = typename Op::Scalar;
  if (w.rows() != a.rows()) throw DimensionMismatch("a_cholqr: row counts differ");
  SmallDense<Scalar> g = gram(w, a.apply(w));
  g = Scalar(0.5) * (g + g.transpose()).eval();
  const SmallDense<Scalar> r = cholesky_small(g, breakdown_tol);
  return trsm_right_inv(w, r);
}

/// Euclidean CholQR followed by A-CholQR.
///
/// Columns are normalized before the Euclidean step, which makes the result
/// insensitive to column scaling of W.
template <SpdOperator Op>
Block<typename Op::Scalar> pre_cholqr(const Op& a, const Block<typename Op::Scalar>& w,
                                      double breakdown_tol = 1e-14) {
  using Scalar = typename Op::Scalar;
  if (w.rows() != a.rows()) throw DimensionMismatch("pre_cholqr: row counts differ");
  Block<Scalar> u = w;
  for (Index c = 0; c < u.cols(); ++c) {
    const Scalar nrm = u.col(c).norm();
    if (!(nrm > Scalar(0))) throw Breakdown("pre_cholqr: zero column " + std::to_string(c), c);
    u.col(c) /= nrm;
  }
  SmallDense<Scalar> g = gram(u, u);
  g = Scalar(0.5) * (g + g.transpose()).eval();
  u = trsm_right_inv(u, cholesky_small(g, breakdown_tol));
  return a_cholqr(a, u, breakdown_tol);
}

}  // namespace ekcg
