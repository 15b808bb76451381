#pragma once

// Independent reference implementations used by the tests. Everything here is
// written with dense loops or Eigen dense decompositions and shares no code
// with the library kernels under test.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

#include "ekcg/core.hpp"

namespace support {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline Mat random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& eng) {
  std::normal_distribution<double> d(0.0, 1.0);
  Mat m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = d(eng);
  return m;
}

inline Vec random_vector(Eigen::Index n, std::mt19937_64& eng) { return random_matrix(n, 1, eng).col(0); }

/// Q diag(λ) Qᵀ with λ uniform in [lo, hi] and Haar-like Q.
inline Mat random_spd(Eigen::Index n, std::mt19937_64& eng, double lo = 1.0, double hi = 10.0) {
  Eigen::HouseholderQR<Mat> qr(random_matrix(n, n, eng));
  const Mat q = qr.householderQ();
  std::uniform_real_distribution<double> u(lo, hi);
  Vec lambda(n);
  for (Eigen::Index i = 0; i < n; ++i) lambda[i] = u(eng);
  Mat a = q * lambda.asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

inline ekcg::SparseSpdMatrix<double> to_sparse(const Mat& a) {
  std::vector<ekcg::Triplet<double>> t;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0.0) t.push_back({i, j, a(i, j)});
  return ekcg::SparseSpdMatrix<double>::from_triplets(a.rows(), t);
}

/// Textbook CG on a dense matrix; returns the residual norms rho_0..rho_k.
inline std::vector<double> dense_cg_history(const Mat& a, const Vec& b, int iters, double tol = 0.0) {
  Vec x = Vec::Zero(b.size());
  Vec r = b;
  Vec p = r;
  double rr = r.dot(r);
  std::vector<double> h{std::sqrt(rr)};
  for (int k = 0; k < iters && std::sqrt(rr) > tol * h.front(); ++k) {
    const Vec ap = a * p;
    const double alpha = rr / p.dot(ap);
    x += alpha * p;
    r -= alpha * ap;
    const double rr_next = r.dot(r);
    p = r + (rr_next / rr) * p;
    rr = rr_next;
    h.push_back(std::sqrt(rr));
  }
  return h;
}

/// Dense IC(0): the usual i-k-j loop with updates restricted to the pattern of
/// lower(A). Returns lower-triangular L.
inline Mat dense_ic0(const Mat& a) {
  const Eigen::Index n = a.rows();
  Mat l = a.triangularView<Eigen::Lower>();
  for (Eigen::Index k = 0; k < n; ++k) {
    l(k, k) = std::sqrt(l(k, k));
    for (Eigen::Index i = k + 1; i < n; ++i)
      if (a(i, k) != 0.0) l(i, k) /= l(k, k);
    for (Eigen::Index j = k + 1; j < n; ++j)
      for (Eigen::Index i = j; i < n; ++i)
        if (a(i, j) != 0.0) l(i, j) -= l(i, k) * l(j, k);
  }
  return l;
}

/// Two-pass classical Gram-Schmidt against Euclidean-orthonormal Q.
inline Mat dense_cgs2(const Mat& q, Mat w) {
  for (int pass = 0; pass < 2; ++pass)
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      Vec coeff(q.cols());
      for (Eigen::Index j = 0; j < q.cols(); ++j) coeff[j] = q.col(j).dot(w.col(c));
      for (Eigen::Index j = 0; j < q.cols(); ++j) w.col(c) -= coeff[j] * q.col(j);
    }
  return w;
}

inline double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

/// Orthogonal projector onto span(W) via SVD.
inline Mat projector(const Mat& w) {
  Eigen::JacobiSVD<Mat> svd(w, Eigen::ComputeThinU);
  const Mat u = svd.matrixU();
  return u * u.transpose();
}

}  // namespace support
