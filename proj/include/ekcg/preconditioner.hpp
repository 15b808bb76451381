#pragma once

// Block-Jacobi split preconditioner M = L Lᵀ with block-diagonal lower
// triangular L. Each diagonal block of A is factored independently, either
// exactly (sparse Cholesky in natural ordering) or by zero fill-in incomplete
// Cholesky on the lower-triangular pattern of the block.

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <string>
#include <vector>

#include "ekcg/core.hpp"
#include "ekcg/partition.hpp"

namespace ekcg {

enum class FactorKind { ExactCholesky, IncompleteCholesky0 };

inline const char* to_string(FactorKind k) {
  return k == FactorKind::ExactCholesky ? "bj-chol" : "bj-ichol0";
}

struct BlockJacobiOptions {
  /// Retry a failed IC(0) block with A_i + σI, σ = 1e-8·max diag, doubling σ
  /// at most three times. Exact Cholesky never shifts.
  bool shift_on_breakdown = false;
};

template <typename ScalarT>
struct BlockJacobiFactor {
  using Scalar = ScalarT;
  using LowerFactor = Eigen::SparseMatrix<Scalar, Eigen::ColMajor, int>;

  FactorKind kind = FactorKind::ExactCholesky;
  /// Block b covers rows [bounds[b], bounds[b+1]).
  std::vector<Index> bounds;
  std::vector<LowerFactor> factors;
  /// Diagonal shift that was needed for each block (0 when none).
  std::vector<Scalar> shifts;

  Index rows() const { return bounds.empty() ? 0 : bounds.back(); }
  int block_count() const { return static_cast<int>(factors.size()); }
  Index block_begin(int b) const { return bounds[static_cast<std::size_t>(b)]; }
  Index block_size(int b) const {
    return bounds[static_cast<std::size_t>(b) + 1] - bounds[static_cast<std::size_t>(b)];
  }

  /// The blocks viewed as a contiguous partition.
  Partition as_partition() const {
    std::vector<int> owner(static_cast<std::size_t>(rows()));
    for (int b = 0; b < block_count(); ++b)
      std::fill(owner.begin() + block_begin(b), owner.begin() + block_begin(b) + block_size(b), b);
    return Partition(std::move(owner), block_count());
  }
};

/// Bounds of nb consecutive blocks, sizes differing by at most one.
inline std::vector<Index> even_block_bounds(Index n, int nb) {
  const Partition p = contiguous_partition(n, nb);
  std::vector<Index> bounds{0};
  for (int b = 0; b < nb; ++b) bounds.push_back(bounds.back() + static_cast<Index>(p.members(b).size()));
  return bounds;
}

namespace detail {

template <typename Scalar>
Eigen::SparseMatrix<Scalar, Eigen::ColMajor, int> lower_diagonal_block(const SparseSpdMatrix<Scalar>& a, Index begin,
                                                                       Index end) {
  std::vector<Eigen::Triplet<Scalar, int>> trip;
  const int* rp = a.row_ptr();
  const int* ci = a.col_idx();
  const Scalar* v = a.values();
  for (Index i = begin; i < end; ++i)
    for (int p = rp[i]; p < rp[i + 1]; ++p)
      if (ci[p] >= begin && ci[p] <= i)
        trip.emplace_back(static_cast<int>(i - begin), static_cast<int>(ci[p] - begin), v[p]);
  Eigen::SparseMatrix<Scalar, Eigen::ColMajor, int> lower(end - begin, end - begin);
  lower.setFromTriplets(trip.begin(), trip.end());
  lower.makeCompressed();
  return lower;
}

// Right-looking IC(0) in place on a compressed CSC lower-triangular matrix
// whose columns start with the diagonal. Returns the failing pivot or -1.
template <typename Scalar>
Index ichol0_in_place(Eigen::SparseMatrix<Scalar, Eigen::ColMajor, int>& l) {
  const Index m = l.cols();
  const int* cp = l.outerIndexPtr();
  const int* ri = l.innerIndexPtr();
  Scalar* v = l.valuePtr();
  for (Index k = 0; k < m; ++k) {
    const int kb = cp[k];
    const int ke = cp[k + 1];
    if (kb == ke || ri[kb] != k || !(v[kb] > Scalar(0))) return k;
    const Scalar d = std::sqrt(v[kb]);
    v[kb] = d;
    for (int p = kb + 1; p < ke; ++p) v[p] /= d;
    // Schur update restricted to the existing pattern.
    for (int pj = kb + 1; pj < ke; ++pj) {
      const int j = ri[pj];
      const Scalar ljk = v[pj];
      int q = cp[j];
      const int qe = cp[j + 1];
      for (int pi = pj; pi < ke; ++pi) {
        const int i = ri[pi];
        while (q < qe && ri[q] < i) ++q;
        if (q == qe) break;
        if (ri[q] == i) v[q] -= v[pi] * ljk;
      }
    }
  }
  return -1;
}

}  // namespace detail

/// Factors each diagonal block of A delimited by `bounds`.
///
/// Throws Breakdown (with the block index) when a block cannot be factored.
template <typename Scalar>
BlockJacobiFactor<Scalar> build_bj(const SparseSpdMatrix<Scalar>& a, const std::vector<Index>& bounds,
                                   FactorKind kind, const BlockJacobiOptions& options = {}) {
  if (bounds.size() < 2 || bounds.front() != 0 || bounds.back() != a.rows())
    throw InvalidArgument("build_bj: block bounds must start at 0 and end at n");
  for (std::size_t b = 1; b < bounds.size(); ++b)
    if (bounds[b] <= bounds[b - 1]) throw InvalidArgument("build_bj: block bounds must be strictly increasing");

  using Lower = typename BlockJacobiFactor<Scalar>::LowerFactor;
  BlockJacobiFactor<Scalar> f;
  f.kind = kind;
  f.bounds = bounds;
  const int nb = static_cast<int>(bounds.size()) - 1;
  for (int b = 0; b < nb; ++b) {
    const Lower block = detail::lower_diagonal_block(a, bounds[b], bounds[b + 1]);
    if (kind == FactorKind::ExactCholesky) {
      Eigen::SimplicialLLT<Lower, Eigen::Lower, Eigen::NaturalOrdering<int>> llt(block);
      if (llt.info() != Eigen::Success)
        throw Breakdown("build_bj: Cholesky failed on block " + std::to_string(b), -1, b);
      Lower l = llt.matrixL();
      l.makeCompressed();
      f.factors.push_back(std::move(l));
      f.shifts.push_back(Scalar(0));
      continue;
    }
    Lower l = block;
    Index failed = detail::ichol0_in_place(l);
    Scalar shift(0);
    if (failed >= 0 && options.shift_on_breakdown) {
      shift = Scalar(1e-8) * Vector<Scalar>(block.diagonal()).maxCoeff();
      for (int attempt = 0; attempt < 4 && failed >= 0; ++attempt, shift *= Scalar(2)) {
        l = block;
        for (Index i = 0; i < l.cols(); ++i) l.coeffRef(i, i) += shift;
        failed = detail::ichol0_in_place(l);
        if (failed < 0) break;
      }
    }
    if (failed >= 0)
      throw Breakdown("build_bj: IC(0) pivot " + std::to_string(failed) + " nonpositive on block " +
                          std::to_string(b),
                      failed, b);
    f.factors.push_back(std::move(l));
    f.shifts.push_back(shift);
  }
  return f;
}

template <typename Scalar>
BlockJacobiFactor<Scalar> build_bj(const SparseSpdMatrix<Scalar>& a, int block_count, FactorKind kind,
                                   const BlockJacobiOptions& options = {}) {
  return build_bj(a, even_block_bounds(a.rows(), block_count), kind, options);
}

/// L⁻¹ X, one independent triangular solve per block.
template <typename Scalar>
Block<Scalar> forward_solve(const BlockJacobiFactor<Scalar>& f, Block<Scalar> x) {
  if (x.rows() != f.rows()) throw DimensionMismatch("forward_solve: length does not match factor");
  for (int b = 0; b < f.block_count(); ++b) {
    auto seg = x.middleRows(f.block_begin(b), f.block_size(b));
    Block<Scalar> tmp = seg;
    f.factors[static_cast<std::size_t>(b)].template triangularView<Eigen::Lower>().solveInPlace(tmp);
    seg = tmp;
  }
  return x;
}

/// L⁻ᵀ X.
template <typename Scalar>
Block<Scalar> backward_solve(const BlockJacobiFactor<Scalar>& f, Block<Scalar> x) {
  if (x.rows() != f.rows()) throw DimensionMismatch("backward_solve: length does not match factor");
  for (int b = 0; b < f.block_count(); ++b) {
    auto seg = x.middleRows(f.block_begin(b), f.block_size(b));
    Block<Scalar> tmp = seg;
    f.factors[static_cast<std::size_t>(b)].transpose().template triangularView<Eigen::Upper>().solveInPlace(tmp);
    seg = tmp;
  }
  return x;
}

/// M⁻¹ X = L⁻ᵀ L⁻¹ X.
template <typename Scalar>
Block<Scalar> apply_minv(const BlockJacobiFactor<Scalar>& f, Block<Scalar> x) {
  return backward_solve(f, forward_solve(f, std::move(x)));
}

/// L X.
template <typename Scalar>
Block<Scalar> multiply_l(const BlockJacobiFactor<Scalar>& f, const Block<Scalar>& x) {
  if (x.rows() != f.rows()) throw DimensionMismatch("multiply_l: length does not match factor");
  Block<Scalar> y(x.rows(), x.cols());
  for (int b = 0; b < f.block_count(); ++b)
    y.middleRows(f.block_begin(b), f.block_size(b)).noalias() =
        f.factors[static_cast<std::size_t>(b)] * x.middleRows(f.block_begin(b), f.block_size(b));
  return y;
}

/// Lᵀ X.
template <typename Scalar>
Block<Scalar> multiply_l_transpose(const BlockJacobiFactor<Scalar>& f, const Block<Scalar>& x) {
  if (x.rows() != f.rows()) throw DimensionMismatch("multiply_l_transpose: length does not match factor");
  Block<Scalar> y(x.rows(), x.cols());
  for (int b = 0; b < f.block_count(); ++b)
    y.middleRows(f.block_begin(b), f.block_size(b)).noalias() =
        f.factors[static_cast<std::size_t>(b)].transpose() * x.middleRows(f.block_begin(b), f.block_size(b));
  return y;
}

// Vector conveniences.
template <typename Scalar>
Vector<Scalar> forward_solve(const BlockJacobiFactor<Scalar>& f, const Vector<Scalar>& v) {
  return forward_solve(f, Block<Scalar>(v)).col(0);
}
template <typename Scalar>
Vector<Scalar> backward_solve(const BlockJacobiFactor<Scalar>& f, const Vector<Scalar>& v) {
  return backward_solve(f, Block<Scalar>(v)).col(0);
}
template <typename Scalar>
Vector<Scalar> apply_minv(const BlockJacobiFactor<Scalar>& f, const Vector<Scalar>& v) {
  return apply_minv(f, Block<Scalar>(v)).col(0);
}

/// The split-preconditioned operator L⁻¹ A L⁻ᵀ, applied as a backward solve,
/// a sparse product and a forward solve.
template <typename ScalarT>
class SplitPreconditionedOperator {
 public:
  using Scalar = ScalarT;

  SplitPreconditionedOperator(const SparseSpdMatrix<Scalar>& a, const BlockJacobiFactor<Scalar>& f)
      : a_(&a), f_(&f) {
    if (a.rows() != f.rows()) throw DimensionMismatch("split operator: factor does not match matrix");
  }

  Index rows() const { return a_->rows(); }

  Block<Scalar> apply(const Block<Scalar>& x) const {
    return forward_solve(*f_, spmm(*a_, backward_solve(*f_, x)));
  }

 private:
  const SparseSpdMatrix<Scalar>* a_;
  const BlockJacobiFactor<Scalar>* f_;
};

}  // namespace ekcg
