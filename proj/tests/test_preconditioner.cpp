#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ekcg/harness/generators.hpp"
#include "ekcg/preconditioner.hpp"
#include "support.hpp"

using namespace ekcg;
using support::Mat;
using support::Vec;

namespace {

Mat dense_factor(const BlockJacobiFactor<double>& f, int b) { return Mat(f.factors[static_cast<std::size_t>(b)]); }

Mat diag_block(const Mat& a, Index begin, Index size) { return a.block(begin, begin, size, size); }

}  // namespace

TEST_CASE("diagonal matrix gives square roots") {
  std::vector<Triplet<double>> t;
  for (Index i = 0; i < 6; ++i) t.push_back({i, i, double((i + 1) * (i + 1))});
  const auto a = SparseSpdMatrix<double>::from_triplets(6, t);
  for (auto kind : {FactorKind::ExactCholesky, FactorKind::IncompleteCholesky0}) {
    const auto f = build_bj(a, 3, kind);
    CHECK(f.block_count() == 3);
    for (int b = 0; b < 3; ++b) {
      const Mat l = dense_factor(f, b);
      for (Index i = 0; i < l.rows(); ++i) CHECK(l(i, i) == doctest::Approx(double(f.block_begin(b) + i + 1)));
      CHECK(support::max_abs(Mat(l.triangularView<Eigen::StrictlyLower>())) == 0.0);
    }
  }
}

TEST_CASE("exact blocks reproduce the diagonal blocks of A") {
  const auto a = harness::gen_poisson2d(8, 8);
  const Mat ad = a.to_dense();
  const auto f = build_bj(a, 4, FactorKind::ExactCholesky);
  for (int b = 0; b < 4; ++b) {
    const Mat l = dense_factor(f, b);
    const Mat ai = diag_block(ad, f.block_begin(b), f.block_size(b));
    CHECK(l.isLowerTriangular());
    CHECK(l.diagonal().minCoeff() > 0.0);
    CHECK(support::max_abs(l * l.transpose() - ai) <= 1e-10 * support::max_abs(ai));
  }
}

TEST_CASE("IC(0) matches a dense oracle and keeps the pattern of lower(A_i)") {
  const auto a = harness::gen_poisson2d(8, 8);
  const Mat ad = a.to_dense();
  const auto f = build_bj(a, 4, FactorKind::IncompleteCholesky0);
  for (int b = 0; b < 4; ++b) {
    const Mat ai = diag_block(ad, f.block_begin(b), f.block_size(b));
    const Mat l = dense_factor(f, b);
    const Mat oracle = support::dense_ic0(ai);
    CHECK(support::max_abs(l - oracle) <= 1e-13);
    bool pattern_ok = true;
    for (Index i = 0; i < l.rows(); ++i)
      for (Index j = 0; j <= i; ++j)
        if ((l(i, j) != 0.0) != (ai(i, j) != 0.0)) pattern_ok = false;
    CHECK(pattern_ok);
    // L Lᵀ agrees with A_i on the pattern and differs only off it.
    const Mat residual = l * l.transpose() - ai;
    double on_pattern = 0.0, off_pattern = 0.0;
    for (Index i = 0; i < l.rows(); ++i)
      for (Index j = 0; j < l.cols(); ++j) {
        double& slot = ai(i, j) != 0.0 ? on_pattern : off_pattern;
        slot = std::max(slot, std::abs(residual(i, j)));
      }
    CHECK(on_pattern <= 1e-13);
    CHECK(off_pattern > 0.0);
  }
}

TEST_CASE("one exact block is the full Cholesky factor") {
  const auto a = harness::gen_poisson2d(6, 5);
  const Mat ad = a.to_dense();
  const auto f = build_bj(a, 1, FactorKind::ExactCholesky);
  const Mat l = dense_factor(f, 0);
  const Mat expected = Eigen::LLT<Mat>(ad).matrixL();
  CHECK(support::max_abs(l - expected) <= 1e-12);
  std::mt19937_64 eng(21);
  const Vec x = support::random_vector(a.rows(), eng);
  CHECK((apply_minv(f, Vec(ad * x)) - x).norm() <= 1e-10 * x.norm());
}

TEST_CASE("solves invert the factor and respect block independence") {
  const auto a = harness::gen_poisson2d(7, 6);
  const Index n = a.rows();
  std::mt19937_64 eng(22);
  for (auto kind : {FactorKind::ExactCholesky, FactorKind::IncompleteCholesky0}) {
    const auto f = build_bj(a, 3, kind);
    Mat l = Mat::Zero(n, n);
    for (int b = 0; b < 3; ++b) l.block(f.block_begin(b), f.block_begin(b), f.block_size(b), f.block_size(b)) = dense_factor(f, b);
    const Vec v = support::random_vector(n, eng);
    CHECK((l * forward_solve(f, v) - v).norm() <= 1e-12 * v.norm());
    CHECK((l.transpose() * backward_solve(f, v) - v).norm() <= 1e-12 * v.norm());
    CHECK((l * (l.transpose() * apply_minv(f, v)) - v).norm() <= 1e-12 * v.norm());
    CHECK(support::max_abs(multiply_l(f, Mat(v)) - l * v) <= 1e-13);
    CHECK(support::max_abs(multiply_l_transpose(f, Mat(v)) - l.transpose() * v) <= 1e-13);

    const Mat vb = support::random_matrix(n, 3, eng);
    const Mat out = apply_minv(f, vb);
    for (int c = 0; c < 3; ++c) CHECK((out.col(c) - apply_minv(f, Vec(vb.col(c)))).norm() == 0.0);

    // Perturbing block 1 leaves the other blocks of every result unchanged.
    Vec w = v;
    w.segment(f.block_begin(1), f.block_size(1)) += support::random_vector(f.block_size(1), eng);
    for (auto op : {0, 1, 2}) {
      const Vec y0 = op == 0 ? forward_solve(f, v) : op == 1 ? backward_solve(f, v) : apply_minv(f, v);
      const Vec y1 = op == 0 ? forward_solve(f, w) : op == 1 ? backward_solve(f, w) : apply_minv(f, w);
      CHECK((y0.head(f.block_begin(1)) - y1.head(f.block_begin(1))).norm() == 0.0);
      CHECK((y0.tail(n - f.block_begin(2)) - y1.tail(n - f.block_begin(2))).norm() == 0.0);
    }
  }
}

TEST_CASE("support stays within the block") {
  const auto a = harness::gen_poisson2d(4, 4);
  const auto f = build_bj(a, 2, FactorKind::ExactCholesky);
  Vec v = Vec::Zero(16);
  v.head(8).setOnes();
  const Vec y = apply_minv(f, v);
  CHECK(y.tail(8).norm() == 0.0);
  CHECK(y.head(8).norm() > 0.0);
}

TEST_CASE("exact apply_minv is symmetric") {
  const auto a = harness::gen_poisson2d(9, 9);
  const auto f = build_bj(a, 5, FactorKind::ExactCholesky);
  std::mt19937_64 eng(23);
  const Vec u = support::random_vector(a.rows(), eng);
  const Vec v = support::random_vector(a.rows(), eng);
  CHECK(std::abs(u.dot(apply_minv(f, v)) - v.dot(apply_minv(f, u))) <= 1e-12 * u.norm() * v.norm());
}

TEST_CASE("identity matrix gives identity operations") {
  std::vector<Triplet<double>> t;
  for (Index i = 0; i < 5; ++i) t.push_back({i, i, 1.0});
  const auto f = build_bj(SparseSpdMatrix<double>::from_triplets(5, t), 2, FactorKind::ExactCholesky);
  Vec v(5);
  v << 1, -2, 3, -4, 5;
  CHECK(forward_solve(f, v) == v);
  CHECK(backward_solve(f, v) == v);
  CHECK(apply_minv(f, v) == v);
}

TEST_CASE("IC(0) breakdown reports the block and a tiny shift does not hide it") {
  // SPD (eigenvalues 3 ± 2√2), but IC(0) drops the fill at (3,1) and the
  // last pivot goes negative.
  Mat spd(4, 4);
  spd << 3.0, -2.0, 0.0, 2.0,
         -2.0, 3.0, -2.0, 0.0,
         0.0, -2.0, 3.0, -2.0,
         2.0, 0.0, -2.0, 3.0;
  REQUIRE(Eigen::SelfAdjointEigenSolver<Mat>(spd).eigenvalues().minCoeff() > 0.0);
  Mat a = Mat::Zero(6, 6);
  a.block(0, 0, 2, 2) = Mat::Identity(2, 2);
  a.block(2, 2, 4, 4) = spd;
  const auto sa = support::to_sparse(a);
  const Mat oracle = support::dense_ic0(spd);
  const bool oracle_fails = !(oracle.diagonal().array() > 0.0).all() || !oracle.allFinite();
  REQUIRE(oracle_fails);
  try {
    build_bj(sa, std::vector<Index>{0, 2, 6}, FactorKind::IncompleteCholesky0);
    FAIL("expected breakdown");
  } catch (const Breakdown& e) {
    CHECK(e.block() == 1);
    CHECK(e.pivot() >= 0);
  }
  CHECK_NOTHROW(build_bj(sa, std::vector<Index>{0, 2, 6}, FactorKind::ExactCholesky));
  BlockJacobiOptions retry;
  retry.shift_on_breakdown = true;
  CHECK_THROWS_AS(build_bj(sa, std::vector<Index>{0, 2, 6}, FactorKind::IncompleteCholesky0, retry), Breakdown);
}

TEST_CASE("bounds validation") {
  const auto a = harness::gen_poisson2d(3, 3);
  CHECK_THROWS_AS(build_bj(a, std::vector<Index>{0, 5}, FactorKind::ExactCholesky), InvalidArgument);
  CHECK_THROWS_AS(build_bj(a, std::vector<Index>{0, 5, 5, 9}, FactorKind::ExactCholesky), InvalidArgument);
  CHECK_THROWS_AS(build_bj(a, 10, FactorKind::ExactCholesky), InvalidArgument);
  const auto f = build_bj(a, 3, FactorKind::ExactCholesky);
  CHECK_THROWS_AS(forward_solve(f, Vec(Vec::Zero(4))), DimensionMismatch);
  CHECK(f.as_partition() == contiguous_partition(9, 3));
}
