#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ekcg/aortho.hpp"
#include "support.hpp"

using namespace ekcg;
using support::Mat;
using support::Vec;

namespace {

struct DenseOp {
  using Scalar = double;
  Mat a;
  Index rows() const { return a.rows(); }
  Block<double> apply(const Block<double>& x) const { return a * x; }
};

double a_defect(const Mat& a, const Mat& w) {
  return support::max_abs(w.transpose() * a * w - Mat::Identity(w.cols(), w.cols()));
}

}  // namespace

TEST_CASE("a_orthogonalize_against: empty basis and annihilation") {
  std::mt19937_64 eng(11);
  const auto a = support::to_sparse(support::random_spd(12, eng));
  const Mat w = support::random_matrix(12, 3, eng);
  CHECK(a_orthogonalize_against(a, w, Mat(12, 0)) == w);

  const Mat q = pre_cholqr(a, Mat(support::random_matrix(12, 4, eng)));
  const Mat in_span = q * support::random_matrix(4, 2, eng);
  const Mat out = a_orthogonalize_against(a, in_span, q);
  CHECK(out.norm() <= 1e-12 * in_span.norm());
}

TEST_CASE("a_orthogonalize_against matches dense CGS2 when A = I") {
  std::mt19937_64 eng(12);
  const auto id = support::to_sparse(Mat::Identity(8, 8));
  const Mat q = Eigen::HouseholderQR<Mat>(support::random_matrix(8, 2, eng)).householderQ() * Mat::Identity(8, 2);
  const Mat w = support::random_matrix(8, 2, eng);
  CHECK(support::max_abs(a_orthogonalize_against(id, w, q) - support::dense_cgs2(q, w)) <= 1e-14);
}

TEST_CASE("cached projection agrees with the recomputing one") {
  std::mt19937_64 eng(13);
  const Mat ad = support::random_spd(30, eng, 1.0, 100.0);
  const auto a = support::to_sparse(ad);
  const Mat q = pre_cholqr(a, Mat(support::random_matrix(30, 6, eng)));
  const Mat w = support::random_matrix(30, 3, eng);
  const Mat plain = a_orthogonalize_against(a, w, q);
  const Mat cached = a_orthogonalize_against_cached(w, q, Mat(ad * q));
  CHECK(support::max_abs(plain - cached) <= 1e-12 * support::max_abs(w));
  CHECK(support::max_abs(q.transpose() * ad * plain) <= 1e-12 * support::max_abs(w));
  CHECK_THROWS_AS(a_orthogonalize_against_cached(w, q, Mat(Mat::Zero(30, 2))), DimensionMismatch);
}

TEST_CASE("two-pass projection is idempotent") {
  std::mt19937_64 eng(14);
  const auto a = support::to_sparse(support::random_spd(25, eng));
  const Mat q = pre_cholqr(a, Mat(support::random_matrix(25, 5, eng)));
  const Mat w1 = a_orthogonalize_against(a, Mat(support::random_matrix(25, 3, eng)), q);
  const Mat w2 = a_orthogonalize_against(a, w1, q);
  CHECK((w2 - w1).norm() <= 1e-12 * w1.norm());
}

TEST_CASE("a_cholqr") {
  std::mt19937_64 eng(15);
  const auto id = support::to_sparse(Mat::Identity(10, 10));
  const Mat q = Eigen::HouseholderQR<Mat>(support::random_matrix(10, 3, eng)).householderQ() * Mat::Identity(10, 3);
  // Orthonormal input is a fixed point under the positive-diagonal convention.
  const Mat fixed = a_cholqr(id, q);
  CHECK(support::max_abs(fixed - q) <= 1e-14);
  CHECK(support::max_abs(a_cholqr(id, Mat(2.0 * q)) - q) <= 1e-14);

  const Mat ad = support::random_spd(12, eng);
  const auto a = support::to_sparse(ad);
  const Mat w = support::random_matrix(12, 3, eng);
  const Mat out = a_cholqr(a, w);
  CHECK(a_defect(ad, out) <= 1e-10);
  CHECK(support::max_abs(support::projector(out) - support::projector(w)) <= 1e-8);

  Mat dependent = w;
  dependent.col(2) = dependent.col(0);
  CHECK_THROWS_AS(a_cholqr(a, dependent), Breakdown);
}

TEST_CASE("pre_cholqr") {
  std::mt19937_64 eng(16);
  const auto id = support::to_sparse(Mat::Identity(9, 9));
  const Mat w = support::random_matrix(9, 4, eng);
  const Mat orth = pre_cholqr(id, w);
  CHECK(support::max_abs(orth.transpose() * orth - Mat::Identity(4, 4)) <= 1e-14);

  const Mat ad = support::random_spd(40, eng, 1.0, 1e3);
  const auto a = support::to_sparse(ad);
  const Mat w2 = support::random_matrix(40, 5, eng);
  const Mat p = pre_cholqr(a, w2);
  const Mat c = a_cholqr(a, w2);
  CHECK(a_defect(ad, p) <= 1e-10);
  CHECK(a_defect(ad, c) <= 1e-10);
  CHECK(support::max_abs(support::projector(p) - support::projector(w2)) <= 1e-8);
  // Both are the unique A-orthonormal basis W R⁻¹ with positive-diagonal R.
  CHECK(support::max_abs(p - c) <= 1e-8);

  Mat zero = w2;
  zero.col(1).setZero();
  CHECK_THROWS_AS(pre_cholqr(a, zero), Breakdown);
}

TEST_CASE("pre_cholqr survives column scaling that breaks plain A-CholQR") {
  std::mt19937_64 eng(17);
  const Mat ad = support::random_spd(50, eng, 1.0, 100.0);
  const auto a = support::to_sparse(ad);
  Mat w = support::random_matrix(50, 4, eng);
  w.col(1) *= 1e8;
  w.col(3) *= 1e-8;
  double plain_defect = std::numeric_limits<double>::infinity();
  try {
    plain_defect = a_defect(ad, a_cholqr(a, w));
  } catch (const Breakdown&) {
  }
  const double pre_defect = a_defect(ad, pre_cholqr(a, w));
  CHECK(pre_defect <= 1e-10);
  CHECK(plain_defect >= 100.0 * pre_defect);
}

TEST_CASE("pre_cholqr is more accurate on an ill-conditioned block") {
  std::mt19937_64 eng(18);
  const Mat ad = support::random_spd(60, eng, 1.0, 100.0);
  const auto a = support::to_sparse(ad);
  // cond(W) = 1e6 with mixed directions.
  const Mat u = Eigen::HouseholderQR<Mat>(support::random_matrix(60, 5, eng)).householderQ() * Mat::Identity(60, 5);
  const Mat v = Eigen::HouseholderQR<Mat>(support::random_matrix(5, 5, eng)).householderQ();
  Vec s(5);
  s << 1.0, 1e-2, 1e-3, 1e-5, 1e-6;
  const Mat w = u * s.asDiagonal() * v.transpose();
  const double pre_defect = a_defect(ad, pre_cholqr(a, w));
  double plain_defect = std::numeric_limits<double>::infinity();
  try {
    plain_defect = a_defect(ad, a_cholqr(a, w));
  } catch (const Breakdown&) {
  }
  MESSAGE("A-CholQR defect " << plain_defect << ", Pre-CholQR defect " << pre_defect);
  CHECK(pre_defect <= 1e-10);
  CHECK(plain_defect >= 100.0 * pre_defect);
}

TEST_CASE("works through any operator satisfying the concept") {
  std::mt19937_64 eng(19);
  const DenseOp op{support::random_spd(15, eng)};
  const Mat w = pre_cholqr(op, Mat(support::random_matrix(15, 3, eng)));
  CHECK(a_defect(op.a, w) <= 1e-12);
  const Mat w2 = a_orthogonalize_against(op, Mat(support::random_matrix(15, 2, eng)), w);
  CHECK(support::max_abs(w.transpose() * op.a * w2) <= 1e-12);
  CHECK_THROWS_AS(a_cholqr(op, Mat(Mat::Zero(4, 2))), DimensionMismatch);
}
