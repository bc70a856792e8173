#include "apn/jordan.hpp"
#include "apn/random.hpp"

#include <gtest/gtest.h>

using namespace apn;

namespace {

HermitianMatrix random_hermitian(AlgebraTag tag, int n, Rng& rng) {
  HermitianMatrix H = HermitianMatrix::zero(tag, n);
  if (H.is_spin()) {
    H.v = rng.gauss_vec(tag.m);
    H.b = rng.gauss();
    H.a = rng.gauss();
    return H;
  }
  const int d = tag.dim();
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(d);
    diag(0) = rng.gauss();
    H.set_entry(i, i, diag);
    for (int j = i + 1; j < n; ++j) H.set_pair(i, j, rng.gauss_vec(d));
  }
  return H;
}

HermitianMatrix Eii(AlgebraTag tag, int n, int i) {
  HermitianMatrix H = HermitianMatrix::zero(tag, n);
  H.ent(i, i * tag.dim()) = 1.0;
  return H;
}

}  // namespace

TEST(Jordan, OrthogonalIdempotents) {
  for (auto tag : {tag_R(), tag_C(), tag_H(), tag_O()}) {
    HermitianMatrix E11 = Eii(tag, 2, 0), E22 = Eii(tag, 2, 1);
    EXPECT_NEAR(frob_norm(jordan_mul(E11, E22)), 0.0, 1e-15) << tag.name();
  }
}

TEST(Jordan, OffDiagonalHalving) {
  // E11 o (E12 + E21) = (E12 + E21)/2
  AlgebraTag tag = tag_C();
  HermitianMatrix F = HermitianMatrix::zero(tag, 2);
  Eigen::VectorXd one = Eigen::VectorXd::Zero(2);
  one(0) = 1.0;
  F.set_pair(0, 1, one);
  HermitianMatrix got = jordan_mul(Eii(tag, 2, 0), F);
  EXPECT_NEAR(frob_norm(got - 0.5 * F), 0.0, 1e-15);
}

TEST(Jordan, SpinIdentityElement) {
  Rng rng(3);
  HermitianMatrix id = HermitianMatrix::identity(tag_Rm(2), 2);
  for (int t = 0; t < 20; ++t) {
    HermitianMatrix X = random_hermitian(tag_Rm(2), 2, rng);
    EXPECT_NEAR(frob_norm(jordan_mul(X, id) - X), 0.0, 1e-14);
  }
}

TEST(Jordan, InnerExamples) {
  AlgebraTag tag = tag_R();
  HermitianMatrix E11 = Eii(tag, 2, 0), E22 = Eii(tag, 2, 1);
  EXPECT_DOUBLE_EQ(inner(E11, E11), 2.0);
  EXPECT_DOUBLE_EQ(inner(E11 - E22, E11 - E22), 4.0);
}

TEST(Jordan, CommutativityAndInnerSymmetry) {
  Rng rng(4);
  const std::pair<AlgebraTag, int> cases[] = {
      {tag_R(), 3}, {tag_C(), 3}, {tag_H(), 3}, {tag_O(), 3}, {tag_Rm(4), 2}};
  for (auto [tag, n] : cases) {
    for (int t = 0; t < 30; ++t) {
      HermitianMatrix A = random_hermitian(tag, n, rng);
      HermitianMatrix B = random_hermitian(tag, n, rng);
      EXPECT_NEAR(frob_norm(jordan_mul(A, B) - jordan_mul(B, A)), 0.0, 1e-12) << tag.name();
      EXPECT_NEAR(inner(A, B), inner(B, A), 1e-12) << tag.name();
    }
  }
}

TEST(Jordan, PowerAssociativity) {
  Rng rng(5);
  const std::pair<AlgebraTag, int> cases[] = {{tag_C(), 3}, {tag_O(), 3}, {tag_Rm(5), 2}};
  for (auto [tag, n] : cases) {
    for (int t = 0; t < 30; ++t) {
      HermitianMatrix A = random_hermitian(tag, n, rng);
      HermitianMatrix AA = jordan_mul(A, A);
      EXPECT_NEAR(frob_norm(jordan_mul(AA, A) - jordan_mul(A, AA)), 0.0, 1e-10) << tag.name();
    }
  }
}

TEST(Jordan, FormalRealityProxy) {
  Rng rng(6);
  for (auto [tag, n] : {std::pair<AlgebraTag, int>{tag_O(), 3}, {tag_Rm(3), 2}, {tag_H(), 4}}) {
    for (int t = 0; t < 30; ++t) {
      HermitianMatrix A = random_hermitian(tag, n, rng);
      EXPECT_GT(inner(A, A), 0.0);
    }
  }
}

TEST(Jordan, RankOneProjectionChecks) {
  EXPECT_TRUE(is_rank_one_projection(Eii(tag_H(), 3, 0)));
  HermitianMatrix half = 0.5 * (Eii(tag_C(), 2, 0) + Eii(tag_C(), 2, 1));
  EXPECT_FALSE(is_rank_one_projection(half));
  // spin factor point (v, b, 1/2) with |v|^2 + b^2 = 1/4
  Eigen::VectorXd v(3);
  v << 0.3, 0.0, 0.2;
  const double b = std::sqrt(0.25 - v.squaredNorm());
  EXPECT_TRUE(is_rank_one_projection(HermitianMatrix::spin(v, b, 0.5)));
  EXPECT_FALSE(is_rank_one_projection(HermitianMatrix::spin(v, b + 0.1, 0.5)));
}

TEST(Jordan, BasisCountsAndOrthonormality) {
  const std::tuple<AlgebraTag, int, int> cases[] = {
      {tag_R(), 2, 2},    // dim S_2(R) - 1 = 2
      {tag_O(), 3, 26},   // dim S_3(O) - 1 = 26
      {tag_Rm(4), 2, 5},  // m + 1
      {tag_C(), 4, 15},
  };
  for (auto [tag, n, want] : cases) {
    JordanContext J(tag, n);
    auto tf = J.trace_free_basis();
    EXPECT_EQ(static_cast<int>(tf.size()), want) << tag.name();
    EXPECT_EQ(J.dim(), jordan_dim(tag, n));
    for (std::size_t i = 0; i < tf.size(); ++i) {
      EXPECT_NEAR(re_trace(tf[i]), 0.0, 1e-12);
      for (std::size_t j = 0; j < tf.size(); ++j)
        EXPECT_NEAR(inner(tf[i], tf[j]), i == j ? 1.0 : 0.0, 1e-12);
    }
  }
}

TEST(Jordan, VecRoundTripAndFastPath) {
  Rng rng(7);
  for (auto [tag, n] : {std::pair<AlgebraTag, int>{tag_O(), 3}, {tag_C(), 3}, {tag_Rm(5), 2}}) {
    JordanContext J(tag, n);
    for (int t = 0; t < 10; ++t) {
      HermitianMatrix A = random_hermitian(tag, n, rng);
      Eigen::VectorXd x = J.vec(A);
      EXPECT_NEAR((x - J.vec_by_inner(A)).lpNorm<Eigen::Infinity>(), 0.0, 1e-11);
      EXPECT_NEAR(frob_norm(J.unvec(x) - A), 0.0, 1e-11);
      HermitianMatrix B = random_hermitian(tag, n, rng);
      Eigen::VectorXd y = J.vec(B);
      // vec is an isometry and the structure operators reproduce the product
      EXPECT_NEAR(x.dot(y), inner(A, B), 1e-10);
      EXPECT_NEAR((J.jordan_mul_vec(x, y) - J.vec(jordan_mul(A, B))).lpNorm<Eigen::Infinity>(),
                  0.0, 1e-10);
    }
  }
}

TEST(Jordan, ShapeErrors) {
  EXPECT_THROW(HermitianMatrix::zero(tag_O(), 4), std::invalid_argument);
  EXPECT_THROW(JordanContext(tag_O(), 4), std::invalid_argument);
  HermitianMatrix A = HermitianMatrix::zero(tag_C(), 2);
  HermitianMatrix B = HermitianMatrix::zero(tag_C(), 3);
  EXPECT_THROW(jordan_mul(A, B), std::invalid_argument);
  EXPECT_THROW(inner(A, B), std::invalid_argument);
}
