#include "apn/embedded.hpp"
#include "apn/random.hpp"
#include "apn/symmetry.hpp"

#include <gtest/gtest.h>

using namespace apn;

namespace {

const std::pair<AlgebraTag, int> kSpaces[] = {
    {tag_R(), 2}, {tag_C(), 2}, {tag_H(), 2}, {tag_O(), 2}, {tag_Rm(4), 1}};

}

// Lemma values at the origin: ||II(e,n)||^2 is 0 for n = +/- J_l e (same slot,
// different unit) and 1/4 otherwise; <II(e,e), II(n,n)> is 1 resp. 1/2.
TEST(Embedded, ClosedFormNormsAtCoordinatePairs) {
  for (auto tag : {tag_C(), tag_H(), tag_O()}) {
    Space sp(tag, 2);
    auto val = [&](int j, int l, int k, int r) {
      return sp.S().vec(sff_closed_form_origin(sp, j, l, k, r));
    };
    for (int j = 0; j < sp.N(); ++j)
      for (int l = 0; l < sp.w(); ++l)
        for (int k = 0; k < sp.N(); ++k)
          for (int r = 0; r < sp.w(); ++r) {
            if (j == k && l == r) continue;
            const double nn = val(j, l, k, r).squaredNorm();
            const double ip = val(j, l, j, l).dot(val(k, r, k, r));
            if (j == k) {
              EXPECT_NEAR(nn, 0.0, 1e-14);
              EXPECT_NEAR(ip, 1.0, 1e-14);
            } else {
              EXPECT_NEAR(nn, 0.25, 1e-14);
              EXPECT_NEAR(ip, 0.5, 1e-14);
            }
          }
  }
  // sphere branch: ||II||^2 = delta_jk, <II(e,e), II(n,n)> = 1
  Space spm(tag_Rm(4), 1);
  auto val = [&](int j, int k) { return spm.S().vec(sff_closed_form_origin(spm, j, 0, k, 0)); };
  EXPECT_NEAR(val(0, 0).squaredNorm(), 1.0, 1e-14);
  EXPECT_NEAR(val(0, 1).squaredNorm(), 0.0, 1e-14);
  EXPECT_NEAR(val(0, 0).dot(val(1, 1)), 1.0, 1e-14);
}

TEST(Embedded, NumericMatchesClosedFormEntrywise) {
  for (auto [tag, n] : kSpaces) {
    Space sp(tag, n);
    PointCache pc = sp.cache(sp.origin());
    FdDiag diag;
    double worst = 0.0;
    for (int j = 0; j < sp.N(); ++j)
      for (int l = 0; l < sp.w(); ++l)
        for (int k = 0; k < sp.N(); ++k)
          for (int r = 0; r < sp.w(); ++r) {
            Eigen::VectorXd x = 0.5 * pc.C.col(j * sp.w() + l);
            Eigen::VectorXd y = 0.5 * pc.C.col(k * sp.w() + r);
            Eigen::VectorXd num = sff_numeric(sp, pc, x, y, {}, &diag);
            Eigen::VectorXd closed = sp.S().vec(sff_closed_form_origin(sp, j, l, k, r));
            worst = std::max(worst, (num - closed).lpNorm<Eigen::Infinity>());
          }
    EXPECT_LT(worst, 1e-6) << tag.name();
  }
}

TEST(Embedded, NumericSymmetricBilinearAndNormal) {
  Rng rng(31);
  for (auto [tag, n] : kSpaces) {
    Space sp(tag, n);
    ChartPoint q = random_chart_point(sp, rng, 0.4);
    PointCache pc = sp.cache(q);
    Eigen::VectorXd x = pc.T * rng.gauss_vec(sp.dimT());
    Eigen::VectorXd y = pc.T * rng.gauss_vec(sp.dimT());
    Eigen::VectorXd z = pc.T * rng.gauss_vec(sp.dimT());
    Eigen::VectorXd xy = sff_numeric(sp, pc, x, y);
    // symmetry
    EXPECT_NEAR((xy - sff_numeric(sp, pc, y, x)).lpNorm<Eigen::Infinity>(), 0.0, 1e-9);
    // bilinearity in the first slot
    Eigen::VectorXd lin = sff_numeric(sp, pc, x + 2.0 * z, y);
    Eigen::VectorXd want = xy + 2.0 * sff_numeric(sp, pc, z, y);
    EXPECT_NEAR((lin - want).lpNorm<Eigen::Infinity>(), 0.0, 1e-6);
    // output is normal
    EXPECT_NEAR((pc.T.transpose() * xy).lpNorm<Eigen::Infinity>(), 0.0, 1e-7);
  }
}

TEST(Embedded, SphereIsTotallyUmbilic) {
  // |II(X,X)| = |X|^2 at arbitrary points of S^m
  Rng rng(32);
  Space sp(tag_Rm(5), 1);
  for (int t = 0; t < 5; ++t) {
    ChartPoint q = random_chart_point(sp, rng, 0.6);
    PointCache pc = sp.cache(q);
    Eigen::VectorXd x = pc.T * rng.gauss_vec(sp.dimT());
    x.normalize();
    EXPECT_NEAR(sff_numeric(sp, pc, x, x).norm(), 1.0, 1e-7);
  }
}

TEST(Embedded, ShapeOperatorOfProjectedFieldContractsII) {
  // <A_{V_u} e, e'> = <u, II(e, e')> for normal u at the origin:
  // A_{V_u} is minus the classical shape operator of the normal direction u.
  Rng rng(33);
  for (auto [tag, n] : kSpaces) {
    Space sp(tag, n);
    PointCache pc = sp.cache(sp.origin());
    Eigen::VectorXd u = rng.gauss_vec(sp.dimS());
    u -= pc.P * u;  // make it normal
    ProjectedField V(u);
    for (int t = 0; t < 3; ++t) {
      Eigen::VectorXd x = pc.T * rng.gauss_vec(sp.dimT());
      Eigen::VectorXd y = pc.T * rng.gauss_vec(sp.dimT());
      const double lhs = shape_operator(sp, pc, V, x).dot(y);
      const double rhs = u.dot(sff_vec(sp, pc, x, y));
      EXPECT_NEAR(lhs, rhs, 1e-7) << tag.name();
    }
  }
}

TEST(Embedded, ShapeOperatorTangentFieldDiagonal) {
  // for tangent u at the origin, <A_{V_u} e_j, e_j> = <u, II(e_j, e_j)>
  Space sp(tag_C(), 2);
  Rng rng(34);
  PointCache pc = sp.cache(sp.origin());
  Eigen::VectorXd u = pc.T * rng.gauss_vec(sp.dimT());
  ProjectedField V(u);
  Eigen::VectorXd e = pc.T.col(0);
  EXPECT_NEAR(shape_operator(sp, pc, V, e).dot(e), u.dot(sff_vec(sp, pc, e, e)), 1e-8);
}

TEST(Embedded, KillingShapeOperatorIsAntisymmetric) {
  Rng rng(35);
  Space sp(tag_C(), 2);
  DerivationBasis der = derivation_basis(sp.S());
  ASSERT_GE(der.dim(), 1);
  KillingField K(der.D[2 % der.dim()]);
  ChartPoint q = random_chart_point(sp, rng, 0.4);
  PointCache pc = sp.cache(q);
  for (int t = 0; t < 4; ++t) {
    Eigen::VectorXd x = pc.T * rng.gauss_vec(sp.dimT());
    Eigen::VectorXd y = pc.T * rng.gauss_vec(sp.dimT());
    const double s = shape_operator(sp, pc, K, x).dot(y) + x.dot(shape_operator(sp, pc, K, y));
    EXPECT_NEAR(s, 0.0, 1e-8);
  }
}

TEST(Embedded, ProjectedFieldIsGradientHessianSymmetric) {
  // A_{V_u} symmetric on the tangent space (V_u is a gradient field)
  Rng rng(36);
  for (auto [tag, n] : {std::pair<AlgebraTag, int>{tag_O(), 2}, {tag_Rm(4), 1}}) {
    Space sp(tag, n);
    ChartPoint q = random_chart_point(sp, rng, 0.3);
    PointCache pc = sp.cache(q);
    Eigen::VectorXd u = rng.gauss_vec(sp.dimS());
    ProjectedField V(u);
    Eigen::VectorXd x = pc.T * rng.gauss_vec(sp.dimT());
    Eigen::VectorXd y = pc.T * rng.gauss_vec(sp.dimT());
    EXPECT_NEAR(shape_operator(sp, pc, V, x).dot(y), shape_operator(sp, pc, V, y).dot(x), 1e-7);
  }
}
