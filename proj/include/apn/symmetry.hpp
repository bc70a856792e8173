#pragma once

// Numerical Lie theory of the Jordan algebras: the derivation algebra
// Der(S_n(A)) = { D : D(A o B) = D(A) o B + A o D(B) } as the null space of
// the Leibniz constraint over all basis pairs, the induced Killing fields on
// AP^n, the isotropy split g = k (+) m at a point, and the reconstruction of
// projected fields from Killing fields.
//
// Operators are dense matrices over the fixed orthonormal basis of S_n(A);
// the operator inner product is the Frobenius form tr(D1^T D2).

#include "apn/chart.hpp"
#include "apn/embedded.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace apn {

struct DerivationBasis {
  std::vector<Eigen::MatrixXd> D;  // orthonormal under tr(D^T D')
  double sv_gap = 0.0;             // smallest kept / largest discarded singular value
  bool gap_ambiguous = false;      // gap ratio below 1e2
  Eigen::VectorXd singular_values;

  int dim() const { return static_cast<int>(D.size()); }
};

// Null space of the Leibniz system over all unordered basis pairs.
inline DerivationBasis derivation_basis(const JordanContext& J, double sv_tol = 1e-7) {
  const int D = J.dim();
  const auto& M = J.mult_ops();
  const int npairs = D * (D + 1) / 2;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(npairs * D, D * D);
  const auto col = [D](int a, int b) { return a * D + b; };
  int row0 = 0;
  for (int i = 0; i < D; ++i)
    for (int j = i; j < D; ++j) {
      Eigen::VectorXd ej = Eigen::VectorXd::Zero(D);
      ej(j) = 1.0;
      Eigen::VectorXd m = M[i] * ej;  // vec(B_i o B_j)
      for (int c = 0; c < D; ++c) {
        for (int b = 0; b < D; ++b) A(row0 + c, col(c, b)) += m(b);
        for (int a = 0; a < D; ++a) {
          A(row0 + c, col(a, j)) -= M[i](c, a);
          A(row0 + c, col(a, i)) -= M[j](c, a);
        }
      }
      row0 += D;
    }
  // Singular values via the Gram matrix: BDCSVD mishandles the highly
  // clustered spectrum of this system (spurious/NaN values); the symmetric
  // eigensolver on A^T A is robust and the null space is what we need anyway.
  Eigen::MatrixXd Gm = A.transpose() * A;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Gm);
  const Eigen::VectorXd& ev = es.eigenvalues();  // ascending
  const int total = static_cast<int>(ev.size());
  Eigen::VectorXd sv(total);
  for (int i = 0; i < total; ++i)
    sv(i) = std::sqrt(std::max(0.0, ev(total - 1 - i)));  // descending
  const double cut = sv_tol * sv(0);
  int rank = 0;
  while (rank < total && sv(rank) > cut) ++rank;
  DerivationBasis out;
  out.singular_values = sv;
  const int nullity = total - rank;
  out.sv_gap = (nullity > 0 && rank > 0) ? sv(rank - 1) / std::max(sv(rank), 1e-300) : 1e300;
  out.gap_ambiguous = out.sv_gap < 1e2;
  for (int k = rank; k < total; ++k) {
    Eigen::VectorXd x = es.eigenvectors().col(total - 1 - k);
    Eigen::MatrixXd Dm(D, D);
    for (int a = 0; a < D; ++a) Dm.row(a) = x.segment(a * D, D).transpose();
    out.D.push_back(Dm);
  }
  return out;
}

// Max Leibniz residual of an operator over all basis pairs.
inline double leibniz_residual(const JordanContext& J, const Eigen::MatrixXd& D) {
  const int n = J.dim();
  const auto& M = J.mult_ops();
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd ei = Eigen::VectorXd::Zero(n);
    ei(i) = 1.0;
    Eigen::VectorXd Dei = D * ei;
    for (int j = i; j < n; ++j) {
      Eigen::VectorXd ej = Eigen::VectorXd::Zero(n);
      ej(j) = 1.0;
      Eigen::VectorXd r = D * (M[i] * ej) - M[i] * (D * ej) - J.jordan_mul_vec(Dei, ej);
      worst = std::max(worst, r.lpNorm<Eigen::Infinity>());
    }
  }
  return worst;
}

// Killing field value K_D(pt) = D(chart(pt)); automatically tangent to M.
inline Eigen::VectorXd killing_value(const Space& sp, const Eigen::MatrixXd& D,
                                     const ChartPoint& q) {
  return D * sp.chart_vec(q);
}

struct IsotropySplit {
  std::vector<Eigen::MatrixXd> k;  // isotropy: D(chart(pt)) = 0
  std::vector<Eigen::MatrixXd> m;  // orthogonal complement within the basis span
  double sv_gap = 0.0;
  bool gap_ambiguous = false;
};

// Split by rank-revealing factorization of the evaluation map D -> D(chart(pt)).
inline IsotropySplit isotropy_split(const Space& sp, const DerivationBasis& basis,
                                    const ChartPoint& q, double sv_tol = 1e-7) {
  const int r = basis.dim();
  Eigen::MatrixXd E(sp.dimS(), r);
  Eigen::VectorXd x = sp.chart_vec(q);
  for (int i = 0; i < r; ++i) E.col(i) = basis.D[i] * x;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(E, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cut = sv_tol * std::max(sv(0), 1e-300);
  int rank = 0;
  while (rank < sv.size() && sv(rank) > cut) ++rank;
  IsotropySplit out;
  out.sv_gap = (rank > 0 && rank < sv.size()) ? sv(rank - 1) / std::max(sv(rank), 1e-300) : 1e300;
  out.gap_ambiguous = out.sv_gap < 1e2;
  auto combine = [&](int c) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(basis.D[0].rows(), basis.D[0].cols());
    for (int i = 0; i < r; ++i) D += svd.matrixV()(i, c) * basis.D[i];
    return D;
  };
  for (int c = 0; c < rank; ++c) out.m.push_back(combine(c));
  for (int c = rank; c < r; ++c) out.k.push_back(combine(c));
  return out;
}

// Basis of g scaled so that evaluation at the origin is an isometry m -> T_x M,
// as needed by the projected-field reconstruction.
struct ReconstructionBasis {
  std::vector<Eigen::MatrixXd> fields;  // k-part then rescaled m-part
  double scale = 1.0;                   // operator-norm^2 of the rescaled m elements
  double scale_residual = 0.0;          // deviation of op-Gram of m from scale * Id
  bool single_scale_ok = true;
};

inline ReconstructionBasis reconstruction_basis(const Space& sp, const DerivationBasis& basis,
                                                double rel_tol = 1e-6) {
  IsotropySplit split = isotropy_split(sp, basis, sp.origin());
  ReconstructionBasis out;
  // orthonormalize m against the pullback metric <D1 x, D2 x>
  Eigen::VectorXd x = sp.chart_vec(sp.origin());
  const int mm = static_cast<int>(split.m.size());
  Eigen::MatrixXd Ev(sp.dimS(), mm);
  for (int i = 0; i < mm; ++i) Ev.col(i) = split.m[i] * x;
  Eigen::MatrixXd G = Ev.transpose() * Ev;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  Eigen::MatrixXd W = es.operatorInverseSqrt();  // new_i = sum_j W(j,i) m_j
  std::vector<Eigen::MatrixXd> m_scaled(mm, Eigen::MatrixXd::Zero(sp.dimS(), sp.dimS()));
  for (int i = 0; i < mm; ++i)
    for (int j = 0; j < mm; ++j) m_scaled[i] += W(j, i) * split.m[j];
  // op-Gram of the rescaled m must be scale * Id for a single positive scale
  double scale = 0.0;
  for (int i = 0; i < mm; ++i) scale += m_scaled[i].squaredNorm();
  scale /= mm;
  double resid = 0.0;
  for (int i = 0; i < mm; ++i)
    for (int j = 0; j < mm; ++j) {
      const double g = (m_scaled[i].transpose() * m_scaled[j]).trace();
      resid = std::max(resid, std::abs(g - (i == j ? scale : 0.0)));
    }
  out.scale = scale;
  out.scale_residual = resid;
  out.single_scale_ok = resid <= rel_tol * std::max(1.0, scale);
  // k-part: orthonormal in the same metric Frob/scale in which the m-part is,
  // i.e. Frobenius norm sqrt(scale)
  const double s = std::sqrt(scale);
  for (const auto& K : split.k) out.fields.push_back((s / K.norm()) * K);
  for (const auto& Mm : m_scaled) out.fields.push_back(Mm);
  return out;
}

// V_u(pt) reconstructed from Killing fields: sum_F <u, F(pt)> F(pt) over the
// metric-orthonormal basis; must equal the tangential projection of u.
inline Eigen::VectorXd reconstruct_projected_field(const Space& sp,
                                                   const ReconstructionBasis& rb,
                                                   const Eigen::VectorXd& u,
                                                   const ChartPoint& q) {
  if (!rb.single_scale_ok)
    throw std::runtime_error("reconstruction basis has no single isometric scale");
  Eigen::VectorXd x = sp.chart_vec(q);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(sp.dimS());
  for (const auto& F : rb.fields) {
    Eigen::VectorXd val = F * x;
    out += u.dot(val) * val;
  }
  return out;
}

// One-parameter automorphism flow exp(tD) on ambient coordinates.
inline Eigen::MatrixXd one_parameter_flow(const Eigen::MatrixXd& D, double t) {
  return (t * D).exp();
}

// Transport a frame by an ambient isometry g preserving M: the base point
// moves to g . chart(base), vectors map by g.
inline PFrame move_frame(const Space& sp, const Eigen::MatrixXd& g, const PFrame& fr) {
  HermitianMatrix img = sp.S().unvec(g * sp.chart_vec(fr.base));
  PFrame out;
  out.base = sp.point_from_matrix(img);
  out.vectors = g * fr.vectors;
  return out;
}

}  // namespace apn
