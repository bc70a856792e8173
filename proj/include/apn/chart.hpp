#pragma once

// The projective space AP^n inside S'_{n+1}(A) through the affine chart
//
//   Q |-> (1/(1+|Q|^2)) (Q; 1)(Q*, 1),      Q in A^n,
//
// with chart(0) = E_{n+1,n+1}.  For the spin factor (A = R^m, n = 1) the
// image is the sphere {|v|^2 + b^2 = 1/4, a = 1/2} in S_2(R^m).
//
// Chart coordinates are stored as an N x w real matrix: row j holds the
// coefficients of Q_j over the units (w = d), or a single column for R^m
// (w = 1).  The flat index of coordinate direction (j, l) is j*w + l, and all
// Gram-Schmidt / frame conventions use that lexicographic order.

#include "apn/jordan.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

namespace apn {

struct ChartPoint {
  Eigen::MatrixXd Q;  // N x w
  bool is_origin(double tol = 0.0) const { return Q.norm() <= tol; }
};

struct PointCache {
  ChartPoint q;
  Eigen::MatrixXd C;  // dimS x dimT, coordinate vectors in ambient coordinates
  Eigen::MatrixXd T;  // dimS x dimT, orthonormal tangent basis (Gram-Schmidt of C)
  Eigen::MatrixXd G;  // dimT x dimT, T.col(c) = C * G.col(c)
  Eigen::MatrixXd P;  // dimS x dimS, orthogonal projector onto the tangent space

  // chart-coordinate velocity dq (flattened (j,l)) with v = C * dq, for tangent v
  Eigen::VectorXd coords_of(const Eigen::VectorXd& v) const { return G * (T.transpose() * v); }
};

class Space {
 public:
  Space(AlgebraTag tag, int n) : tag_(tag), n_(n) {
    if (tag.kind == AlgKind::SpinFactor) {
      if (n != 1) throw std::invalid_argument("spin factor admits only n = 1 (S^m)");
      if (tag.m < 2) throw std::invalid_argument("S^m needs m >= 2");
      N_ = tag.m;
      w_ = 1;
    } else {
      if (n < 1) throw std::invalid_argument("need n >= 1");
      if (tag.kind == AlgKind::O && n > 2)
        throw std::invalid_argument("octonion projective spaces exist only for n <= 2");
      N_ = n;
      w_ = tag.dim();
    }
    S_ = std::make_shared<JordanContext>(tag, tag.kind == AlgKind::SpinFactor ? 2 : n + 1);
    dimT_ = N_ * w_;
  }

  const AlgebraTag& tag() const { return tag_; }
  int n() const { return n_; }
  int N() const { return N_; }
  int w() const { return w_; }
  int Lambda() const { return w_ - 1; }
  int dimS() const { return S_->dim(); }
  int dimT() const { return dimT_; }
  const JordanContext& S() const { return *S_; }

  ChartPoint origin() const { return {Eigen::MatrixXd::Zero(N_, w_)}; }

  void check_point(const ChartPoint& q) const {
    if (q.Q.rows() != N_ || q.Q.cols() != w_)
      throw std::invalid_argument("chart point has wrong shape");
  }

  HermitianMatrix chart_matrix(const ChartPoint& q) const {
    check_point(q);
    const double s = 1.0 + q.Q.squaredNorm();
    if (tag_.kind == AlgKind::SpinFactor) {
      Eigen::VectorXd v = q.Q.col(0) / s;
      return HermitianMatrix::spin(v, (1.0 - q.Q.squaredNorm()) / (2.0 * s), 0.5);
    }
    const int d = w_, n = n_;
    HermitianMatrix M = HermitianMatrix::zero(tag_, n + 1);
    const auto& t = detail::cd_table(d);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
        for (int p = 0; p < d; ++p) {
          const double qp = q.Q(i, p);
          if (qp == 0.0) continue;
          for (int r = 0; r < d; ++r) {
            const double qc = (r == 0) ? q.Q(j, 0) : -q.Q(j, r);  // conj(Q_j)
            acc(t.idx[p][r]) += t.sgn[p][r] * qp * qc;
          }
        }
        M.set_entry(i, j, acc / s);
      }
      M.set_entry(i, n, q.Q.row(i).transpose() / s);
      Eigen::VectorXd qc = q.Q.row(i).transpose() / s;
      qc.tail(d - 1) *= -1.0;
      M.set_entry(n, i, qc);
    }
    M.ent(n, n * d) = 1.0 / s;
    return M;
  }

  Eigen::VectorXd chart_vec(const ChartPoint& q) const { return S_->vec(chart_matrix(q)); }

  // Chart coordinates of a rank-one projection lying in the chart's domain
  // (corner entry positive): Q_j = p_{j,n+1} / p_{n+1,n+1}.
  ChartPoint point_from_matrix(const HermitianMatrix& p) const {
    if (tag_.kind == AlgKind::SpinFactor) {
      const double c = p.a + p.b;  // (2,2) entry
      if (c <= 1e-12) throw std::domain_error("point outside chart domain");
      Eigen::MatrixXd Q(N_, 1);
      Q.col(0) = p.v / c;
      return {Q};
    }
    const int d = w_, n = n_;
    const double c = p.ent(n, n * d);
    if (c <= 1e-12) throw std::domain_error("point outside chart domain");
    Eigen::MatrixXd Q(N_, w_);
    for (int j = 0; j < n; ++j) Q.row(j) = p.entry(j, n).transpose() / c;
    return {Q};
  }

  // The coordinate vector field d/dx_l^j at Q (product rule on the chart).
  HermitianMatrix coord_vector_matrix(const ChartPoint& q, int j, int l) const {
    check_point(q);
    if (j < 0 || j >= N_ || l < 0 || l >= w_) throw std::out_of_range("coordinate index");
    const double s = 1.0 + q.Q.squaredNorm();
    if (tag_.kind == AlgKind::SpinFactor) {
      // v = Q/s, (1,1) = a-b = |Q|^2/s, (2,2) = a+b = 1/s
      Eigen::VectorXd dv = -2.0 * q.Q(j, 0) / (s * s) * q.Q.col(0);
      dv(j) += 1.0 / s;
      const double d22 = -2.0 * q.Q(j, 0) / (s * s);       // d(a+b)
      const double d11 = -d22;                             // d(a-b) = d(1 - 1/s)
      return HermitianMatrix::spin(dv, 0.5 * (d22 - d11), 0.5 * (d22 + d11));
    }
    const int d = w_, n = n_;
    const auto& t = detail::cd_table(d);
    HermitianMatrix M = HermitianMatrix::zero(tag_, n + 1);
    // (i_l w_j)(Q*, 1): row j gets i_l conj(Q_i), entry (j, n) gets i_l
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
      for (int r = 0; r < d; ++r) {
        const double qc = (r == 0) ? q.Q(i, 0) : -q.Q(i, r);
        acc(t.idx[l][r]) += t.sgn[l][r] * qc;
      }
      M.set_entry(j, i, M.entry(j, i) + acc);
    }
    M.ent(j, n * d + l) += 1.0;
    // (Q; 1)(conj(i_l) w_j^T, 0): column j gets Q_i conj(i_l), entry (n, j) gets conj(i_l)
    const double cl = (l == 0) ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd acc = M.entry(i, j);
      for (int p = 0; p < d; ++p) acc(t.idx[p][l]) += t.sgn[p][l] * q.Q(i, p) * cl;
      M.set_entry(i, j, acc);
    }
    M.ent(n, j * d + l) += cl;
    M.ent *= 1.0 / s;
    // -(2 X_l^j / s) * chart(Q)
    HermitianMatrix ch = chart_matrix(q);
    M += (-2.0 * q.Q(j, l) / s) * ch;
    return M;
  }

  Eigen::MatrixXd coord_cols(const ChartPoint& q) const {
    Eigen::MatrixXd C(dimS(), dimT_);
    for (int j = 0; j < N_; ++j)
      for (int l = 0; l < w_; ++l) C.col(j * w_ + l) = S_->vec(coord_vector_matrix(q, j, l));
    return C;
  }

  // Tangent frame data at q: modified Gram-Schmidt of the coordinate vectors
  // in the fixed (j, l) order.
  PointCache cache(const ChartPoint& q) const {
    PointCache pc;
    pc.q = q;
    pc.C = coord_cols(q);
    const int m = dimT_;
    pc.T = Eigen::MatrixXd(dimS(), m);
    pc.G = Eigen::MatrixXd::Zero(m, m);
    for (int c = 0; c < m; ++c) {
      Eigen::VectorXd vcol = pc.C.col(c);
      Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
      g(c) = 1.0;
      for (int t = 0; t < c; ++t) {
        const double coef = pc.T.col(t).dot(vcol);
        vcol -= coef * pc.T.col(t);
        g -= coef * pc.G.col(t);
      }
      const double nrm = vcol.norm();
      if (nrm < 1e-12) throw std::domain_error("degenerate coordinate frame");
      pc.T.col(c) = vcol / nrm;
      pc.G.col(c) = g / nrm;
    }
    pc.P = pc.T * pc.T.transpose();
    return pc;
  }

  Eigen::VectorXd project_to_tangent(const PointCache& pc, const Eigen::VectorXd& u) const {
    if (u.size() != dimS()) throw std::invalid_argument("ambient vector has wrong size");
    return pc.P * u;
  }

  // Linear complex structure J_l at the origin: the differential of
  // (right) multiplication by i_l on A^n, acting on coordinate coefficients:
  // direction (j, r) |-> expansion of (i_r i_l) w_j.  Slot-diagonal.
  Eigen::MatrixXd J_coord_matrix(int l) const {
    if (tag_.kind == AlgKind::SpinFactor || w_ == 1)
      throw std::domain_error("no complex structures: the J family is empty for Lambda = 0");
    if (l < 1 || l > Lambda()) throw std::out_of_range("J index");
    const auto& t = detail::cd_table(w_);
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(w_, w_);
    for (int r = 0; r < w_; ++r) R(t.idx[r][l], r) = t.sgn[r][l];
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dimT_, dimT_);
    for (int j = 0; j < N_; ++j) J.block(j * w_, j * w_, w_, w_) = R;
    return J;
  }

  // J_l applied to a tangent vector at the origin (ambient representation).
  Eigen::VectorXd complex_structure(int l, const PointCache& origin_cache,
                                    const Eigen::VectorXd& x) const {
    if (!origin_cache.q.is_origin(1e-14))
      throw std::domain_error("complex structures are anchored at the origin");
    Eigen::VectorXd coords = origin_cache.coords_of(x);
    return origin_cache.C * (J_coord_matrix(l) * coords);
  }

 private:
  AlgebraTag tag_;
  int n_, N_, w_, dimT_;
  std::shared_ptr<JordanContext> S_;
};

// Oriented orthonormal p-frame at a chart point; columns are ambient tangent
// vectors.
struct PFrame {
  ChartPoint base;
  Eigen::MatrixXd vectors;  // dimS x p

  int p() const { return static_cast<int>(vectors.cols()); }
};

inline void validate_frame(const Space& sp, const PFrame& fr, double tol = 1e-9) {
  sp.check_point(fr.base);
  const int p = fr.p();
  if (p < 1 || p > sp.dimT()) throw std::invalid_argument("frame size out of range");
  Eigen::MatrixXd G = fr.vectors.transpose() * fr.vectors;
  if ((G - Eigen::MatrixXd::Identity(p, p)).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("frame is not orthonormal");
}

// Frame from rows of coefficients over the orthonormal tangent basis at base.
inline PFrame frame_from_tangent_coeffs(const Space& sp, const ChartPoint& base,
                                        const Eigen::MatrixXd& rows, double tol = 1e-9) {
  if (rows.cols() != sp.dimT()) throw std::invalid_argument("frame row length != tangent dim");
  PointCache pc = sp.cache(base);
  PFrame fr{base, pc.T * rows.transpose()};
  validate_frame(sp, fr, tol);
  return fr;
}

}  // namespace apn
