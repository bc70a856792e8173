#pragma once

// Embedded calculus of AP^n in S'_{n+1}(A): the second fundamental form
// (closed form at the origin, finite differences anywhere) and the operators
//   A_V X = nabla_X V,
//   A_{V,W} X = (nabla_V A_W) X = nabla_V nabla_X~ W - nabla_{nabla_V X~} W.
//
// Directional derivatives run along straight lines in chart coordinates,
// central differences with one Richardson extrapolation level; the two-level
// disagreement is tracked as a convergence diagnostic.

#include "apn/chart.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>

namespace apn {

struct FdConfig {
  double h1 = 1e-4;      // first derivatives (fields, chart)
  double h2 = 1e-3;      // second derivatives of the chart
  double h_outer = 1e-3; // outer derivative in A_{V,V}
  double conv_tol = 1e-3;  // two-level disagreement beyond this raises the flag
};

struct FdDiag {
  double worst = 0.0;  // largest two-level Richardson disagreement seen
  void note(double d) {
    if (d > worst) worst = d;
  }
};

class NonConvergence : public std::runtime_error {
 public:
  explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

// Central first derivative with one Richardson level; f: double -> VectorXd.
template <typename F>
Eigen::VectorXd richardson_d1(F&& f, double h, FdDiag* diag = nullptr) {
  Eigen::VectorXd d1 = (f(h) - f(-h)) / (2.0 * h);
  Eigen::VectorXd d2 = (f(h / 2.0) - f(-h / 2.0)) / h;
  if (diag) diag->note((d2 - d1).template lpNorm<Eigen::Infinity>());
  return (4.0 * d2 - d1) / 3.0;
}

// Central second derivative with one Richardson level; needs f(0).
template <typename F>
Eigen::VectorXd richardson_d2(F&& f, const Eigen::VectorXd& f0, double h, FdDiag* diag = nullptr) {
  Eigen::VectorXd d1 = (f(h) - 2.0 * f0 + f(-h)) / (h * h);
  Eigen::VectorXd d2 = (f(h / 2.0) - 2.0 * f0 + f(-h / 2.0)) / (h * h / 4.0);
  if (diag) diag->note((d2 - d1).template lpNorm<Eigen::Infinity>());
  return (4.0 * d2 - d1) / 3.0;
}

inline ChartPoint displaced(const ChartPoint& q, const Eigen::VectorXd& dq, double t) {
  ChartPoint out = q;
  out.Q += t * Eigen::Map<const Eigen::MatrixXd>(dq.data(), q.Q.cols(), q.Q.rows()).transpose();
  return out;
}

}  // namespace detail

// A vector field on M, evaluated through the tangent machinery at a point.
class VectorField {
 public:
  virtual ~VectorField() = default;
  virtual Eigen::VectorXd value(const Space& sp, const PointCache& pc) const = 0;
  // Evaluation at a bare chart point; overridden where the cache is not needed.
  virtual Eigen::VectorXd value_at(const Space& sp, const ChartPoint& q) const {
    return value(sp, sp.cache(q));
  }
};

// V_u = tangential projection of the constant ambient field u; the gradient
// field of y |-> <u, y> restricted to M.
class ProjectedField final : public VectorField {
 public:
  explicit ProjectedField(Eigen::VectorXd u) : u_(std::move(u)) {}
  Eigen::VectorXd value(const Space&, const PointCache& pc) const override { return pc.P * u_; }
  const Eigen::VectorXd& u() const { return u_; }

 private:
  Eigen::VectorXd u_;
};

// Killing field induced by a derivation D of S_{n+1}(A): K(y) = D y.
class KillingField final : public VectorField {
 public:
  explicit KillingField(Eigen::MatrixXd D) : D_(std::move(D)) {}
  Eigen::VectorXd value(const Space& sp, const PointCache& pc) const override {
    return D_ * sp.chart_vec(pc.q);
  }
  Eigen::VectorXd value_at(const Space& sp, const ChartPoint& q) const override {
    return D_ * sp.chart_vec(q);
  }
  const Eigen::MatrixXd& D() const { return D_; }

 private:
  Eigen::MatrixXd D_;
};

// A_V X = nabla_X V: tangential projection of the ambient directional
// derivative of the field along the chart line through pc.q with velocity X.
inline Eigen::VectorXd shape_operator(const Space& sp, const PointCache& pc,
                                      const VectorField& V, const Eigen::VectorXd& x,
                                      const FdConfig& cfg = {}, FdDiag* diag = nullptr) {
  Eigen::VectorXd dq = pc.coords_of(x);
  auto f = [&](double t) { return V.value_at(sp, detail::displaced(pc.q, dq, t)); };
  return pc.P * detail::richardson_d1(f, cfg.h1, diag);
}

// A_{V,V} X = nabla_V (nabla_X~ V) - A_V(nabla_V X~), with X~ the
// constant-chart-coordinates extension of X.
inline Eigen::VectorXd second_shape_operator(const Space& sp, const PointCache& pc,
                                             const VectorField& V, const Eigen::VectorXd& x,
                                             const FdConfig& cfg = {}, FdDiag* diag = nullptr) {
  Eigen::VectorXd v0 = V.value(sp, pc);
  Eigen::VectorXd dqv = pc.coords_of(v0);
  Eigen::VectorXd dqx = pc.coords_of(x);
  auto W = [&](const ChartPoint& qy) -> Eigen::VectorXd {  // (nabla_X~ V)(y)
    PointCache cy = sp.cache(qy);
    auto g = [&](double s) { return V.value_at(sp, detail::displaced(qy, dqx, s)); };
    return cy.P * detail::richardson_d1(g, cfg.h1, diag);
  };
  auto outer = [&](double t) -> Eigen::VectorXd { return W(detail::displaced(pc.q, dqv, t)); };
  Eigen::VectorXd nVW = pc.P * detail::richardson_d1(outer, cfg.h_outer, diag);
  auto coordfield = [&](double t) {
    return Eigen::VectorXd(sp.cache(detail::displaced(pc.q, dqv, t)).C * dqx);
  };
  Eigen::VectorXd Z = pc.P * detail::richardson_d1(coordfield, cfg.h_outer, diag);
  return nVW - shape_operator(sp, pc, V, Z, cfg, diag);
}

// ----------------------------------------------------------------------------
// Second fundamental form.

// Bilinear closed form at the origin; u, v are chart-coordinate directions
// (N x w, flattened (j,l)).  Division case:
//   II(u, v) = 1/4 [[u v^+ + v u^+, 0], [0, -2 <u,v>]],
// spin factor: II(u, v) = <u, v> (0, -1/2, 0)  (totally umbilic sphere).
inline HermitianMatrix sff_origin_matrix(const Space& sp, const Eigen::VectorXd& uflat,
                                         const Eigen::VectorXd& vflat) {
  const int nn = sp.N(), w = sp.w();
  if (sp.tag().kind == AlgKind::SpinFactor) {
    const double ip = uflat.dot(vflat);
    return HermitianMatrix::spin(Eigen::VectorXd::Zero(sp.tag().m), -0.5 * ip, 0.0);
  }
  const auto& t = detail::cd_table(w);
  HermitianMatrix M = HermitianMatrix::zero(sp.tag(), sp.n() + 1);
  for (int s = 0; s < nn; ++s)
    for (int k = 0; k < nn; ++k) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(w);
      for (int p = 0; p < w; ++p)
        for (int r = 0; r < w; ++r) {
          const double sgn = (r == 0) ? 1.0 : -1.0;  // conjugation of the second factor
          acc(t.idx[p][r]) +=
              t.sgn[p][r] * sgn *
              (uflat(s * w + p) * vflat(k * w + r) + vflat(s * w + p) * uflat(k * w + r));
        }
      M.set_entry(s, k, 0.25 * acc);
    }
  M.ent(nn, nn * w) = -0.5 * uflat.dot(vflat);
  return M;
}

inline Eigen::VectorXd sff_origin_vec(const Space& sp, const Eigen::VectorXd& u,
                                      const Eigen::VectorXd& v) {
  return sp.S().vec(sff_origin_matrix(sp, u, v));
}

// II(1/2 d/dx_l^j, 1/2 d/dx_r^k) at the origin, as in the closed form.
inline HermitianMatrix sff_closed_form_origin(const Space& sp, int j, int l, int k, int r) {
  if (j < 0 || j >= sp.N() || k < 0 || k >= sp.N() || l < 0 || l >= sp.w() || r < 0 ||
      r >= sp.w())
    throw std::out_of_range("sff index");
  Eigen::VectorXd u = Eigen::VectorXd::Zero(sp.dimT());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(sp.dimT());
  u(j * sp.w() + l) = 1.0;
  v(k * sp.w() + r) = 1.0;
  return sff_origin_matrix(sp, u, v);
}

// Numeric II(X, Y) anywhere: normal component of the chart's second
// directional derivative, polarized to be bilinear.
inline Eigen::VectorXd sff_numeric(const Space& sp, const PointCache& pc,
                                   const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                   const FdConfig& cfg = {}, FdDiag* diag = nullptr) {
  Eigen::VectorXd dqx = pc.coords_of(x), dqy = pc.coords_of(y);
  Eigen::VectorXd c0 = sp.chart_vec(pc.q);
  auto second = [&](const Eigen::VectorXd& dq) {
    auto f = [&](double t) { return sp.chart_vec(detail::displaced(pc.q, dq, t)); };
    return detail::richardson_d2(f, c0, cfg.h2, diag);
  };
  Eigen::VectorXd mixed =
      0.5 * (second(dqx + dqy) - second(dqx) - second(dqy));
  return mixed - pc.P * mixed;
}

// II via the right branch: closed form at the origin, numeric elsewhere.
// The closed form's arguments are coefficients over the unit vectors
// {1/2 d/dx_l^j}; raw chart-velocity coordinates are half of those.
inline Eigen::VectorXd sff_vec(const Space& sp, const PointCache& pc, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& y, const FdConfig& cfg = {},
                               FdDiag* diag = nullptr) {
  if (pc.q.is_origin())
    return sff_origin_vec(sp, 2.0 * pc.coords_of(x), 2.0 * pc.coords_of(y));
  return sff_numeric(sp, pc, x, y, cfg, diag);
}

}  // namespace apn
