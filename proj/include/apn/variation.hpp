#pragma once

// Second variation of the volume of a tangent p-frame under vector fields,
// and the averaged trace over the trace-free directions of S'_{n+1}(A).
//
// Three routes are provided:
//   * trace_secvar_bruteforce: sum of Q_xi(V_u) over the trace-free basis,
//     each Q computed from covariant derivatives by finite differences;
//   * trace_secvar_sff: the double sum
//       sum_{j,k} (2 |II(e_j, n_k)|^2 - <II(e_j,e_j), II(n_k,n_k)>);
//   * trace_secvar_closedJ: -sum_l |J_l . xi|^2 at the origin (Leibniz rule).
//
// Q_xi(V) itself is evaluated as the exact second derivative of
// t |-> |(phi_t)_* xi|, valid for any field:
//   Q = sum_j <A_{V,V} e_j, e_j> + sum_j <A_V(A_V e_j), e_j> + sum_j |A_V e_j|^2
//       - 2 |sym(A_V|_xi)|_F^2 + (sum_j <A_V e_j, e_j>)^2.
// For gradient fields A_V is symmetric and this reduces algebraically to the
// familiar form (sum<A_V e_j,e_j>)^2 + 2 sum <A_V e_j,n_k>^2 + sum <A_{V,V}e_j,e_j>;
// for Killing fields it vanishes identically.

#include "apn/embedded.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace apn {

struct SecvarTolerances {
  double algebraic = 1e-9;   // identities, orthonormality, classification
  double crosscheck = 1e-5;  // closed-form cross checks
  double flow = 1e-3;        // flow oracle agreement
};

inline double second_variation(const Space& sp, const PFrame& fr, const VectorField& V,
                               const FdConfig& cfg = {}, FdDiag* diag = nullptr) {
  validate_frame(sp, fr);
  PointCache pc = sp.cache(fr.base);
  const int p = fr.p();
  const Eigen::MatrixXd& F = fr.vectors;
  Eigen::MatrixXd Av(sp.dimS(), p);
  for (int j = 0; j < p; ++j) Av.col(j) = shape_operator(sp, pc, V, F.col(j), cfg, diag);
  Eigen::MatrixXd M = Av.transpose() * F;  // M(a,b) = <A_V e_a, e_b>
  Eigen::MatrixXd Ssym = 0.5 * (M + M.transpose());
  const double trS = M.trace();
  double q = trS * trS - 2.0 * Ssym.squaredNorm() + Av.squaredNorm();
  for (int a = 0; a < p; ++a) {
    q += shape_operator(sp, pc, V, Av.col(a), cfg, diag).dot(F.col(a));
    q += second_shape_operator(sp, pc, V, F.col(a), cfg, diag).dot(F.col(a));
  }
  return q;
}

// The expanded gradient-field form of the second variation formula; valid for
// gradient fields only (projected fields).  Normal frame completed from the
// tangent basis by Gram-Schmidt in the documented order.
inline double second_variation_gradient_form(const Space& sp, const PFrame& fr,
                                             const VectorField& V, const FdConfig& cfg = {},
                                             FdDiag* diag = nullptr) {
  validate_frame(sp, fr);
  PointCache pc = sp.cache(fr.base);
  const int p = fr.p();
  const Eigen::MatrixXd& F = fr.vectors;
  // complete to an orthonormal tangent basis
  std::vector<Eigen::VectorXd> normals;
  for (int c = 0; c < sp.dimT(); ++c) {
    Eigen::VectorXd v = pc.T.col(c);
    for (int a = 0; a < p; ++a) v -= F.col(a).dot(v) * F.col(a);
    for (const auto& t : normals) v -= t.dot(v) * t;
    if (v.norm() > 1e-6) normals.push_back(v / v.norm());
  }
  double diag_sum = 0.0, offdiag_sq = 0.0, avv = 0.0;
  for (int j = 0; j < p; ++j) {
    Eigen::VectorXd Aj = shape_operator(sp, pc, V, F.col(j), cfg, diag);
    diag_sum += Aj.dot(F.col(j));
    for (const auto& nk : normals) {
      const double c = Aj.dot(nk);
      offdiag_sq += c * c;
    }
    avv += second_shape_operator(sp, pc, V, F.col(j), cfg, diag).dot(F.col(j));
  }
  return diag_sum * diag_sum + 2.0 * offdiag_sq + avv;
}

struct TraceResult {
  double total = 0.0;
  std::vector<double> per_field;  // Q_xi(V_u), u in trace-free basis order
  double fd_disc = 0.0;           // worst Richardson two-level disagreement
};

// Sum of Q_xi(V_u) over the deterministic trace-free basis, in basis order.
inline TraceResult trace_secvar_bruteforce(const Space& sp, const PFrame& fr,
                                           const FdConfig& cfg = {}) {
  TraceResult out;
  FdDiag diag;
  for (int i = 1; i < sp.dimS(); ++i) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(sp.dimS());
    u(i) = 1.0;
    const double q = second_variation(sp, fr, ProjectedField(u), cfg, &diag);
    out.per_field.push_back(q);
    out.total += q;
  }
  out.fd_disc = diag.worst;
  return out;
}

// Theorem route: sum over frame x normal pairs of the II combination.
inline double trace_secvar_sff(const Space& sp, const PFrame& fr, const FdConfig& cfg = {},
                               FdDiag* diag = nullptr) {
  validate_frame(sp, fr);
  PointCache pc = sp.cache(fr.base);
  const int p = fr.p();
  const Eigen::MatrixXd& F = fr.vectors;
  std::vector<Eigen::VectorXd> normals;
  for (int c = 0; c < sp.dimT(); ++c) {
    Eigen::VectorXd v = pc.T.col(c);
    for (int a = 0; a < p; ++a) v -= F.col(a).dot(v) * F.col(a);
    for (const auto& t : normals) v -= t.dot(v) * t;
    if (v.norm() > 1e-6) normals.push_back(v / v.norm());
  }
  double tr = 0.0;
  std::vector<Eigen::VectorXd> IInn(normals.size());
  for (std::size_t k = 0; k < normals.size(); ++k)
    IInn[k] = sff_vec(sp, pc, normals[k], normals[k], cfg, diag);
  for (int j = 0; j < p; ++j) {
    Eigen::VectorXd IIee = sff_vec(sp, pc, F.col(j), F.col(j), cfg, diag);
    for (std::size_t k = 0; k < normals.size(); ++k) {
      Eigen::VectorXd IIen = sff_vec(sp, pc, F.col(j), normals[k], cfg, diag);
      tr += 2.0 * IIen.squaredNorm() - IIee.dot(IInn[k]);
    }
  }
  return tr;
}

namespace detail {

// |L . xi|^2 for the Leibniz action of an endomorphism given by its images
// rep_j = L e_j: sum over j, j' of det Gram(xi_{j -> rep_j}, xi_{j' -> rep_j'}).
inline double leibniz_wedge_norm2(const Eigen::MatrixXd& F, const Eigen::MatrixXd& reps) {
  const int p = static_cast<int>(F.cols());
  double val = 0.0;
  Eigen::MatrixXd G(p, p);
  for (int j = 0; j < p; ++j)
    for (int jp = 0; jp < p; ++jp) {
      for (int a = 0; a < p; ++a) {
        const Eigen::VectorXd& va = (a == j) ? reps.col(j) : F.col(a);
        for (int b = 0; b < p; ++b) {
          const Eigen::VectorXd& vb = (b == jp) ? reps.col(jp) : F.col(b);
          G(a, b) = va.dot(vb);
        }
      }
      val += G.determinant();
    }
  return val;
}

}  // namespace detail

// -sum_l |J_l . xi|^2 at the origin.  Not defined for the spin factor (the
// J family is empty there; the sphere case is covered by the sff route).
inline double trace_secvar_closedJ(const Space& sp, const PFrame& fr) {
  validate_frame(sp, fr);
  if (sp.tag().kind == AlgKind::SpinFactor)
    throw std::domain_error("closedJ: spin factor has no complex structures; use the sff route");
  if (!fr.base.is_origin(1e-14))
    throw std::domain_error("closedJ: closed form is anchored at the origin");
  if (sp.Lambda() == 0) return 0.0;  // A = R
  PointCache pc = sp.cache(fr.base);
  const int p = fr.p();
  Eigen::MatrixXd coords(sp.dimT(), p);
  for (int a = 0; a < p; ++a) coords.col(a) = pc.coords_of(fr.vectors.col(a));
  double tot = 0.0;
  for (int l = 1; l <= sp.Lambda(); ++l) {
    Eigen::MatrixXd reps = pc.C * (sp.J_coord_matrix(l) * coords);
    tot += detail::leibniz_wedge_norm2(fr.vectors, reps);
  }
  return -tot;
}

struct Classification {
  bool complex_frame = false;
  std::vector<int> failing_l;    // J indices with |J_l . xi| > tol
  std::vector<double> j_norms;   // |J_l . xi| for l = 1..Lambda
  std::string label() const { return complex_frame ? "complex-frame" : "strictly-unstable-on-average"; }
};

inline Classification classify_frame(const Space& sp, const PFrame& fr, double tol = 1e-6) {
  validate_frame(sp, fr);
  Classification out;
  if (sp.tag().kind == AlgKind::SpinFactor) {
    // no J family: -pq < 0 exactly when 0 < p < dim
    out.complex_frame = (fr.p() == sp.dimT());
    return out;
  }
  if (!fr.base.is_origin(1e-14))
    throw std::domain_error("classify_frame: anchored at the origin");
  PointCache pc = sp.cache(fr.base);
  const int p = fr.p();
  Eigen::MatrixXd coords(sp.dimT(), p);
  for (int a = 0; a < p; ++a) coords.col(a) = pc.coords_of(fr.vectors.col(a));
  out.complex_frame = true;
  for (int l = 1; l <= sp.Lambda(); ++l) {
    Eigen::MatrixXd reps = pc.C * (sp.J_coord_matrix(l) * coords);
    const double nrm = std::sqrt(std::max(0.0, detail::leibniz_wedge_norm2(fr.vectors, reps)));
    out.j_norms.push_back(nrm);
    if (nrm > tol) {
      out.complex_frame = false;
      out.failing_l.push_back(l);
    }
  }
  return out;
}

// ----------------------------------------------------------------------------
// Flow oracle: integrate the flow of V_u in chart coordinates together with
// the variational equation for the frame pushforward, and take the central
// second difference of t |-> |(phi_t)_* xi| at 0.

struct FlowConfig {
  double h_t = 1e-3;       // outer second-difference step
  int rk_steps = 8;        // RK4 steps per leg
  double jac_step = 1e-5;  // FD step for the Jacobian of the coordinate velocity
  double conv_tol = 1e-4;  // two-level disagreement tolerance
  double domain_radius = 25.0;
};

class FlowDomainError : public std::runtime_error {
 public:
  explicit FlowDomainError(const std::string& w) : std::runtime_error(w) {}
};

namespace detail {

inline Eigen::VectorXd flow_velocity(const Space& sp, const Eigen::VectorXd& qflat,
                                     const Eigen::VectorXd& u, int rows, int cols) {
  ChartPoint q{Eigen::Map<const Eigen::MatrixXd>(qflat.data(), cols, rows).transpose()};
  PointCache pc = sp.cache(q);
  return pc.coords_of(pc.P * u);
}

}  // namespace detail

inline double flow_oracle(const Space& sp, const PFrame& fr, const Eigen::VectorXd& u,
                          const FlowConfig& fc = {}, const FdConfig& cfg = {}) {
  validate_frame(sp, fr);
  PointCache pc0 = sp.cache(fr.base);
  const int p = fr.p(), dimT = sp.dimT();
  const int rows = static_cast<int>(fr.base.Q.rows()), cols = static_cast<int>(fr.base.Q.cols());
  Eigen::MatrixXd U0(dimT, p);
  for (int a = 0; a < p; ++a) U0.col(a) = pc0.coords_of(fr.vectors.col(a));
  Eigen::MatrixXd Qt = fr.base.Q.transpose();  // row-major (j,l) flattening
  Eigen::VectorXd q0 = Eigen::Map<const Eigen::VectorXd>(Qt.data(), rows * cols);

  auto vel = [&](const Eigen::VectorXd& q) {
    return detail::flow_velocity(sp, q, u, rows, cols);
  };
  auto dvel = [&](const Eigen::VectorXd& q) {
    Eigen::MatrixXd Df(dimT, dimT);
    for (int c = 0; c < dimT; ++c) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(dimT);
      e(c) = fc.jac_step;
      Df.col(c) = (vel(q + e) - vel(q - e)) / (2.0 * fc.jac_step);
    }
    return Df;
  };
  auto norm_at = [&](const Eigen::VectorXd& q, const Eigen::MatrixXd& J) {
    if (q.norm() > fc.domain_radius) throw FlowDomainError("flow left the chart domain");
    ChartPoint cp{Eigen::Map<const Eigen::MatrixXd>(q.data(), cols, rows).transpose()};
    Eigen::MatrixXd C = sp.coord_cols(cp);
    Eigen::MatrixXd V = C * (J * U0);  // ambient pushforward vectors
    Eigen::MatrixXd G = V.transpose() * V;
    return std::sqrt(G.determinant());
  };
  auto integrate = [&](double tmax) {
    Eigen::VectorXd q = q0;
    Eigen::MatrixXd J = Eigen::MatrixXd::Identity(dimT, dimT);
    const int steps = fc.rk_steps;
    const double dt = tmax / steps;
    for (int s = 0; s < steps; ++s) {
      // RK4 on the pair (q, J)
      Eigen::VectorXd k1 = vel(q);
      Eigen::MatrixXd K1 = dvel(q) * J;
      Eigen::VectorXd k2 = vel(q + 0.5 * dt * k1);
      Eigen::MatrixXd K2 = dvel(q + 0.5 * dt * k1) * (J + 0.5 * dt * K1);
      Eigen::VectorXd k3 = vel(q + 0.5 * dt * k2);
      Eigen::MatrixXd K3 = dvel(q + 0.5 * dt * k2) * (J + 0.5 * dt * K2);
      Eigen::VectorXd k4 = vel(q + dt * k3);
      Eigen::MatrixXd K4 = dvel(q + dt * k3) * (J + dt * K3);
      q += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      J += dt / 6.0 * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
    }
    return norm_at(q, J);
  };
  auto second_diff = [&](double h) {
    return (integrate(h) - 2.0 * 1.0 + integrate(-h)) / (h * h);
  };
  const double d1 = second_diff(fc.h_t);
  const double d2 = second_diff(fc.h_t / 2.0);
  if (std::abs(d2 - d1) > fc.conv_tol * std::max(1.0, std::abs(d2)))
    throw NonConvergence("flow oracle: second-difference levels disagree");
  return (4.0 * d2 - d1) / 3.0;
}

// ----------------------------------------------------------------------------
// Full report for one frame.

struct VariationReport {
  double trace_bruteforce = 0.0;
  double trace_sff = 0.0;
  std::optional<double> trace_closedJ;  // origin, division algebras only
  std::vector<double> per_field;
  Classification classification;
  SecvarTolerances tolerances;
  double fd_disc = 0.0;
};

inline VariationReport make_variation_report(const Space& sp, const PFrame& fr,
                                             const FdConfig& cfg = {},
                                             const SecvarTolerances& tol = {}) {
  VariationReport rep;
  rep.tolerances = tol;
  TraceResult brute = trace_secvar_bruteforce(sp, fr, cfg);
  rep.trace_bruteforce = brute.total;
  rep.per_field = brute.per_field;
  rep.fd_disc = brute.fd_disc;
  rep.trace_sff = trace_secvar_sff(sp, fr, cfg);
  const bool origin = fr.base.is_origin(1e-14);
  if (origin && sp.tag().is_division()) rep.trace_closedJ = trace_secvar_closedJ(sp, fr);
  if (origin || sp.tag().kind == AlgKind::SpinFactor)
    rep.classification = classify_frame(sp, fr, tol.crosscheck);
  else
    rep.classification.complex_frame = std::abs(rep.trace_bruteforce) <= tol.crosscheck;
  return rep;
}

}  // namespace apn
