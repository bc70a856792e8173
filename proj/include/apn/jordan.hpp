#pragma once

// Formally real Jordan algebras: S_n(A) for A in {R, C, H, O} with
// A o B = (AB + BA)/2, and the spin factor S_2(R^m) = R^m + R^{1,1} of
// matrices [[a-b, v], [v^T, a+b]] with v.w = v^T w.
//
// The module inner product is <A, B> = 2 Re tr(AB). JordanContext fixes an
// orthonormal basis of S and provides coordinates ("vec") plus the Jordan
// product as precomputed left-multiplication operators, which is what every
// hot path downstream uses.

#include "apn/algebra.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace apn {

class HermitianMatrix {
 public:
  AlgebraTag tag;
  int n = 0;            // matrix size (spin factor: conceptually 2x2)
  Eigen::MatrixXd ent;  // division: n x (n*d), entry (i,j) = ent.block(i, j*d, 1, d)
  Eigen::VectorXd v;    // spin factor
  double b = 0.0, a = 0.0;

  HermitianMatrix() = default;

  bool is_spin() const { return tag.kind == AlgKind::SpinFactor; }

  static HermitianMatrix zero(AlgebraTag tag, int n) {
    check_shape(tag, n);
    HermitianMatrix h;
    h.tag = tag;
    h.n = n;
    if (tag.is_division())
      h.ent = Eigen::MatrixXd::Zero(n, n * tag.dim());
    else
      h.v = Eigen::VectorXd::Zero(tag.m);
    return h;
  }

  static HermitianMatrix identity(AlgebraTag tag, int n) {
    HermitianMatrix h = zero(tag, n);
    if (h.is_spin()) {
      h.a = 1.0;
    } else {
      for (int i = 0; i < n; ++i) h.ent(i, i * tag.dim()) = 1.0;
    }
    return h;
  }

  static HermitianMatrix spin(Eigen::VectorXd v, double b, double a) {
    HermitianMatrix h;
    h.tag = tag_Rm(static_cast<int>(v.size()));
    h.n = 2;
    h.v = std::move(v);
    h.b = b;
    h.a = a;
    return h;
  }

  static void check_shape(AlgebraTag tag, int n) {
    if (tag.kind == AlgKind::O && n > 3)
      throw std::invalid_argument("octonion Hermitian matrices exist only for n <= 3");
    if (tag.kind == AlgKind::SpinFactor && n != 2)
      throw std::invalid_argument("spin factor is 2x2");
    if (n < 1) throw std::invalid_argument("matrix size must be positive");
  }

  Eigen::VectorXd entry(int i, int j) const {
    return ent.block(i, j * tag.dim(), 1, tag.dim()).transpose();
  }
  void set_entry(int i, int j, const Eigen::VectorXd& x) {
    ent.block(i, j * tag.dim(), 1, tag.dim()) = x.transpose();
  }
  // sets (i,j) and mirrors the conjugate at (j,i)
  void set_pair(int i, int j, const Eigen::VectorXd& x) {
    set_entry(i, j, x);
    if (i != j) {
      Eigen::VectorXd xc = x;
      xc.tail(tag.dim() - 1) *= -1.0;
      set_entry(j, i, xc);
    }
  }

  HermitianMatrix& operator+=(const HermitianMatrix& o) {
    if (is_spin()) {
      v += o.v;
      b += o.b;
      a += o.a;
    } else {
      ent += o.ent;
    }
    return *this;
  }
  HermitianMatrix& operator*=(double s) {
    if (is_spin()) {
      v *= s;
      b *= s;
      a *= s;
    } else {
      ent *= s;
    }
    return *this;
  }
  friend HermitianMatrix operator+(HermitianMatrix x, const HermitianMatrix& y) { return x += y; }
  friend HermitianMatrix operator*(double s, HermitianMatrix x) { return x *= s; }
  friend HermitianMatrix operator-(HermitianMatrix x, const HermitianMatrix& y) {
    return x += (-1.0 * y);
  }
};

namespace detail {

// Ordinary matrix product over A; each output entry is a sum of binary
// octonion products, so no parenthesization ambiguity arises.
inline HermitianMatrix raw_mult(const HermitianMatrix& X, const HermitianMatrix& Y) {
  const int d = X.tag.dim(), n = X.n;
  const auto& t = cd_table(d);
  HermitianMatrix Z = HermitianMatrix::zero(X.tag, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
      for (int k = 0; k < n; ++k)
        for (int p = 0; p < d; ++p) {
          const double xp = X.ent(i, k * d + p);
          if (xp == 0.0) continue;
          for (int q = 0; q < d; ++q) acc(t.idx[p][q]) += t.sgn[p][q] * xp * Y.ent(k, j * d + q);
        }
      Z.set_entry(i, j, acc);
    }
  return Z;
}

}  // namespace detail

inline void check_same_shape(const HermitianMatrix& A, const HermitianMatrix& B) {
  if (!(A.tag == B.tag) || A.n != B.n) throw std::invalid_argument("shape/tag mismatch");
}

inline HermitianMatrix jordan_mul(const HermitianMatrix& A, const HermitianMatrix& B) {
  check_same_shape(A, B);
  if (A.is_spin()) {
    // (v,b,a) o (w,c,e) = (a w + e v, a c + e b, a e + b c + v.w)
    return HermitianMatrix::spin(A.a * B.v + B.a * A.v, A.a * B.b + B.a * A.b,
                                 A.a * B.a + A.b * B.b + A.v.dot(B.v));
  }
  HermitianMatrix Z = detail::raw_mult(A, B);
  HermitianMatrix W = detail::raw_mult(B, A);
  return 0.5 * (Z + W);
}

inline double re_trace(const HermitianMatrix& A) {
  if (A.is_spin()) return 2.0 * A.a;
  double s = 0.0;
  for (int i = 0; i < A.n; ++i) s += A.ent(i, i * A.tag.dim());
  return s;
}

// <A, B> = 2 Re tr(AB); Re(xy) = x0 y0 - sum_{l>=1} x_l y_l keeps this O(n^2 d).
inline double inner(const HermitianMatrix& A, const HermitianMatrix& B) {
  check_same_shape(A, B);
  if (A.is_spin()) return 4.0 * (A.a * B.a + A.b * B.b + A.v.dot(B.v));
  const int d = A.tag.dim(), n = A.n;
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      // Re(A_ij B_ji)
      double t = A.ent(i, j * d) * B.ent(j, i * d);
      for (int l = 1; l < d; ++l) t -= A.ent(i, j * d + l) * B.ent(j, i * d + l);
      s += t;
    }
  return 2.0 * s;
}

inline double frob_norm(const HermitianMatrix& A) { return std::sqrt(inner(A, A)); }

inline bool is_rank_one_projection(const HermitianMatrix& p, double tol = 1e-9) {
  HermitianMatrix r = jordan_mul(p, p) - p;
  return frob_norm(r) <= tol && std::abs(re_trace(p) - 1.0) <= tol;
}

// Fixed orthonormal basis of S_n(A) / S_2(R^m).
//
// Order: [identity/|identity|] then the trace-free list in the documented
// order: off-diagonal units (j < k lexicographic, l ascending), then the
// diagonal ladder diag(1,..,1,-r,0,..)/norm.  Spin factor: v-units then b.
class JordanContext {
 public:
  JordanContext(AlgebraTag tag, int n) : tag_(tag), n_(n) {
    HermitianMatrix::check_shape(tag, n);
    build_basis();
    build_mult_ops();
  }

  const AlgebraTag& tag() const { return tag_; }
  int n() const { return n_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  const std::vector<HermitianMatrix>& basis() const { return basis_; }
  // trace-free part of the basis (everything after the identity direction)
  std::vector<HermitianMatrix> trace_free_basis() const {
    return {basis_.begin() + 1, basis_.end()};
  }

  // Coordinates over the orthonormal basis, by the closed component formulas.
  Eigen::VectorXd vec(const HermitianMatrix& A) const {
    Eigen::VectorXd x(dim());
    if (A.is_spin()) {
      x(0) = 2.0 * A.a;
      x.segment(1, tag_.m) = 2.0 * A.v;
      x(dim() - 1) = 2.0 * A.b;
      return x;
    }
    const int d = tag_.dim();
    x(0) = 2.0 * re_trace(A) / std::sqrt(2.0 * n_);
    int c = 1;
    for (int j = 0; j < n_; ++j)
      for (int k = j + 1; k < n_; ++k)
        for (int l = 0; l < d; ++l) x(c++) = 2.0 * A.ent(j, k * d + l);
    for (int r = 1; r < n_; ++r) {
      double s = 0.0;
      for (int i = 0; i < r; ++i) s += A.ent(i, i * d);
      s -= r * A.ent(r, r * d);
      x(c++) = 2.0 * s / std::sqrt(2.0 * r * (r + 1.0));
    }
    return x;
  }

  // Reference implementation of vec (pairwise inner products); for tests.
  Eigen::VectorXd vec_by_inner(const HermitianMatrix& A) const {
    Eigen::VectorXd x(dim());
    for (int i = 0; i < dim(); ++i) x(i) = inner(A, basis_[i]);
    return x;
  }
  HermitianMatrix unvec(const Eigen::VectorXd& x) const {
    HermitianMatrix A = HermitianMatrix::zero(tag_, n_);
    for (int i = 0; i < dim(); ++i) A += x(i) * basis_[i];
    return A;
  }

  // L_i with L_i y = vec(B_i o unvec(y)); the Jordan product in coordinates.
  const std::vector<Eigen::MatrixXd>& mult_ops() const { return mult_ops_; }

  Eigen::VectorXd jordan_mul_vec(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(dim());
    for (int i = 0; i < dim(); ++i)
      if (x(i) != 0.0) z += x(i) * (mult_ops_[i] * y);
    return z;
  }

  Eigen::VectorXd identity_vec() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(dim());
    x(0) = inner(HermitianMatrix::identity(tag_, n_), basis_[0]);
    return x;
  }

 private:
  void build_basis() {
    basis_.clear();
    if (tag_.kind == AlgKind::SpinFactor) {
      const int m = tag_.m;
      basis_.push_back(HermitianMatrix::spin(Eigen::VectorXd::Zero(m), 0.0, 0.5));
      for (int i = 0; i < m; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
        e(i) = 0.5;
        basis_.push_back(HermitianMatrix::spin(e, 0.0, 0.0));
      }
      basis_.push_back(HermitianMatrix::spin(Eigen::VectorXd::Zero(m), 0.5, 0.0));
      return;
    }
    const int d = tag_.dim();
    HermitianMatrix I = HermitianMatrix::identity(tag_, n_);
    basis_.push_back((1.0 / std::sqrt(2.0 * n_)) * I);
    for (int j = 0; j < n_; ++j)
      for (int k = j + 1; k < n_; ++k)
        for (int l = 0; l < d; ++l) {
          HermitianMatrix F = HermitianMatrix::zero(tag_, n_);
          Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
          x(l) = 0.5;
          F.set_pair(j, k, x);
          basis_.push_back(F);
        }
    for (int r = 1; r < n_; ++r) {
      HermitianMatrix D = HermitianMatrix::zero(tag_, n_);
      for (int i = 0; i < r; ++i) D.ent(i, i * d) = 1.0;
      D.ent(r, r * d) = -static_cast<double>(r);
      basis_.push_back((1.0 / std::sqrt(2.0 * r * (r + 1.0))) * D);
    }
  }

  void build_mult_ops() {
    const int D = dim();
    mult_ops_.assign(D, Eigen::MatrixXd::Zero(D, D));
    for (int i = 0; i < D; ++i)
      for (int j = i; j < D; ++j) {
        Eigen::VectorXd p = vec(jordan_mul(basis_[i], basis_[j]));
        mult_ops_[i].col(j) = p;
        mult_ops_[j].col(i) = p;
      }
  }

  AlgebraTag tag_;
  int n_;
  std::vector<HermitianMatrix> basis_;
  std::vector<Eigen::MatrixXd> mult_ops_;
};

// dim S_n(A) = n + d n(n-1)/2, and m + 2 for the spin factor.
inline int jordan_dim(AlgebraTag tag, int n) {
  if (tag.kind == AlgKind::SpinFactor) return tag.m + 2;
  return n + tag.dim() * n * (n - 1) / 2;
}

}  // namespace apn
