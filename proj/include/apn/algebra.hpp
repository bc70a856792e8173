#pragma once

// Arithmetic for the normed division algebras R, C, H, O.
//
// Multiplication is generated by Cayley-Dickson doubling R -> C -> H -> O with
//   (a, b)(c, d) = (ac - d*b, da + bc*)        (* = conjugation)
// so the unit basis is i_0 = 1, i_1, ..., i_{d-1} with i_{k + d/2} = (0, i_k)
// at each doubling level. Products of basis units are +/- a single unit; the
// sign/index tables are generated once per dimension from the recursion.

#include <Eigen/Dense>

#include <array>
#include <stdexcept>
#include <string>

namespace apn {

enum class AlgKind { R, C, H, O, SpinFactor };

struct AlgebraTag {
  AlgKind kind = AlgKind::R;
  int m = 0;  // spin factor S_2(R^m) only

  bool is_division() const { return kind != AlgKind::SpinFactor; }

  // Real dimension of the division algebra (1, 2, 4, 8).
  int dim() const {
    switch (kind) {
      case AlgKind::R: return 1;
      case AlgKind::C: return 2;
      case AlgKind::H: return 4;
      case AlgKind::O: return 8;
      case AlgKind::SpinFactor:
        throw std::invalid_argument("spin factor has no division-algebra dimension");
    }
    throw std::logic_error("bad AlgKind");
  }

  // Number of imaginary units Lambda = dim - 1 (0 for the spin factor).
  int imag_units() const { return is_division() ? dim() - 1 : 0; }

  std::string name() const {
    switch (kind) {
      case AlgKind::R: return "R";
      case AlgKind::C: return "C";
      case AlgKind::H: return "H";
      case AlgKind::O: return "O";
      case AlgKind::SpinFactor: return "Rm";
    }
    return "?";
  }

  bool operator==(const AlgebraTag& o) const { return kind == o.kind && m == o.m; }
};

inline AlgebraTag tag_R() { return {AlgKind::R, 0}; }
inline AlgebraTag tag_C() { return {AlgKind::C, 0}; }
inline AlgebraTag tag_H() { return {AlgKind::H, 0}; }
inline AlgebraTag tag_O() { return {AlgKind::O, 0}; }
inline AlgebraTag tag_Rm(int m) {
  if (m < 1) throw std::invalid_argument("spin factor needs m >= 1");
  return {AlgKind::SpinFactor, m};
}

namespace detail {

// Basis-unit multiplication tables: i_a i_b = sgn[a][b] * i_{idx[a][b]}.
struct CdTable {
  int d = 1;
  std::array<std::array<int, 8>, 8> idx{};
  std::array<std::array<double, 8>, 8> sgn{};
};

inline Eigen::VectorXd cd_mult_rec(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const int d = static_cast<int>(x.size());
  if (d == 1) {
    Eigen::VectorXd z(1);
    z(0) = x(0) * y(0);
    return z;
  }
  const int h = d / 2;
  auto conj_half = [h](const Eigen::VectorXd& v) {
    Eigen::VectorXd w = v;
    w.tail(h - 1) *= -1.0;
    return w;
  };
  Eigen::VectorXd a = x.head(h), b = x.tail(h);
  Eigen::VectorXd c = y.head(h), e = y.tail(h);
  Eigen::VectorXd z(d);
  z.head(h) = cd_mult_rec(a, c) - cd_mult_rec(conj_half(e), b);
  z.tail(h) = cd_mult_rec(e, a) + cd_mult_rec(b, conj_half(c));
  return z;
}

inline const CdTable& cd_table(int d) {
  static const std::array<CdTable, 4> tables = [] {
    std::array<CdTable, 4> ts;
    int slot = 0;
    for (int d : {1, 2, 4, 8}) {
      CdTable t;
      t.d = d;
      for (int a = 0; a < d; ++a) {
        Eigen::VectorXd ea = Eigen::VectorXd::Zero(d);
        ea(a) = 1.0;
        for (int b = 0; b < d; ++b) {
          Eigen::VectorXd eb = Eigen::VectorXd::Zero(d);
          eb(b) = 1.0;
          Eigen::VectorXd z = cd_mult_rec(ea, eb);
          int k = 0;
          z.cwiseAbs().maxCoeff(&k);
          t.idx[a][b] = k;
          t.sgn[a][b] = z(k);
        }
      }
      ts[slot++] = t;
    }
    return ts;
  }();
  switch (d) {
    case 1: return tables[0];
    case 2: return tables[1];
    case 4: return tables[2];
    case 8: return tables[3];
  }
  throw std::invalid_argument("division algebra dimension must be 1, 2, 4 or 8");
}

}  // namespace detail

// Element of R, C, H or O as a coefficient vector over {i_0 = 1, i_1, ..., i_Lambda}.
struct AlgebraElement {
  AlgebraTag tag;
  Eigen::VectorXd c;

  AlgebraElement() : tag(tag_R()), c(Eigen::VectorXd::Zero(1)) {}
  AlgebraElement(AlgebraTag t, Eigen::VectorXd coeffs) : tag(t), c(std::move(coeffs)) {
    require_division(tag);
    if (c.size() != tag.dim()) throw std::invalid_argument("coefficient length != algebra dimension");
  }

  static void require_division(const AlgebraTag& t) {
    if (!t.is_division())
      throw std::invalid_argument("division-algebra arithmetic rejects the spin factor tag");
  }

  static AlgebraElement zero(AlgebraTag t) {
    require_division(t);
    return AlgebraElement(t, Eigen::VectorXd::Zero(t.dim()));
  }
  static AlgebraElement unit(AlgebraTag t, int l) {
    require_division(t);
    if (l < 0 || l >= t.dim()) throw std::invalid_argument("unit index out of range");
    Eigen::VectorXd v = Eigen::VectorXd::Zero(t.dim());
    v(l) = 1.0;
    return AlgebraElement(t, std::move(v));
  }
  static AlgebraElement real(AlgebraTag t, double x) {
    AlgebraElement e = zero(t);
    e.c(0) = x;
    return e;
  }
};

inline AlgebraElement mul(const AlgebraElement& a, const AlgebraElement& b) {
  if (!(a.tag == b.tag)) throw std::invalid_argument("mul: algebra tag mismatch");
  const int d = a.tag.dim();
  const auto& t = detail::cd_table(d);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < d; ++i) {
    if (a.c(i) == 0.0) continue;
    for (int j = 0; j < d; ++j) z(t.idx[i][j]) += t.sgn[i][j] * a.c(i) * b.c(j);
  }
  return AlgebraElement(a.tag, std::move(z));
}

inline AlgebraElement conj(const AlgebraElement& a) {
  AlgebraElement b = a;
  b.c.tail(a.tag.dim() - 1) *= -1.0;
  return b;
}

inline double re(const AlgebraElement& a) { return a.c(0); }
inline double norm2(const AlgebraElement& a) { return a.c.squaredNorm(); }

inline AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
  if (!(a.tag == b.tag)) throw std::invalid_argument("add: algebra tag mismatch");
  return AlgebraElement(a.tag, a.c + b.c);
}
inline AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
  if (!(a.tag == b.tag)) throw std::invalid_argument("sub: algebra tag mismatch");
  return AlgebraElement(a.tag, a.c - b.c);
}
inline AlgebraElement operator*(double s, const AlgebraElement& a) {
  return AlgebraElement(a.tag, s * a.c);
}

// i_a * i_b as (sign, index); the pinned multiplication convention in table form.
inline std::pair<double, int> unit_product(const AlgebraTag& tag, int a, int b) {
  AlgebraElement::require_division(tag);
  const auto& t = detail::cd_table(tag.dim());
  return {t.sgn[a][b], t.idx[a][b]};
}

}  // namespace apn
