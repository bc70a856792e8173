#pragma once

// Deterministic sampling: per-sample generator streams derived from
// (seed, stream index) through splitmix64, so results are reproducible and
// independent of evaluation order.

#include "apn/chart.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace apn {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : eng_(splitmix64(seed ^ splitmix64(stream + 1))) {}

  double gauss() { return normal_(eng_); }
  double uniform() { return uni_(eng_); }
  int uniform_int(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  Eigen::VectorXd gauss_vec(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = gauss();
    return v;
  }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uni_{0.0, 1.0};
};

// Chart point with N(0, sigma^2) coordinates; sigma keeps the point well
// inside the chart, away from the cut locus.
inline ChartPoint random_chart_point(const Space& sp, Rng& rng, double sigma = 0.35) {
  Eigen::MatrixXd Q(sp.N(), sp.w());
  for (int i = 0; i < Q.rows(); ++i)
    for (int j = 0; j < Q.cols(); ++j) Q(i, j) = sigma * rng.gauss();
  return {Q};
}

// Orthonormal p-frame from Gram-Schmidt of standard normal tangent
// coordinates at the given point.
inline PFrame random_frame(const Space& sp, const PointCache& pc, int p, Rng& rng) {
  PFrame fr;
  fr.base = pc.q;
  fr.vectors = Eigen::MatrixXd(sp.dimS(), p);
  for (int a = 0; a < p; ++a) {
    Eigen::VectorXd v = pc.T * rng.gauss_vec(sp.dimT());
    for (int b = 0; b < a; ++b) v -= fr.vectors.col(b).dot(v) * fr.vectors.col(b);
    fr.vectors.col(a) = v / v.norm();
  }
  return fr;
}

inline PFrame random_frame(const Space& sp, const ChartPoint& q, int p, Rng& rng) {
  PointCache pc = sp.cache(q);
  return random_frame(sp, pc, p, rng);
}

}  // namespace apn
