#pragma once

#include <algorithm>
#include <numeric>

#include "projot/geodesic.hpp"
#include "projot/io.hpp"
#include "projot/regularity.hpp"

namespace pjt {

using namespace projot;

inline BinaryHomPoly binary_from(std::initializer_list<Complex> coeffs) {
  return BinaryHomPoly(std::vector<Complex>(coeffs));
}

inline ProjPoint pt2(Complex a, Complex b) { return ProjPoint::from_coords({a, b}); }

inline BinaryHomPoly random_binary(int d, Rng& rng) {
  std::vector<Complex> c(d + 1);
  for (auto& x : c) x = rng.cgauss();
  return BinaryHomPoly(std::move(c)).bw_normalized();
}

/// Random binary polynomial whose roots are simple and pairwise separated.
inline BinaryHomPoly random_separated_binary(int d, Rng& rng, double min_gap = 0.15) {
  for (;;) {
    BinaryHomPoly p = random_binary(d, rng);
    RootSet rs = all_roots(p);
    if (static_cast<int>(rs.roots.size()) != d) continue;
    double gap = 1e300;
    for (std::size_t i = 0; i < rs.roots.size(); ++i)
      for (std::size_t j = i + 1; j < rs.roots.size(); ++j)
        gap = std::min(gap, fs_distance(rs.roots[i].first, rs.roots[j].first));
    if (gap >= min_gap) return p;
  }
}

inline HomPoly random_hompoly(int n, int d, Rng& rng) {
  auto mis = multi_indices(n, d);
  CVector u = rng.cgauss_vector(static_cast<int>(mis.size()));
  u /= u.norm();
  return from_bw_coords(n, d, u);
}

/// Exhaustive-permutation W_q oracle on expanded unit atoms (d <= 8).
inline double brute_force_wq(const std::vector<ProjPoint>& xs, const std::vector<ProjPoint>& ys,
                             double q) {
  const int d = static_cast<int>(xs.size());
  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 1e300;
  do {
    double c = 0;
    for (int i = 0; i < d; ++i) c += std::pow(fs_distance(xs[i], ys[perm[i]]), q);
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::pow(best / d, 1.0 / q);
}

inline std::vector<ProjPoint> expanded_roots(const BinaryHomPoly& p) {
  RootSet rs = all_roots(p);
  std::vector<ProjPoint> out;
  for (auto& [pt, m] : rs.roots)
    for (int k = 0; k < m; ++k) out.push_back(pt);
  return out;
}

/// Companion-matrix eigenvalue oracle for the affine roots of
/// sum_k a_k x^k with a.back() != 0.
inline std::vector<Complex> companion_roots(const std::vector<Complex>& a) {
  const int m = static_cast<int>(a.size()) - 1;
  CMatrix comp = CMatrix::Zero(m, m);
  for (int i = 1; i < m; ++i) comp(i, i - 1) = 1;
  for (int i = 0; i < m; ++i) comp(i, m - 1) = -a[i] / a[m];
  Eigen::ComplexEigenSolver<CMatrix> es(comp);
  std::vector<Complex> out(m);
  for (int i = 0; i < m; ++i) out[i] = es.eigenvalues()(i);
  return out;
}

/// Greedy matching distance between two projective point sets.
inline double set_distance(std::vector<ProjPoint> a, std::vector<ProjPoint> b) {
  if (a.size() != b.size()) return 1e300;
  double worst = 0;
  std::vector<bool> used(b.size(), false);
  for (auto& x : a) {
    double best = 1e300;
    int bj = -1;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      double d = fs_distance(x, b[j]);
      if (d < best) {
        best = d;
        bj = static_cast<int>(j);
      }
    }
    used[bj] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

/// Max coefficientwise deviation after BW normalization and optimal phase.
inline double poly_distance_up_to_phase(const BinaryHomPoly& a, const BinaryHomPoly& b) {
  BinaryHomPoly x = a.bw_normalized(), y = b.bw_normalized();
  Complex inner(0, 0);
  // BW inner through the HomPoly route
  inner = bw_inner(y.to_hompoly(), x.to_hompoly());
  Complex phase = std::abs(inner) > 1e-14 ? std::conj(inner) / std::abs(inner) : Complex(1, 0);
  double worst = 0;
  for (int k = 0; k <= x.d(); ++k) worst = std::max(worst, std::abs(phase * y.coeff(k) - x.coeff(k)));
  return worst;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max({1e-300, std::abs(a), std::abs(b)}); }

}  // namespace pjt
