#pragma once

#include <algorithm>

#include "projot/polynomial.hpp"

namespace projot {

/// Projective zeros of a binary form with multiplicities. Multiplicities sum
/// to d; residual is max |p(b)| over the listed unit representatives.
struct RootSet {
  std::vector<std::pair<ProjPoint, int>> roots;
  double residual = 0.0;

  int total_multiplicity() const {
    int s = 0;
    for (auto& [p, m] : roots) s += m;
    return s;
  }
};

inline double default_cluster_radius(int d) { return 1e-6 * d; }

namespace detail {

// Horner value and derivative of sum_k a[k] x^k.
inline void horner(const std::vector<Complex>& a, Complex x, Complex& f, Complex& df) {
  f = a.back();
  df = Complex(0, 0);
  for (int k = static_cast<int>(a.size()) - 2; k >= 0; --k) {
    df = df * x + f;
    f = f * x + a[k];
  }
}

inline double horner_scale(const std::vector<Complex>& a, Complex x) {
  double ax = std::abs(x), t = 1.0, s = 0.0;
  for (auto& c : a) {
    s += std::abs(c) * t;
    t *= ax;
  }
  return s;
}

/// Aberth-Ehrlich on sum_k a[k] x^k with a.back() != 0. Optional warm start.
/// 200-iteration cap with a deterministic perturbation restart on stagnation.
inline std::vector<Complex> aberth(const std::vector<Complex>& coeffs,
                                   const std::vector<Complex>* warm = nullptr) {
  const int m = static_cast<int>(coeffs.size()) - 1;
  std::vector<Complex> a = coeffs;
  Complex lead = a[m];
  for (auto& c : a) c /= lead;
  if (m == 1) return {-a[0]};

  std::vector<Complex> z(m);
  if (warm != nullptr && static_cast<int>(warm->size()) == m) {
    z = *warm;
  } else {
    double r = 0.0;
    for (int k = 0; k < m; ++k) r = std::max(r, std::pow(std::abs(a[k]), 1.0 / (m - k)));
    r = 2.0 * std::max(r, 0.5);
    for (int i = 0; i < m; ++i) z[i] = std::polar(r, 2.0 * kPi * i / m + 0.4);
  }

  const double eps = 2.220446049250313e-16;
  double best_res = 1e300;
  int stagnation = 0;
  for (int iter = 0; iter < 200; ++iter) {
    double max_step = 0.0, max_res = 0.0;
    for (int i = 0; i < m; ++i) {
      Complex f, df;
      horner(a, z[i], f, df);
      max_res = std::max(max_res, std::abs(f) / std::max(1e-300, horner_scale(a, z[i])));
      if (std::abs(f) == 0.0) continue;
      Complex w = (df != Complex(0, 0)) ? f / df : Complex(1e-3, 0);
      Complex s(0, 0);
      for (int j = 0; j < m; ++j) {
        if (j == i) continue;
        Complex diff = z[i] - z[j];
        if (std::abs(diff) < 1e-300) diff = Complex(1e-30, 1e-30);
        s += Complex(1, 0) / diff;
      }
      Complex denom = Complex(1, 0) - w * s;
      Complex step = (std::abs(denom) > 1e-300) ? w / denom : w;
      z[i] -= step;
      max_step = std::max(max_step, std::abs(step) / (1.0 + std::abs(z[i])));
    }
    if (max_res <= 16 * eps || max_step <= 16 * eps) return z;
    if (max_res < best_res * 0.9) {
      best_res = max_res;
      stagnation = 0;
    } else if (++stagnation > 30) {
      // deterministic restart kick
      for (int i = 0; i < m; ++i)
        z[i] += 1e-3 * std::polar(1.0 + std::abs(z[i]), 2.0 * kPi * ((i * 2654435761u + iter) % 97) / 97.0);
      stagnation = 0;
      best_res = 1e300;
    }
  }
  // final check against the advertised residual target
  double res = 0.0;
  for (int i = 0; i < m; ++i) {
    Complex f, df;
    horner(a, z[i], f, df);
    res = std::max(res, std::abs(f) / std::max(1e-300, horner_scale(a, z[i])));
  }
  if (res > 1e-12) throw RootFindingFailed("Aberth did not converge, best residual " + std::to_string(res));
  return z;
}

inline void newton_polish(const std::vector<Complex>& a, Complex& z) {
  for (int it = 0; it < 3; ++it) {
    Complex f, df;
    horner(a, z, f, df);
    if (std::abs(df) < 1e-300) return;
    Complex step = f / df;
    if (std::abs(step) > 0.5 * (1.0 + std::abs(z))) return;  // keep multiple-root clusters intact
    z -= step;
  }
}

}  // namespace detail

/// All projective zeros of p with multiplicities. Structural zeros at [0,1]
/// and [1,0] come from vanishing extreme coefficients; the reduced polynomial
/// is solved in both affine charts and the halves |lambda| <= 1 / |nu| < 1
/// are combined, so no root is ever lost near a chart's infinity. Roots
/// closer than cluster_radius are merged and counted with multiplicity.
inline RootSet all_roots(const BinaryHomPoly& p_in, double cluster_radius = -1.0,
                         const std::vector<Complex>* warm = nullptr) {
  const int d = p_in.d();
  if (cluster_radius < 0) cluster_radius = default_cluster_radius(d);
  double maxc = p_in.max_abs_coeff();
  if (!(maxc > 0)) throw InvalidPolynomial("all_roots of the zero polynomial");
  BinaryHomPoly p = p_in.bw_normalized();
  maxc = p.max_abs_coeff();

  const double zero_tol = 1e-13 * maxc;
  int lead0 = 0;  // multiplicity of [0,1]: count of vanishing c_0, c_1, ...
  while (lead0 < d && std::abs(p.coeff(lead0)) <= zero_tol) ++lead0;
  int lead1 = 0;  // multiplicity of [1,0]: count of vanishing c_d, c_{d-1}, ...
  while (lead1 < d - lead0 && std::abs(p.coeff(d - lead1)) <= zero_tol) ++lead1;

  std::vector<ProjPoint> reps;  // d unit representatives, with repetition
  for (int k = 0; k < lead0; ++k) reps.push_back(ProjPoint::from_coords({Complex(0, 0), Complex(1, 0)}));
  for (int k = 0; k < lead1; ++k) reps.push_back(ProjPoint::from_coords({Complex(1, 0), Complex(0, 0)}));

  const int dr = d - lead0 - lead1;
  if (dr > 0) {
    std::vector<Complex> mid(dr + 1);
    for (int j = 0; j <= dr; ++j) mid[j] = p.coeff(j + lead0);
    // chart A: f(l) = q(1, l), coefficient of l^m is mid[dr - m]
    std::vector<Complex> fa(dr + 1), fb(dr + 1);
    for (int mdeg = 0; mdeg <= dr; ++mdeg) fa[mdeg] = mid[dr - mdeg];
    // chart B: g(v) = q(v, 1), coefficient of v^m is mid[m]
    for (int mdeg = 0; mdeg <= dr; ++mdeg) fb[mdeg] = mid[mdeg];
    std::vector<Complex> ra = detail::aberth(fa, warm);
    for (auto& z : ra) detail::newton_polish(fa, z);
    std::vector<Complex> rb = detail::aberth(fb);
    for (auto& z : rb) detail::newton_polish(fb, z);

    // Both charts list the same dr projective roots. Pair them greedily and
    // keep, per pair, the representative from the chart where the affine
    // coordinate is best conditioned (|.| <= 1).
    std::vector<bool> used(rb.size(), false);
    for (auto& l : ra) {
      ProjPoint pa = ProjPoint::from_coords({Complex(1, 0), l});
      int best = -1;
      double bestd = 1e300;
      for (std::size_t j = 0; j < rb.size(); ++j) {
        if (used[j]) continue;
        double dd = fs_distance(pa, ProjPoint::from_coords({rb[j], Complex(1, 0)}));
        if (dd < bestd) {
          bestd = dd;
          best = static_cast<int>(j);
        }
      }
      used[best] = true;
      if (std::abs(l) <= 1.0)
        reps.push_back(pa);
      else
        reps.push_back(ProjPoint::from_coords({rb[best], Complex(1, 0)}));
    }
  }

  // greedy clustering in canonical order
  std::sort(reps.begin(), reps.end(), canonical_less);
  std::vector<bool> taken(reps.size(), false);
  RootSet rs;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    if (taken[i]) continue;
    std::vector<std::size_t> cluster{i};
    taken[i] = true;
    for (std::size_t j = i + 1; j < reps.size(); ++j) {
      if (!taken[j] && fs_distance(reps[i], reps[j]) <= cluster_radius) {
        taken[j] = true;
        cluster.push_back(j);
      }
    }
    // centroid: phase-align to the seed, average, renormalize
    CVector mean = CVector::Zero(2);
    for (auto j : cluster) {
      Complex al = herm_inner(reps[j].rep(), reps[i].rep());
      Complex ph = std::abs(al) > 1e-14 ? std::conj(al) / std::abs(al) : Complex(1, 0);
      mean += ph * reps[j].rep();
    }
    rs.roots.emplace_back(ProjPoint(mean), static_cast<int>(cluster.size()));
  }
  for (auto& [pt, mult] : rs.roots)
    rs.residual = std::max(rs.residual, std::abs(p.eval(pt.rep())));
  return rs;
}

/// Smallest k with |k-th directional derivative of p along the unit tangent
/// at w| > tol; 0 when |p(w)| itself exceeds tol.
inline int multiplicity_of(const BinaryHomPoly& p, const ProjPoint& w, double tol) {
  if (p.is_zero()) throw InvalidPolynomial("multiplicity_of the zero polynomial");
  const int d = p.d();
  CVector wv = w.rep();
  CVector v(2);
  v(0) = -std::conj(wv(1));
  v(1) = std::conj(wv(0));
  Line frame{wv, v};
  BinaryHomPoly r = restrict_to_line(p.to_hompoly(), frame);
  // p(w + s v) = sum_m r_{d-m} s^m
  double fact = 1.0;
  for (int m = 0; m <= d; ++m) {
    if (m > 0) fact *= m;
    if (fact * std::abs(r.coeff(d - m)) > tol) return m;
  }
  return d;
}

}  // namespace projot
