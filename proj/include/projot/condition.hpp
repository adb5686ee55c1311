#pragma once

#include "projot/hermitian.hpp"

namespace projot {

namespace detail {

/// Unit tangent at w on CP^1 (orthogonal complement of the representative).
inline CVector unit_normal_cp1(const CVector& w) {
  CVector v(2);
  v(0) = -std::conj(w(1));
  v(1) = std::conj(w(0));
  v /= v.norm();
  return v;
}

/// Reproducing kernels spanning the BW-orthogonal complement of
/// {q : q(w) = 0, d_v q(w) = 0}: K_w = <z,w>^d and G_w = <z,w>^{d-1} <z,v>.
inline std::pair<BinaryHomPoly, BinaryHomPoly> delta_kernels(int d, const CVector& w) {
  CVector v = unit_normal_cp1(w);
  // <z, w> = conj(w0) z0 + conj(w1) z1; coefficient index k is the z0^k slot
  std::vector<Complex> K = detail::linear_power(std::conj(w(0)), std::conj(w(1)), d);
  std::vector<Complex> G =
      detail::conv(detail::linear_power(std::conj(w(0)), std::conj(w(1)), d - 1),
                   {std::conj(v(1)), std::conj(v(0))});
  return {BinaryHomPoly(std::move(K)), BinaryHomPoly(std::move(G))};
}

inline Complex bw_inner_bin(const BinaryHomPoly& p, const BinaryHomPoly& q) {
  return bw_inner(p.to_hompoly(), q.to_hompoly());
}

}  // namespace detail

/// Bombieri-Weyl (projective) distance from p to the polynomials with a
/// multiple root at w: arcsin of the norm of the projection of p onto the
/// orthogonal complement of that subspace, spanned by two reproducing
/// kernels which are orthonormalized numerically.
inline double dist_to_delta_at(const BinaryHomPoly& p, const ProjPoint& w) {
  if (p.is_zero()) throw InvalidPolynomial("dist_to_delta_at of the zero polynomial");
  if (w.ambient_vars() != 2) throw DimensionMismatch("w must be on CP^1");
  const int d = p.d();
  auto [K, G] = detail::delta_kernels(d, w.rep());
  HomPoly hp = p.to_hompoly();
  HomPoly hK = K.to_hompoly(), hG = G.to_hompoly();
  // Gram-Schmidt on {K, G}
  double nK = bw_norm(hK);
  hK = Complex(1.0 / nK, 0) * hK;
  hG = hG - bw_inner(hG, hK) * hK;
  double nG = bw_norm(hG);
  double proj_sq = std::norm(bw_inner(hp, hK));
  if (nG > 1e-13) {
    hG = Complex(1.0 / nG, 0) * hG;
    proj_sq += std::norm(bw_inner(hp, hG));
  }
  double ratio = std::sqrt(proj_sq) / bw_norm(hp);
  return std::asin(clamp01(ratio));
}

/// Normalized condition number: reciprocal BW distance to the polynomials
/// with a multiple root at w. (Taken literally; at d = 1 this gives 2/pi.)
inline double nu_norm(const BinaryHomPoly& p, const ProjPoint& w) {
  double dist = dist_to_delta_at(p, w);
  if (dist < 1e-14) throw InfiniteCondition("p lies on Delta_w");
  return 1.0 / dist;
}

/// min over w of dist_to_delta_at(p, w): coarse Fibonacci grid on
/// CP^1 = S^2 followed by a local pattern-search refinement.
struct DiscriminantDistance {
  double distance = 0.0;
  ProjPoint argmin;
};

inline ProjPoint bloch_point(double zc, double phi) {
  double theta = std::acos(std::min(1.0, std::max(-1.0, zc)));  // polar angle on S^2
  CVector v(2);
  v(0) = std::cos(theta / 2);
  v(1) = std::polar(std::sin(theta / 2), phi);
  return ProjPoint(std::move(v));
}

inline DiscriminantDistance dist_to_discriminant(const BinaryHomPoly& p, int grid_nodes = 512) {
  if (p.is_zero()) throw InvalidPolynomial("dist_to_discriminant of the zero polynomial");
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  // coarse Fibonacci grid on CP^1 = S^2, keeping a handful of candidate
  // basins (the objective can have several local minima, one near each root)
  std::vector<std::pair<double, ProjPoint>> nodes;
  nodes.reserve(grid_nodes);
  for (int i = 0; i < grid_nodes; ++i) {
    double zc = 1.0 - 2.0 * (i + 0.5) / grid_nodes;
    double phi = 2.0 * kPi * i / golden;
    ProjPoint w = bloch_point(zc, phi);
    nodes.emplace_back(dist_to_delta_at(p, w), w);
  }
  std::partial_sort(nodes.begin(), nodes.begin() + std::min<std::size_t>(8, nodes.size()),
                    nodes.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  ProjPoint best_w = nodes.front().second;
  double best = nodes.front().first;
  for (std::size_t start = 0; start < std::min<std::size_t>(8, nodes.size()); ++start) {
    ProjPoint w0 = nodes[start].second;
    double v0 = nodes[start].first;
    double step = 2.0 / std::sqrt(static_cast<double>(grid_nodes));
    while (step > 1e-7) {
      bool improved = false;
      CVector t = detail::unit_normal_cp1(w0.rep());
      for (Complex dir : {Complex(1, 0), Complex(-1, 0), Complex(0, 1), Complex(0, -1)}) {
        ProjPoint w = ProjPoint(w0.rep() + step * dir * t);
        double v = dist_to_delta_at(p, w);
        if (v < v0) {
          v0 = v;
          w0 = w;
          improved = true;
        }
      }
      if (!improved) step *= 0.5;
    }
    if (v0 < best) {
      best = v0;
      best_w = w0;
    }
  }
  return {best, best_w};
}

// ---------------------------------------------------------------------------
// alpha functions (root-separation functionals)
// ---------------------------------------------------------------------------

/// alpha_2(p, w) = min over pairs of distinct root labels of
/// d(w,z_i)^2 + d(w,z_j)^2. Roots are counted with multiplicity: a multiple
/// root contributes a zero-distance pair with itself.
inline double alpha2(const BinaryHomPoly& p, const ProjPoint& w, double cluster_radius = -1.0) {
  RootSet rs = all_roots(p, cluster_radius);
  if (rs.roots.size() < 2) throw DegenerateRootSet("alpha2 needs at least two distinct roots");
  double best = 1e300;
  for (std::size_t i = 0; i < rs.roots.size(); ++i) {
    double a = fs_distance(w, rs.roots[i].first);
    if (rs.roots[i].second > 1) best = std::min(best, 2 * a * a);
    for (std::size_t j = i + 1; j < rs.roots.size(); ++j) {
      double b = fs_distance(w, rs.roots[j].first);
      best = std::min(best, a * a + b * b);
    }
  }
  return best;
}

/// alpha_4(p) = min over pairs of distinct root labels of d(z_i, z_j)^2;
/// zero as soon as p has a multiple root.
inline double alpha4(const BinaryHomPoly& p, double cluster_radius = -1.0) {
  RootSet rs = all_roots(p, cluster_radius);
  if (rs.roots.size() < 2) throw DegenerateRootSet("alpha4 needs at least two distinct roots");
  double best = 1e300;
  for (std::size_t i = 0; i < rs.roots.size(); ++i) {
    if (rs.roots[i].second > 1) return 0.0;
    for (std::size_t j = i + 1; j < rs.roots.size(); ++j) {
      double a = fs_distance(rs.roots[i].first, rs.roots[j].first);
      best = std::min(best, a * a);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Root tracking and condition length
// ---------------------------------------------------------------------------

/// A root lift of a path of binary polynomials: one tracked root per node.
struct LiftedPath {
  PolyPath base;                  // n = 1
  std::vector<ProjPoint> root_track;
};

namespace detail {

/// One Newton continuation step: correct `z` against `p` in the frame chart
/// centered at z. Returns the corrected projective point.
inline ProjPoint newton_correct(const BinaryHomPoly& p, const ProjPoint& z) {
  CVector b = z.rep();
  for (int it = 0; it < 20; ++it) {
    CVector v = unit_normal_cp1(b);
    // g(s) = p(b + s v); Newton in s from 0
    Complex f = p.eval(b);
    // directional derivative along v
    CVector g = p.grad(b);
    Complex df = v(0) * g(0) + v(1) * g(1);
    if (std::abs(df) < 1e-300) break;
    Complex s = -f / df;
    b = b + s * v;
    b /= b.norm();
    if (std::abs(s) < 1e-14) break;
  }
  return ProjPoint(std::move(b));
}

}  // namespace detail

/// Greedy continuation: per node, Newton-correct the previous root against
/// the current knot; a jump beyond half the local root-separation radius
/// (alpha_4-based) aborts with TrackingLost.
inline LiftedPath track_root(const PolyPath& path, const ProjPoint& z0, double cluster_radius = -1.0) {
  if (path.n() != 1) throw InvalidInput("track_root needs a path of binary polynomials");
  LiftedPath lift;
  lift.base = path;
  BinaryHomPoly first = BinaryHomPoly::from_hompoly(path.knots.front());
  if (std::abs(first.eval(z0.rep())) > 1e-8 * first.bw_norm())
    throw InvalidInput("z0 is not a root of the first knot");
  ProjPoint cur = detail::newton_correct(first, z0);
  lift.root_track.push_back(cur);
  for (std::size_t i = 1; i < path.knots.size(); ++i) {
    BinaryHomPoly knot = BinaryHomPoly::from_hompoly(path.knots[i]);
    ProjPoint next = detail::newton_correct(knot, cur);
    double sep_radius;
    try {
      sep_radius = 0.5 * std::sqrt(alpha4(knot, cluster_radius));
    } catch (const DegenerateRootSet&) {
      sep_radius = kPi / 2;  // single root: no confusion possible
    }
    if (fs_distance(cur, next) > 0.5 * sep_radius)
      throw TrackingLost("jump beyond the separation radius at node " + std::to_string(i));
    if (std::abs(knot.eval(next.rep())) > 1e-8)
      throw TrackingLost("Newton correction failed at node " + std::to_string(i));
    cur = next;
    lift.root_track.push_back(cur);
  }
  return lift;
}

/// Condition length of a lift: integral of nu_norm(p_t, z_t) ||gamma-dot||_V,
/// with the product-metric speed (BW-projective for p, FS for z) from
/// central finite differences, trapezoid in t. Also returns L_V.
struct ConditionLength {
  double l_cond = 0.0;
  double l_v = 0.0;
  std::vector<double> nu;       // per node
  std::vector<double> speed_v;  // per node
};

inline ConditionLength condition_length(const LiftedPath& lift) {
  const auto& t = lift.base.times;
  const int K = static_cast<int>(t.size());
  if (static_cast<int>(lift.root_track.size()) != K)
    throw InvalidInput("lift must carry one root per node");
  std::vector<CVector> u(K);
  for (int i = 0; i < K; ++i) {
    u[i] = bw_coords(lift.base.knots[i]);
    u[i] /= u[i].norm();
  }
  auto proj_dist = [](const CVector& a, const CVector& b) {
    return fs_distance(ProjPoint(a), ProjPoint(b));
  };
  ConditionLength out;
  out.nu.resize(K);
  out.speed_v.resize(K);
  for (int i = 0; i < K; ++i) {
    int lo = std::max(0, i - 1), hi = std::min(K - 1, i + 1);
    double dt = t[hi] - t[lo];
    double sp = proj_dist(u[hi], u[lo]) / dt;
    double sz = fs_distance(lift.root_track[hi], lift.root_track[lo]) / dt;
    out.speed_v[i] = std::hypot(sp, sz);
    BinaryHomPoly knot = BinaryHomPoly::from_hompoly(lift.base.knots[i]);
    try {
      out.nu[i] = nu_norm(knot, lift.root_track[i]);
    } catch (const InfiniteCondition&) {
      throw InfiniteCondition("infinite condition number at node " + std::to_string(i));
    }
  }
  for (int i = 0; i + 1 < K; ++i) {
    double dt = t[i + 1] - t[i];
    out.l_cond += 0.5 * (out.nu[i] * out.speed_v[i] + out.nu[i + 1] * out.speed_v[i + 1]) * dt;
    out.l_v += 0.5 * (out.speed_v[i] + out.speed_v[i + 1]) * dt;
  }
  return out;
}

// ---------------------------------------------------------------------------
// The W_2-geodesic condition experiment
// ---------------------------------------------------------------------------

struct P14Report {
  std::vector<double> t;
  std::vector<double> alpha4_profile;
  std::vector<double> alpha2_profile;   // along the lift
  std::vector<double> nu_profile;       // along the lift
  std::vector<double> dist_delta_profile;
  bool alpha4_quasiconcave = false;     // (a)
  bool alpha2_quasiconcave = false;     // (b)
  bool interior_off_discriminant = false;  // (c)
  double min_dist_delta = 0.0;
  double l_cond = 0.0;
  double l_v = 0.0;
  double nu_end_max = 0.0;
  double slack = 1e-9;
};

/// Builds the W_2 geodesic p_t between simple-root endpoints, tracks a root
/// lift, and checks the quasi-concavity inequalities
/// f(t) >= (1-t)^2 f(0) + t^2 f(1) for alpha_4 (and alpha_2 along the lift),
/// plus positivity of the distance to the discriminant at interior nodes.
inline P14Report p14_experiment(const BinaryHomPoly& p0, const BinaryHomPoly& p1, int grid_nodes,
                                double slack = 1e-9, int track_refine = 8,
                                int discriminant_grid = 512) {
  if (grid_nodes < 3) throw InvalidInput("need at least 3 grid nodes");
  PolynomialGeodesic geo = w2_polynomial_geodesic(p0, p1);

  // fine grid for continuation, report grid a subset
  const int fine = (grid_nodes - 1) * track_refine + 1;
  std::vector<HomPoly> knots(fine);
  std::vector<double> times(fine);
  for (int i = 0; i < fine; ++i) {
    times[i] = static_cast<double>(i) / (fine - 1);
    knots[i] = geo.at(times[i]).to_hompoly();
  }
  PolyPath fine_path(std::move(knots), std::move(times));
  RootSet r0 = all_roots(geo.at(0.0));
  LiftedPath fine_lift = track_root(fine_path, r0.roots.front().first);

  P14Report rep;
  rep.slack = slack;
  PolyPath report_path;
  LiftedPath report_lift;
  for (int i = 0; i < grid_nodes; ++i) {
    int k = i * track_refine;
    rep.t.push_back(fine_path.times[k]);
    report_path.knots.push_back(fine_path.knots[k]);
    report_path.times.push_back(fine_path.times[k]);
    report_lift.root_track.push_back(fine_lift.root_track[k]);
  }
  report_lift.base = report_path;

  for (int i = 0; i < grid_nodes; ++i) {
    BinaryHomPoly pt = BinaryHomPoly::from_hompoly(report_path.knots[i]);
    rep.alpha4_profile.push_back(alpha4(pt));
    rep.alpha2_profile.push_back(alpha2(pt, report_lift.root_track[i]));
    rep.nu_profile.push_back(nu_norm(pt, report_lift.root_track[i]));
    rep.dist_delta_profile.push_back(dist_to_discriminant(pt, discriminant_grid).distance);
  }

  auto quasiconcave = [&](const std::vector<double>& f) {
    for (int i = 0; i < grid_nodes; ++i) {
      double t = rep.t[i];
      double bound = (1 - t) * (1 - t) * f.front() + t * t * f.back();
      if (f[i] < bound - slack) return false;
    }
    return true;
  };
  rep.alpha4_quasiconcave = quasiconcave(rep.alpha4_profile);
  rep.alpha2_quasiconcave = quasiconcave(rep.alpha2_profile);
  rep.min_dist_delta = *std::min_element(rep.dist_delta_profile.begin(), rep.dist_delta_profile.end());
  rep.interior_off_discriminant = rep.min_dist_delta > 0.0;

  ConditionLength cl = condition_length(report_lift);
  rep.l_cond = cl.l_cond;
  rep.l_v = cl.l_v;
  rep.nu_end_max = std::max(rep.nu_profile.front(), rep.nu_profile.back());
  return rep;
}

/// Envelope fit of L_cond <= beta3 * L_V * max(nu_0, nu_1)^beta4 over a
/// batch: least squares in logs for beta4, then beta3 inflated so the bound
/// holds for every instance. The paper's betas are existential; this only
/// reports the empirical pair.
struct BetaFit {
  double beta3 = 0.0;
  double beta4 = 0.0;
};

inline BetaFit fit_betas(const std::vector<P14Report>& batch) {
  if (batch.empty()) throw InvalidInput("empty batch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (auto& r : batch) {
    if (!(r.l_v > 0) || !(r.l_cond > 0)) continue;
    double x = std::log(r.nu_end_max);
    double y = std::log(r.l_cond / r.l_v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return {1.0, 0.0};
  double denom = n * sxx - sx * sx;
  BetaFit fit;
  fit.beta4 = std::abs(denom) > 1e-12 ? (n * sxy - sx * sy) / denom : 0.0;
  double intercept = (sy - fit.beta4 * sx) / n;
  fit.beta3 = std::exp(intercept);
  // inflate beta3 so the inequality holds on the whole batch
  double worst = 1.0;
  for (auto& r : batch) {
    if (!(r.l_v > 0)) continue;
    double bound = fit.beta3 * r.l_v * std::pow(r.nu_end_max, fit.beta4);
    if (r.l_cond > bound * worst) worst = r.l_cond / bound;
  }
  fit.beta3 *= worst * (1 + 1e-12);
  return fit;
}

}  // namespace projot
