#pragma once

#include <limits>

#include "projot/measure.hpp"

namespace projot {

/// Transport plan between two atomic measures. Pair indices refer to the
/// atoms of the input measures; cost is sum mass * d_FS^q.
struct Matching {
  struct Pair {
    int i;
    int j;
    double mass;
  };
  std::vector<Pair> pairs;
  double cost = 0.0;
  double q = 2.0;
};

struct TransportResult {
  double distance = 0.0;
  Matching matching;
  bool used_lp = false;
};

namespace detail {

// Kuhn-Munkres with potentials, O(N^3), square cost matrix, row->col answer.
inline double hungarian(const std::vector<std::vector<double>>& cost, std::vector<int>& row_to_col) {
  const int n = static_cast<int>(cost.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  row_to_col.assign(n, -1);
  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    if (p[j] != 0) {
      row_to_col[p[j] - 1] = j - 1;
      total += cost[p[j] - 1][j - 1];
    }
  }
  return total;
}

// Expand atoms of weight k/D into k unit atoms; returns atom index per unit.
inline std::vector<int> expand_units(const AtomicMeasure& m, int D) {
  std::vector<int> map;
  for (int i = 0; i < static_cast<int>(m.atoms.size()); ++i) {
    double units = m.atoms[i].weight * D;
    int k = static_cast<int>(std::lround(units));
    if (k < 1 || std::abs(units - k) > 1e-6) return {};
    for (int c = 0; c < k; ++c) map.push_back(i);
  }
  return map;
}

inline int common_denominator(const AtomicMeasure& a, const AtomicMeasure& b, int cap = 1 << 16) {
  double wmin = 1.0;
  for (auto& at : a.atoms) wmin = std::min(wmin, at.weight);
  for (auto& at : b.atoms) wmin = std::min(wmin, at.weight);
  int start = std::max(1, static_cast<int>(std::floor(1.0 / std::max(wmin, 1e-9))) - 1);
  for (int D = start; D <= cap; ++D) {
    bool ok = true;
    for (auto& at : a.atoms) {
      double u = at.weight * D;
      if (std::abs(u - std::lround(u)) > 1e-6 || std::lround(u) < 1) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    for (auto& at : b.atoms) {
      double u = at.weight * D;
      if (std::abs(u - std::lround(u)) > 1e-6 || std::lround(u) < 1) {
        ok = false;
        break;
      }
    }
    if (ok) return D;
  }
  return -1;
}

}  // namespace detail

/// Exact W_q by linear assignment. Both measures must expand to the same
/// number D of unit atoms of weight 1/D (multiplicities expanded); otherwise
/// SizeMismatch, and the caller should route to wq_lp.
inline TransportResult wq_assignment(const AtomicMeasure& mu0, const AtomicMeasure& mu1, double q) {
  if (q < 1.0) throw InvalidInput("Wasserstein exponent must be >= 1");
  if (mu0.atoms.empty() || mu1.atoms.empty()) throw InvalidMeasure("empty measure");
  int D = detail::common_denominator(mu0, mu1);
  if (D < 0) throw SizeMismatch("weights are not uniform multiples; use wq_lp");
  std::vector<int> ua = detail::expand_units(mu0, D);
  std::vector<int> ub = detail::expand_units(mu1, D);
  if (ua.empty() || ub.empty() || ua.size() != ub.size() || static_cast<int>(ua.size()) != D)
    throw SizeMismatch("expanded unit counts differ; use wq_lp");

  std::vector<std::vector<double>> cost(D, std::vector<double>(D));
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j)
      cost[i][j] = std::pow(fs_distance(mu0.atoms[ua[i]].point, mu1.atoms[ub[j]].point), q);
  std::vector<int> perm;
  double total = detail::hungarian(cost, perm);

  TransportResult r;
  r.matching.q = q;
  std::map<std::pair<int, int>, double> agg;
  for (int i = 0; i < D; ++i) agg[{ua[i], ub[perm[i]]}] += 1.0 / D;
  for (auto& [ij, mass] : agg) r.matching.pairs.push_back({ij.first, ij.second, mass});
  r.matching.cost = total / D;
  r.distance = std::pow(std::max(0.0, total / D), 1.0 / q);
  return r;
}

/// Exact W_q for arbitrary positive weights: successive shortest augmenting
/// paths with node potentials on the dense bipartite transportation graph.
inline TransportResult wq_lp(const AtomicMeasure& mu0, const AtomicMeasure& mu1, double q) {
  if (q < 1.0) throw InvalidInput("Wasserstein exponent must be >= 1");
  const int m = static_cast<int>(mu0.atoms.size());
  const int n = static_cast<int>(mu1.atoms.size());
  if (m == 0 || n == 0) throw InvalidMeasure("empty measure");

  std::vector<std::vector<double>> cost(m, std::vector<double>(n));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      cost[i][j] = std::pow(fs_distance(mu0.atoms[i].point, mu1.atoms[j].point), q);

  std::vector<double> supply(m), demand(n);
  for (int i = 0; i < m; ++i) supply[i] = mu0.atoms[i].weight;
  for (int j = 0; j < n; ++j) demand[j] = mu1.atoms[j].weight;
  // balance rounding drift exactly
  double sa = 0, sb = 0;
  for (double s : supply) sa += s;
  for (double s : demand) sb += s;
  for (auto& s : supply) s /= sa;
  for (auto& s : demand) s /= sb;

  std::vector<std::vector<double>> flow(m, std::vector<double>(n, 0.0));
  // node potentials; reduced cost of i->j is c_ij + phi_l[i] - phi_r[j] >= 0
  std::vector<double> phi_l(m, 0.0), phi_r(n, 0.0);
  const double inf = std::numeric_limits<double>::infinity();
  const double mass_tol = 1e-15;

  int guard = 0;
  const int guard_cap = 256 * (m + n);
  double remaining = 1.0;
  while (remaining > 1e-12) {
    if (++guard > guard_cap) throw RootFindingFailed("transportation SSP exceeded its phase cap");
    // multi-source Dijkstra over the residual graph in reduced costs
    std::vector<double> dist_l(m, inf), dist_r(n, inf);
    std::vector<int> par_r(n, -1);  // left parent of a right node
    std::vector<int> par_l(m, -1);  // right parent of a left node (backward edge)
    std::vector<char> done_l(m, 0), done_r(n, 0);
    for (int i = 0; i < m; ++i)
      if (supply[i] > mass_tol) dist_l[i] = 0.0;
    int sink = -1;
    for (;;) {
      double best = inf;
      int bi = -1;
      bool left = true;
      for (int i = 0; i < m; ++i)
        if (!done_l[i] && dist_l[i] < best) {
          best = dist_l[i];
          bi = i;
          left = true;
        }
      for (int j = 0; j < n; ++j)
        if (!done_r[j] && dist_r[j] < best) {
          best = dist_r[j];
          bi = j;
          left = false;
        }
      if (bi < 0) break;
      if (!left && demand[bi] > mass_tol) {
        sink = bi;
        break;
      }
      if (left) {
        done_l[bi] = 1;
        for (int j = 0; j < n; ++j) {
          if (done_r[j]) continue;
          double rc = cost[bi][j] + phi_l[bi] - phi_r[j];
          if (rc < 0) rc = 0;  // clamp numerical debris
          if (dist_l[bi] + rc < dist_r[j]) {
            dist_r[j] = dist_l[bi] + rc;
            par_r[j] = bi;
          }
        }
      } else {
        done_r[bi] = 1;
        for (int i = 0; i < m; ++i) {
          if (done_l[i] || flow[i][bi] <= mass_tol) continue;
          double rc = -cost[i][bi] + phi_r[bi] - phi_l[i];
          if (rc < 0) rc = 0;
          if (dist_r[bi] + rc < dist_l[i]) {
            dist_l[i] = dist_r[bi] + rc;
            par_l[i] = bi;
          }
        }
      }
    }
    if (sink < 0) throw RootFindingFailed("transportation SSP found no augmenting path");

    const double dsink = dist_r[sink];
    for (int i = 0; i < m; ++i) phi_l[i] += std::min(dist_l[i], dsink);
    for (int j = 0; j < n; ++j) phi_r[j] += std::min(dist_r[j], dsink);

    // bottleneck along the alternating path sink <- i <- j <- ... <- source
    double delta = demand[sink];
    for (int j = sink;;) {
      int i = par_r[j];
      if (par_l[i] < 0) {
        delta = std::min(delta, supply[i]);
        break;
      }
      delta = std::min(delta, flow[i][par_l[i]]);
      j = par_l[i];
    }
    for (int j = sink;;) {
      int i = par_r[j];
      flow[i][j] += delta;
      if (par_l[i] < 0) {
        supply[i] -= delta;
        break;
      }
      flow[i][par_l[i]] -= delta;
      j = par_l[i];
    }
    demand[sink] -= delta;
    remaining -= delta;
  }

  TransportResult r;
  r.used_lp = true;
  r.matching.q = q;
  double total = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (flow[i][j] > mass_tol) {
        r.matching.pairs.push_back({i, j, flow[i][j]});
        total += flow[i][j] * cost[i][j];
      }
  r.matching.cost = total;
  r.distance = std::pow(std::max(0.0, total), 1.0 / q);
  return r;
}

/// APPROXIMATE entropically regularized W_q (Sinkhorn iterations). A fast
/// estimator only: the value carries an O(reg) bias and never enters exact
/// comparisons or the acceptance path; use wq_assignment / wq_lp for those.
inline double wq_sinkhorn(const AtomicMeasure& mu0, const AtomicMeasure& mu1, double q,
                          double reg = 0.01, int max_iters = 2000) {
  if (q < 1.0) throw InvalidInput("Wasserstein exponent must be >= 1");
  const int m = static_cast<int>(mu0.atoms.size());
  const int n = static_cast<int>(mu1.atoms.size());
  if (m == 0 || n == 0) throw InvalidMeasure("empty measure");
  // log-domain iterations; the plain kernel exp(-C/reg) underflows
  Eigen::MatrixXd cost(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      cost(i, j) = std::pow(fs_distance(mu0.atoms[i].point, mu1.atoms[j].point), q);
  Eigen::VectorXd la(m), lb(n), f = Eigen::VectorXd::Zero(m), g = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i) la(i) = std::log(mu0.atoms[i].weight);
  for (int j = 0; j < n; ++j) lb(j) = std::log(mu1.atoms[j].weight);
  auto lse_rows = [&](const Eigen::VectorXd& gg, int i) {
    double mx = -1e300;
    for (int j = 0; j < n; ++j) mx = std::max(mx, (gg(j) - cost(i, j)) / reg);
    double s = 0;
    for (int j = 0; j < n; ++j) s += std::exp((gg(j) - cost(i, j)) / reg - mx);
    return mx + std::log(s);
  };
  auto lse_cols = [&](const Eigen::VectorXd& ff, int j) {
    double mx = -1e300;
    for (int i = 0; i < m; ++i) mx = std::max(mx, (ff(i) - cost(i, j)) / reg);
    double s = 0;
    for (int i = 0; i < m; ++i) s += std::exp((ff(i) - cost(i, j)) / reg - mx);
    return mx + std::log(s);
  };
  for (int it = 0; it < max_iters; ++it) {
    for (int i = 0; i < m; ++i) f(i) = reg * (la(i) - lse_rows(g, i));
    for (int j = 0; j < n; ++j) g(j) = reg * (lb(j) - lse_cols(f, j));
    if (it % 10 == 9) {
      double err = 0;
      for (int i = 0; i < m; ++i) {
        double row = 0;
        for (int j = 0; j < n; ++j) row += std::exp((f(i) + g(j) - cost(i, j)) / reg);
        err = std::max(err, std::abs(row - mu0.atoms[i].weight));
      }
      if (err < 1e-11) break;
    }
  }
  double total = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      total += std::exp((f(i) + g(j) - cost(i, j)) / reg) * cost(i, j);
  return std::pow(std::max(0.0, total), 1.0 / q);
}

/// Assignment when both sides expand to uniform unit atoms, exact LP otherwise.
inline TransportResult wq_auto(const AtomicMeasure& mu0, const AtomicMeasure& mu1, double q) {
  try {
    return wq_assignment(mu0, mu1, q);
  } catch (const SizeMismatch&) {
    return wq_lp(mu0, mu1, q);
  }
}

/// Displacement interpolation: every matched mass moves along its
/// Fubini-Study geodesic at constant speed. The matching should be optimal
/// for q = 2; an antipodal matched pair has no unique geodesic unless a
/// tie-break tangent is supplied.
inline AtomicMeasure mccann_interpolate(const AtomicMeasure& mu0, const AtomicMeasure& mu1,
                                        const Matching& matching, double t,
                                        const CVector* tie_break = nullptr) {
  AtomicMeasure out;
  for (auto& pr : matching.pairs) {
    const ProjPoint& x = mu0.atoms[pr.i].point;
    const ProjPoint& y = mu1.atoms[pr.j].point;
    if (tie_break == nullptr && kPi / 2 - fs_distance(x, y) <= kProjEqTol)
      throw AmbiguousGeodesic("matched pair is antipodal");
    out.atoms.push_back({fs_geodesic_point(x, y, t, tie_break), pr.mass, -1});
  }
  // merge projectively equal atoms so t = 0,1 reproduce the inputs exactly
  out.normalize_and_sort();
  AtomicMeasure merged;
  for (auto& a : out.atoms) {
    if (!merged.atoms.empty() && proj_equal(merged.atoms.back().point, a.point, 1e-12))
      merged.atoms.back().weight += a.weight;
    else
      merged.atoms.push_back(a);
  }
  merged.normalize_and_sort();
  return merged;
}

struct PolynomialGeodesic {
  BinaryHomPoly p0;
  BinaryHomPoly p1;
  Matching matching;                           // optimal q=2 matching of the root sets
  std::vector<std::pair<ProjPoint, ProjPoint>> matched_roots;  // one entry per unit root

  BinaryHomPoly at(double t) const {
    std::vector<std::pair<ProjPoint, int>> roots;
    for (auto& [x, y] : matched_roots) roots.emplace_back(fs_geodesic_point(x, y, t), 1);
    return poly_from_roots(roots);
  }
};

/// W_2 geodesic between simple-root binary polynomials, realized through the
/// optimal matching of their roots and rebuilt with poly_from_roots.
inline PolynomialGeodesic w2_polynomial_geodesic(const BinaryHomPoly& p0, const BinaryHomPoly& p1,
                                                 double cluster_radius = -1.0) {
  RootSet r0 = all_roots(p0, cluster_radius);
  RootSet r1 = all_roots(p1, cluster_radius);
  for (auto& [pt, mult] : r0.roots)
    if (mult > 1) throw EndpointOnDiscriminant("p0 has a multiple root");
  for (auto& [pt, mult] : r1.roots)
    if (mult > 1) throw EndpointOnDiscriminant("p1 has a multiple root");

  AtomicMeasure m0 = mu_exact_n1(p0, cluster_radius);
  AtomicMeasure m1 = mu_exact_n1(p1, cluster_radius);
  TransportResult tr = wq_assignment(m0, m1, 2.0);

  PolynomialGeodesic g;
  g.p0 = p0;
  g.p1 = p1;
  g.matching = tr.matching;
  const int d = p0.d();
  for (auto& pr : tr.matching.pairs) {
    const ProjPoint& x = m0.atoms[pr.i].point;
    const ProjPoint& y = m1.atoms[pr.j].point;
    if (kPi / 2 - fs_distance(x, y) <= kProjEqTol)
      throw AmbiguousGeodesic("matched root pair is antipodal");
    int units = static_cast<int>(std::lround(pr.mass * d));
    for (int k = 0; k < units; ++k) g.matched_roots.emplace_back(x, y);
  }
  return g;
}

inline BinaryHomPoly w2_polynomial_geodesic_at(const BinaryHomPoly& p0, const BinaryHomPoly& p1,
                                               double t, double cluster_radius = -1.0) {
  return w2_polynomial_geodesic(p0, p1, cluster_radius).at(t);
}

}  // namespace projot
