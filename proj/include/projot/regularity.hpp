#pragma once

#include "projot/hermitian.hpp"

namespace projot {

namespace detail {

/// Phase-aligned linear interpolation of the knot coefficients at time t,
/// renormalized. Exact for families whose coefficients are affine in t.
inline HomPoly path_interpolate(const PolyPath& path, const std::vector<CVector>& aligned, double t) {
  const auto& ts = path.times;
  if (t <= ts.front()) return from_bw_coords(path.n(), path.d(), aligned.front());
  if (t >= ts.back()) return from_bw_coords(path.n(), path.d(), aligned.back());
  std::size_t hi = 1;
  while (ts[hi] < t) ++hi;
  double s = (t - ts[hi - 1]) / (ts[hi] - ts[hi - 1]);
  CVector u = (1.0 - s) * aligned[hi - 1] + s * aligned[hi];
  double nrm = u.norm();
  if (!(nrm > 1e-12)) throw InvalidInput("interpolation collapsed to zero");
  return from_bw_coords(path.n(), path.d(), u / nrm);
}

}  // namespace detail

struct SpeedProfile {
  std::vector<double> times;
  std::vector<double> speed;   // |mu-dot|_q estimates per node
  int degenerate_skipped = 0;  // line restrictions skipped (n >= 2 estimator)
  bool fano_warning = false;   // d <= 2n-3: lines on Z(p) possible, bound unverified
};

/// Metric-speed estimates along a discretized path. n = 1: exact
/// finite-difference W_q between the root measures at t and t + h. n >= 2:
/// common-random-number upper-bound estimator
/// ( E_line W_q(mu_{t+h,line}, mu_{t,line})^q )^{1/q} / h over shared lines.
/// h is a fraction of the local grid step.
inline SpeedProfile metric_speed_profile(const PolyPath& path, double q, double h_frac = 0.25,
                                         const std::vector<Line>* lines_in = nullptr,
                                         int mc_lines = 512, std::uint64_t seed = 1,
                                         double cluster_radius = -1.0) {
  if (q < 1.0) throw InvalidInput("Wasserstein exponent must be >= 1");
  if (!(h_frac > 0.0) || h_frac > 0.5) throw InvalidInput("h must be a fraction of the grid step");
  const int K = static_cast<int>(path.knots.size());
  const int n = path.n(), d = path.d();
  std::vector<CVector> aligned = detail::aligned_bw_coords(path);

  SpeedProfile out;
  out.times = path.times;
  out.speed.assign(K, 0.0);
  out.fano_warning = (n >= 2) && (d <= 2 * n - 3);

  std::vector<Line> lines;
  if (n >= 2) {
    if (lines_in != nullptr) {
      lines = *lines_in;
    } else {
      Rng rng(seed);
      lines = sample_lines(n, mc_lines, rng);
    }
  }

  for (int i = 0; i < K; ++i) {
    double gap = (i + 1 < K) ? path.times[i + 1] - path.times[i] : path.times[i] - path.times[i - 1];
    double h = h_frac * gap;
    double t0 = path.times[i], t1 = t0 + h;
    if (t1 > path.times.back()) {
      t1 = path.times[i];
      t0 = t1 - h;
    }
    HomPoly a = detail::path_interpolate(path, aligned, t0);
    HomPoly b = detail::path_interpolate(path, aligned, t1);
    if (n == 1) {
      AtomicMeasure ma = mu_exact_n1(BinaryHomPoly::from_hompoly(a), cluster_radius);
      AtomicMeasure mb = mu_exact_n1(BinaryHomPoly::from_hompoly(b), cluster_radius);
      out.speed[i] = wq_assignment(ma, mb, q).distance / h;
    } else {
      const double anorm = bw_norm(a), bnorm = bw_norm(b);
      double acc = 0.0;
      int live = 0;
      for (auto& line : lines) {
        BinaryHomPoly ra = restrict_to_line(a, line);
        BinaryHomPoly rb = restrict_to_line(b, line);
        if (ra.max_abs_coeff() <= 1e-12 * anorm || rb.max_abs_coeff() <= 1e-12 * bnorm) {
          ++out.degenerate_skipped;
          continue;
        }
        ++live;
        AtomicMeasure ma = mu_exact_n1(ra, cluster_radius);
        AtomicMeasure mb = mu_exact_n1(rb, cluster_radius);
        double w = wq_assignment(ma, mb, q).distance;
        acc += std::pow(w, q);
      }
      if (live == 0) throw DegenerateSampling("all lines degenerate in speed estimator");
      out.speed[i] = std::pow(acc / live, 1.0 / q) / h;
    }
  }
  return out;
}

/// Tail Sobolev energy: integral over [epsilon, 1] of |mu-dot|_q^q by
/// trapezoid on the profile nodes.
inline double sobolev_energy_from_profile(const SpeedProfile& sp, double q, double epsilon) {
  double e = 0.0;
  for (std::size_t i = 0; i + 1 < sp.times.size(); ++i) {
    if (sp.times[i] < epsilon) continue;
    e += 0.5 * (std::pow(sp.speed[i], q) + std::pow(sp.speed[i + 1], q)) *
         (sp.times[i + 1] - sp.times[i]);
  }
  return e;
}

inline double sobolev_energy(const PolyPath& path, double q, double epsilon, double h_frac = 0.25,
                             const std::vector<Line>* lines = nullptr, int mc_lines = 512,
                             std::uint64_t seed = 1) {
  SpeedProfile sp = metric_speed_profile(path, q, h_frac, lines, mc_lines, seed);
  return sobolev_energy_from_profile(sp, q, epsilon);
}

// ---------------------------------------------------------------------------
// Sharpness probe on the family z1^d - t z0^d
// ---------------------------------------------------------------------------

struct ExponentProbe {
  struct Entry {
    double q = 0.0;
    double fitted_slope = 0.0;
    double predicted_slope = 0.0;  // 0 when convergent, 1 - q(1 - 1/d) when divergent
    bool convergent_predicted = false;
    bool pass = false;
    std::vector<double> epsilons;
    std::vector<double> energies;
  };
  int d = 0;
  std::vector<Entry> entries;
};

/// Homogenized family p_t = z1^d - t z0^d: the root speed scales like
/// t^{1/d - 1}, so the tail integral behaves like eps^{1 - q(1 - 1/d)} above
/// the threshold q = d/(d-1) and converges below it. The probe computes the
/// tail energies on a log-spaced grid and fits the log-log slope.
inline ExponentProbe exponent_probe(int d, const std::vector<double>& q_list,
                                    std::vector<double> epsilons, int nodes_per_decade = 32) {
  if (d < 2) throw InvalidInput("probe needs d >= 2");
  if (epsilons.empty()) epsilons = {1e-7, 1e-8, 1e-9, 1e-10, 1e-11};
  std::sort(epsilons.begin(), epsilons.end());
  const double tmin = epsilons.front() * 0.5;
  const int decades = static_cast<int>(std::ceil(std::log10(1.0 / tmin)));
  const int K = std::max(8, decades * nodes_per_decade);

  std::vector<HomPoly> knots(K);
  std::vector<double> times(K);
  const double lmin = std::log(tmin);
  for (int i = 0; i < K; ++i) {
    times[i] = std::exp(lmin * (1.0 - static_cast<double>(i) / (K - 1)));
    HomPoly p(1, d);
    p.set({0, d}, {1, 0});
    p.set({d, 0}, {-times[i], 0});
    knots[i] = p;
  }
  times.back() = 1.0;
  PolyPath path(std::move(knots), std::move(times));

  ExponentProbe probe;
  probe.d = d;
  const double threshold = static_cast<double>(d) / (d - 1);
  for (double q : q_list) {
    SpeedProfile sp = metric_speed_profile(path, q);
    ExponentProbe::Entry e;
    e.q = q;
    e.convergent_predicted = q < threshold;
    e.predicted_slope = e.convergent_predicted ? 0.0 : 1.0 - q * (1.0 - 1.0 / d);
    for (double eps : epsilons) {
      e.epsilons.push_back(eps);
      e.energies.push_back(sobolev_energy_from_profile(sp, q, eps));
    }
    // least-squares slope of log E against log eps
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = 0; i < e.epsilons.size(); ++i) {
      if (!(e.energies[i] > 0)) continue;
      double x = std::log(e.epsilons[i]), y = std::log(e.energies[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++m;
    }
    e.fitted_slope = (m >= 2) ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
    if (e.convergent_predicted)
      e.pass = std::abs(e.fitted_slope) < 0.05;
    else
      e.pass = std::abs(e.fitted_slope - e.predicted_slope) <=
               std::max(0.1 * std::abs(e.predicted_slope), 0.02);
    probe.entries.push_back(std::move(e));
  }
  return probe;
}

}  // namespace projot
