#pragma once

#include <memory>

#include "projot/condition.hpp"

namespace projot {

struct GeodesicConfig {
  int knots = 17;
  int max_iterations = 400;
  double step0 = 0.25;          // initial gradient step
  double step_growth = 1.5;     // on acceptance
  double step_min = 1e-12;      // underflow threshold
  double fd_step = 1e-5;        // central-difference step for the energy gradient
  double guard_delta = 1e-4;    // reject knots whose sampled zeros have |grad c| below this
  std::uint64_t seed = 1;
  int quad_lines = 300;         // Monte Carlo lines for n >= 2 (shared across knots)
  int measure_lines = 300;      // lines for the ambient W_2 of the endpoint measures
  int kick_attempts = 50;
  double kick_size = 0.05;
  int endpoint_reparam_m = 1;   // s^m-style grid clustering at the endpoints; 1 = off
  double rel_tol = 1e-8;        // relative energy decrease to stop
  // n = 1 initialization through the matched-root path; the plain coefficient
  // interpolation can start in the wrong matching homotopy class, where the
  // descent only reaches a longer local geodesic
  bool root_interpolation_init = true;
};

struct GeodesicResult {
  PolyPath path;
  double energy = 0.0;
  double w2in_estimate = 0.0;  // sqrt(energy)
  double ambient_w2 = 0.0;
  std::vector<double> energy_trace;
  std::vector<double> node_speeds;  // |mu-dot| per node after the final re-gridding
  int iterations = 0;
};

namespace detail {

/// Incremental discrete-energy evaluator. Caches, per knot, the quadrature
/// nodes on its zero set together with the values of the BW-orthonormal
/// monomial basis at each node, so re-evaluating the energy after a
/// one-knot change never re-solves the other knots' roots.
class PathEnergyModel {
public:
  PathEnergyModel(int n, int d, std::vector<double> times, double cluster_radius,
                  std::vector<Line> lines)
      : n_(n), d_(d), times_(std::move(times)), cluster_radius_(cluster_radius),
        lines_(std::move(lines)) {
    mis_ = multi_indices(n_, d_);
    dim_ = static_cast<int>(mis_.size());
    basis_scale_.resize(dim_);
    for (int i = 0; i < dim_; ++i)
      basis_scale_[i] = std::exp(-0.5 * log_bw_weight(mis_[i], d_));  // sqrt(d!/a!)
    norm_factor_ = d_ * sphere_volume_odd(n_);
    factor_ = (n_ == 1) ? 2.0 * kPi : sphere_volume_odd(n_);
    K_ = static_cast<int>(times_.size());
    u_.resize(K_);
    nodes_.resize(K_);
    groups_.assign(K_, 1);
    min_grad_.assign(K_, 0.0);
    warm_.resize(K_);
  }

  int knot_count() const { return K_; }
  int dim() const { return dim_; }
  const std::vector<double>& times() const { return times_; }
  std::vector<double>& mutable_times() { return times_; }
  const CVector& knot(int i) const { return u_[i]; }
  double min_grad(int i) const { return min_grad_[i]; }
  HomPoly poly(int i) const { return from_bw_coords(n_, d_, u_[i]); }

  void set_knot(int i, const CVector& u) {
    u_[i] = u / u.norm();
    refresh_nodes(i);
  }

  /// Segmentwise discrete energy: for each segment the chord velocity
  /// v_i = (u_{i+1} - u_i)/dt is measured in the h-hat forms of both
  /// endpoints. Central differences are NOT used here: they annihilate the
  /// odd-even knot mode, which a descent would then exploit.
  /// Returns the energy; `segment_speed_out` gets the K-1 segment speeds.
  double evaluate(std::vector<double>* segment_speed_out = nullptr) const {
    std::vector<Complex> ph(K_, Complex(1, 0));
    for (int i = 1; i < K_; ++i) {
      Complex raw = herm_inner(u_[i], ph[i - 1] * u_[i - 1]);
      // align so that <ph_i u_i, ph_{i-1} u_{i-1}> is real >= 0
      ph[i] = std::abs(raw) > 1e-14 ? std::conj(raw) / std::abs(raw) : ph[i - 1];
    }
    std::vector<double> sp(K_ - 1, 0.0);
    double e = 0;
    for (int i = 0; i + 1 < K_; ++i) {
      double dt = times_[i + 1] - times_[i];
      CVector v = (ph[i + 1] * u_[i + 1] - ph[i] * u_[i]) / dt;
      double s2 = 0.5 * (hform(i, v) + hform(i + 1, v));
      sp[i] = std::sqrt(std::max(0.0, s2));
      e += s2 * dt;
    }
    if (segment_speed_out) *segment_speed_out = std::move(sp);
    return e;
  }

  PolyPath to_path() const {
    std::vector<HomPoly> ks(K_);
    for (int i = 0; i < K_; ++i) ks[i] = poly(i);
    return PolyPath(std::move(ks), times_);
  }

private:
  struct Node {
    CVector phi;     // BW-orthonormal basis monomials at b: sqrt(d!/a!) b^a
    double grad_sq;  // |grad c_i(b)|^2
    int group;
  };

  /// |mu-dot|^2 contribution of velocity v measured at knot i's zero set.
  double hform(int i, const CVector& v) const {
    std::vector<double> per_group(groups_[i], 0.0);
    for (auto& nd : nodes_[i]) {
      Complex val(0, 0);
      for (int k = 0; k < dim_; ++k) val += v(k) * nd.phi(k);
      per_group[nd.group] += std::norm(val) / nd.grad_sq;
    }
    double mean = 0;
    for (double g : per_group) mean += g;
    mean /= per_group.size();
    return factor_ * mean / norm_factor_;
  }

  void refresh_nodes(int i) {
    nodes_[i].clear();
    HomPoly p = from_bw_coords(n_, d_, u_[i]);
    if (n_ == 1) {
      BinaryHomPoly b = BinaryHomPoly::from_hompoly(p);
      RootSet rs = all_roots(b, cluster_radius_, warm_[i].empty() ? nullptr : &warm_[i]);
      warm_[i] = affine_warm(rs);
      for (auto& [pt, mult] : rs.roots) push_node(i, p, pt.rep(), 0);
      groups_[i] = 1;
    } else {
      int group = 0;
      for (auto& line : lines_) {
        BinaryHomPoly r = restrict_to_line(p, line);
        if (r.max_abs_coeff() <= 1e-12) continue;
        RootSet rs = all_roots(r, cluster_radius_);
        for (auto& [pt, mult] : rs.roots) {
          CVector amb = pt.rep()(0) * line.e0 + pt.rep()(1) * line.e1;
          amb /= amb.norm();
          push_node(i, p, amb, group);
        }
        ++group;
      }
      groups_[i] = std::max(1, group);
    }
    double mg = 1e300;
    for (auto& nd : nodes_[i]) mg = std::min(mg, std::sqrt(nd.grad_sq));
    min_grad_[i] = nodes_[i].empty() ? 0.0 : mg;
  }

  std::vector<Complex> affine_warm(const RootSet& rs) const {
    std::vector<Complex> w;
    for (auto& [pt, mult] : rs.roots) {
      const CVector& b = pt.rep();
      if (std::abs(b(0)) > 1e-6)
        for (int k = 0; k < mult; ++k) w.push_back(b(1) / b(0));
    }
    return w;
  }

  void push_node(int i, const HomPoly& p, const CVector& b, int group) {
    Node nd;
    nd.group = group;
    nd.grad_sq = grad_c(p, b).squaredNorm();
    nd.phi.resize(dim_);
    for (int k = 0; k < dim_; ++k) {
      Complex t(1, 0);
      for (int j = 0; j <= n_; ++j)
        for (int e = 0; e < mis_[k][j]; ++e) t *= b(j);
      nd.phi(k) = t * basis_scale_[k];
    }
    nodes_[i].push_back(std::move(nd));
  }

  int n_, d_, dim_ = 0, K_ = 0;
  std::vector<double> times_;
  double cluster_radius_;
  std::vector<Line> lines_;
  std::vector<MultiIndex> mis_;
  std::vector<double> basis_scale_;
  double norm_factor_ = 1.0, factor_ = 2.0 * kPi;
  std::vector<CVector> u_;
  std::vector<std::vector<Node>> nodes_;
  std::vector<int> groups_;
  std::vector<double> min_grad_;
  std::vector<std::vector<Complex>> warm_;
};

inline std::vector<double> geodesic_time_grid(int K, int reparam_m) {
  std::vector<double> t(K);
  for (int i = 0; i < K; ++i) {
    double s = static_cast<double>(i) / (K - 1);
    if (reparam_m > 1) {
      double a = std::pow(s, reparam_m), b = std::pow(1.0 - s, reparam_m);
      t[i] = a / (a + b);  // clusters nodes at both endpoints
    } else {
      t[i] = s;
    }
  }
  return t;
}

inline CVector slerp(const CVector& a, const CVector& b_in, double t) {
  Complex inner = herm_inner(b_in, a);
  CVector b = b_in;
  if (std::abs(inner) > 1e-14) b *= std::conj(inner) / std::abs(inner);
  double theta = std::acos(clamp01(std::abs(inner)));
  if (theta < 1e-12) return a;
  double s = std::sin(theta);
  CVector g = (std::sin((1 - t) * theta) / s) * a + (std::sin(t * theta) / s) * b;
  return g / g.norm();
}

}  // namespace detail

/// Discrete metric energy of a path: sum of W_2(mu_i, mu_{i+1})^2 / dt_i.
/// By the triangle inequality and Cauchy-Schwarz this never falls below the
/// squared endpoint W_2, so it is the estimator reported by the optimizer.
/// n = 1 uses exact root measures per knot; n >= 2 replaces each segment
/// distance by the per-line coupling bound over the shared line set, which
/// upper-bounds the true segment distance and keeps the chain intact.
inline double path_metric_energy(const PolyPath& path, const std::vector<Line>& lines,
                                 double cluster_radius = -1.0) {
  const int K = static_cast<int>(path.knots.size());
  double energy = 0.0;
  if (path.n() == 1) {
    std::vector<AtomicMeasure> ms(K);
    for (int i = 0; i < K; ++i)
      ms[i] = mu_exact_n1(BinaryHomPoly::from_hompoly(path.knots[i]), cluster_radius);
    for (int i = 0; i + 1 < K; ++i) {
      double w = wq_assignment(ms[i], ms[i + 1], 2.0).distance;
      energy += w * w / (path.times[i + 1] - path.times[i]);
    }
    return energy;
  }
  // restrict every knot to the shared lines once
  std::vector<std::vector<AtomicMeasure>> per_line(K);  // [knot][line]
  std::vector<std::vector<bool>> live(K);
  for (int i = 0; i < K; ++i) {
    per_line[i].resize(lines.size());
    live[i].assign(lines.size(), false);
    for (std::size_t l = 0; l < lines.size(); ++l) {
      BinaryHomPoly r = restrict_to_line(path.knots[i], lines[l]);
      if (r.max_abs_coeff() <= 1e-12) continue;
      per_line[i][l] = mu_exact_n1(r, cluster_radius);
      live[i][l] = true;
    }
  }
  for (int i = 0; i + 1 < K; ++i) {
    double acc = 0.0;
    int count = 0;
    for (std::size_t l = 0; l < lines.size(); ++l) {
      if (!live[i][l] || !live[i + 1][l]) continue;
      double w = wq_assignment(per_line[i][l], per_line[i + 1][l], 2.0).distance;
      acc += w * w;
      ++count;
    }
    if (count == 0) throw DegenerateSampling("no shared live lines on a segment");
    energy += (acc / count) / (path.times[i + 1] - path.times[i]);
  }
  return energy;
}

/// Discriminant guard value of a polynomial: min |grad p| over its sampled
/// zero locus (exact roots at n = 1, intersection with the given lines else).
inline double discriminant_guard_value(const HomPoly& p_in, const std::vector<Line>& lines,
                                       double cluster_radius = -1.0) {
  HomPoly p = bw_normalized(p_in);
  double mg = 1e300;
  bool seen = false;
  if (p.n() == 1) {
    RootSet rs = all_roots(BinaryHomPoly::from_hompoly(p), cluster_radius);
    for (auto& [pt, mult] : rs.roots) {
      mg = std::min(mg, grad_c(p, pt.rep()).norm());
      seen = true;
    }
  } else {
    for (auto& line : lines) {
      BinaryHomPoly r = restrict_to_line(p, line);
      if (r.max_abs_coeff() <= 1e-12) continue;
      RootSet rs = all_roots(r, cluster_radius);
      for (auto& [pt, mult] : rs.roots) {
        CVector b = pt.rep()(0) * line.e0 + pt.rep()(1) * line.e1;
        b /= b.norm();
        mg = std::min(mg, grad_c(p, b).norm());
        seen = true;
      }
    }
  }
  return seen ? mg : 0.0;
}

/// Fubini-Study interpolation of the endpoint coefficients, with small
/// random kicks on interior knots that fail the discriminant guard. For
/// n = 1 the root-interpolation path of w2_polynomial_geodesic is available
/// as an alternative start.
inline PolyPath initial_path(const HomPoly& p0, const HomPoly& p1, int K,
                             const GeodesicConfig& cfg, Rng& rng,
                             const std::vector<Line>& guard_lines) {
  if (p0.n() != p1.n() || p0.d() != p1.d()) throw DimensionMismatch("endpoint shape mismatch");
  if (K < 3) throw InvalidInput("need at least 3 knots");
  if (discriminant_guard_value(p0, guard_lines) <= cfg.guard_delta ||
      discriminant_guard_value(p1, guard_lines) <= cfg.guard_delta)
    throw EndpointOnDiscriminant("an endpoint violates the discriminant guard");

  std::vector<double> times = detail::geodesic_time_grid(K, cfg.endpoint_reparam_m);
  std::vector<HomPoly> knots(K);

  if (cfg.root_interpolation_init && p0.n() == 1) {
    PolynomialGeodesic geo =
        w2_polynomial_geodesic(BinaryHomPoly::from_hompoly(p0), BinaryHomPoly::from_hompoly(p1));
    for (int i = 0; i < K; ++i) knots[i] = geo.at(times[i]).to_hompoly();
    return PolyPath(std::move(knots), std::move(times));
  }

  CVector u0 = bw_coords(bw_normalized(p0));
  CVector u1 = bw_coords(bw_normalized(p1));
  for (int i = 0; i < K; ++i) {
    CVector u = detail::slerp(u0, u1, times[i]);
    if (i > 0 && i < K - 1) {
      int attempt = 0;
      while (discriminant_guard_value(from_bw_coords(p0.n(), p0.d(), u), guard_lines) <=
             cfg.guard_delta) {
        if (++attempt > cfg.kick_attempts)
          throw StuckNearDiscriminant("initial path knot " + std::to_string(i) +
                                      " stayed on the discriminant after kicks");
        CVector kick = rng.cgauss_vector(static_cast<int>(u.size()));
        u = u + cfg.kick_size * kick;
        u /= u.norm();
      }
    }
    knots[i] = from_bw_coords(p0.n(), p0.d(), u);
  }
  return PolyPath(std::move(knots), std::move(times));
}

inline PolyPath initial_path(const HomPoly& p0, const HomPoly& p1, int K,
                             const GeodesicConfig& cfg = {}) {
  Rng rng(cfg.seed);
  std::vector<Line> lines;
  if (p0.n() >= 2) {
    Rng lrng(cfg.seed + 0x9e3779b9u);
    lines = sample_lines(p0.n(), cfg.quad_lines, lrng);
  }
  return initial_path(p0, p1, K, cfg, rng, lines);
}

namespace detail {

/// Constant-speed re-gridding of the model knots by piecewise slerp along
/// the cumulative arc length. Accepted only when the energy does not grow by
/// more than rel_slack; returns whether it was applied.
inline bool regrid_constant_speed(PathEnergyModel& model, double guard_delta, double rel_slack) {
  const int K = model.knot_count();
  std::vector<double> sp;  // per-segment speeds
  double before = model.evaluate(&sp);
  std::vector<double> cum(K, 0.0);
  const auto& t = model.times();
  for (int i = 1; i < K; ++i) cum[i] = cum[i - 1] + sp[i - 1] * (t[i] - t[i - 1]);
  if (cum[K - 1] < 1e-14) return false;
  std::vector<CVector> saved(K);
  for (int i = 0; i < K; ++i) saved[i] = model.knot(i);
  for (int i = 1; i + 1 < K; ++i) {
    double target = cum[K - 1] * t[i];
    int seg = 0;
    while (seg + 2 < K && cum[seg + 1] < target) ++seg;
    double denom = cum[seg + 1] - cum[seg];
    double s = denom > 1e-300 ? (target - cum[seg]) / denom : 0.0;
    model.set_knot(i, slerp(saved[seg], saved[seg + 1], clamp01(s)));
  }
  bool guard_ok = true;
  for (int i = 1; i + 1 < K; ++i)
    if (model.min_grad(i) <= guard_delta) guard_ok = false;
  double after = guard_ok ? model.evaluate() : 1e300;
  if (after <= before * (1 + rel_slack)) return true;
  for (int i = 1; i + 1 < K; ++i) model.set_knot(i, saved[i]);
  return false;
}

/// Gradient-descent sweep on one grid level. Appends accepted energies to
/// the trace (kept non-increasing) and returns the final energy.
inline double descend(PathEnergyModel& model, const GeodesicConfig& cfg, int budget,
                      std::vector<double>& trace, int& iterations, bool& guard_deadlock) {
  const int K = model.knot_count();
  const int dim = model.dim();
  double energy = model.evaluate();
  trace.push_back(energy);
  double step = cfg.step0;
  int since_regrid = 0;
  for (int iter = 0; iter < budget; ++iter, ++iterations) {
    std::vector<CVector> grad(K);
    double grad_norm = 0.0;
    for (int i = 1; i + 1 < K; ++i) {
      grad[i] = CVector::Zero(dim);
      CVector base = model.knot(i);
      for (int k = 0; k < dim; ++k) {
        for (int part = 0; part < 2; ++part) {
          Complex dir = part == 0 ? Complex(1, 0) : Complex(0, 1);
          model.set_knot(i, base + cfg.fd_step * dir * CVector::Unit(dim, k));
          double ep = model.evaluate();
          model.set_knot(i, base - cfg.fd_step * dir * CVector::Unit(dim, k));
          double em = model.evaluate();
          double g = (ep - em) / (2 * cfg.fd_step);
          grad[i](k) += part == 0 ? Complex(g, 0) : Complex(0, g);
        }
      }
      model.set_knot(i, base);
      grad_norm += grad[i].squaredNorm();
    }
    grad_norm = std::sqrt(grad_norm);
    if (grad_norm < 1e-14) break;

    // normalized step: `step` is a trust length in the BW sphere metric
    bool accepted = false;
    std::vector<CVector> saved(K);
    for (int i = 0; i < K; ++i) saved[i] = model.knot(i);
    while (step >= cfg.step_min) {
      bool guard_ok = true;
      for (int i = 1; i + 1 < K; ++i) {
        model.set_knot(i, saved[i] - (step / grad_norm) * grad[i]);
        if (model.min_grad(i) <= cfg.guard_delta) guard_ok = false;
      }
      double cand = guard_ok ? model.evaluate() : 1e300;
      if (guard_ok && cand < energy) {
        energy = cand;
        accepted = true;
        break;
      }
      for (int i = 1; i + 1 < K; ++i) model.set_knot(i, saved[i]);
      if (!guard_ok) guard_deadlock = true;
      step *= 0.5;
    }
    if (!accepted) {
      if (step < cfg.step_min && guard_deadlock)
        throw StuckNearDiscriminant("step size underflow against the discriminant guard");
      break;
    }
    guard_deadlock = false;
    double prev = trace.back();
    trace.push_back(energy);
    step = std::min(step * cfg.step_growth, 1.0);
    if (++since_regrid >= 20) {
      since_regrid = 0;
      // in-loop re-gridding is only taken when it does not increase the energy
      if (regrid_constant_speed(model, cfg.guard_delta, 0.0)) {
        energy = model.evaluate();
        trace.back() = std::min(trace.back(), energy);
      }
    }
    if (prev - trace.back() < cfg.rel_tol * std::max(trace.back(), 1e-300) && iter > 5) break;
  }
  return energy;
}

}  // namespace detail

/// Projected gradient descent on the interior knots of the discretized path
/// energy: finite-difference gradient in the BW-orthonormal basis, unit-norm
/// projection after every step, discriminant-guard rejection with halved
/// steps, monotone accepted-energy trace. Runs coarse-to-fine on the knot
/// grid and finishes with constant-speed re-gridding passes.
inline GeodesicResult optimize(const HomPoly& p0, const HomPoly& p1, const GeodesicConfig& cfg = {}) {
  const int n = p0.n(), d = p0.d();
  Rng rng(cfg.seed);
  std::vector<Line> lines;
  if (n >= 2) {
    Rng lrng(cfg.seed + 0x9e3779b9u);
    lines = sample_lines(n, cfg.quad_lines, lrng);
  }

  // coarse-to-fine knot ladder ending at cfg.knots
  std::vector<int> ladder{cfg.knots};
  while (ladder.back() > 6) ladder.push_back((ladder.back() + 1) / 2);
  std::reverse(ladder.begin(), ladder.end());

  PolyPath init = initial_path(p0, p1, ladder.front(), cfg, rng, lines);

  GeodesicResult res;
  bool guard_deadlock = false;
  int iterations = 0;
  std::vector<CVector> knots(init.knots.size());
  for (std::size_t i = 0; i < knots.size(); ++i) knots[i] = bw_coords(init.knots[i]);

  std::unique_ptr<detail::PathEnergyModel> model;
  for (std::size_t level = 0; level < ladder.size(); ++level) {
    int K = ladder[level];
    model = std::make_unique<detail::PathEnergyModel>(
        n, d, detail::geodesic_time_grid(K, cfg.endpoint_reparam_m), -1.0, lines);
    for (int i = 0; i < K; ++i) model->set_knot(i, knots[i]);
    int budget = std::max(10, cfg.max_iterations / static_cast<int>(ladder.size()));
    // the reported trace is the finest level's; coarse sweeps are warm-ups
    // on a different discretization of the functional
    std::vector<double> scratch;
    bool finest = level + 1 == ladder.size();
    detail::descend(*model, cfg, budget, finest ? res.energy_trace : scratch, iterations,
                    guard_deadlock);
    if (level + 1 < ladder.size()) {
      // resample the current path at the finer time grid by piecewise slerp
      const auto& coarse_t = model->times();
      std::vector<double> fine_t =
          detail::geodesic_time_grid(ladder[level + 1], cfg.endpoint_reparam_m);
      std::vector<CVector> finer(fine_t.size());
      for (std::size_t i = 0; i < fine_t.size(); ++i) {
        double t = fine_t[i];
        std::size_t seg = 0;
        while (seg + 2 < coarse_t.size() && coarse_t[seg + 1] < t) ++seg;
        double s = (t - coarse_t[seg]) / (coarse_t[seg + 1] - coarse_t[seg]);
        finer[i] = detail::slerp(model->knot(static_cast<int>(seg)),
                                 model->knot(static_cast<int>(seg) + 1), clamp01(s));
      }
      knots = std::move(finer);
    }
  }
  for (int pass = 0; pass < 3; ++pass)
    if (!detail::regrid_constant_speed(*model, cfg.guard_delta, 1e-9)) break;

  std::vector<double> seg;
  model->evaluate(&seg);
  const int Kf = model->knot_count();
  res.node_speeds.resize(Kf);
  for (int i = 0; i < Kf; ++i) {
    if (i == 0)
      res.node_speeds[i] = seg.front();
    else if (i == Kf - 1)
      res.node_speeds[i] = seg.back();
    else
      res.node_speeds[i] = 0.5 * (seg[i - 1] + seg[i]);
  }
  res.path = model->to_path();
  res.iterations = iterations;

  // Reported energy: discrete metric energy of the returned path. The
  // smooth h-hat objective drives the descent; this estimator respects the
  // inner >= outer bound exactly (triangle inequality plus Cauchy-Schwarz).
  res.energy = path_metric_energy(res.path, lines);
  res.w2in_estimate = std::sqrt(std::max(0.0, res.energy));

  // ambient W_2 of the endpoint measures (the same lines at n >= 2)
  if (n == 1) {
    AtomicMeasure m0 = mu_exact_n1(BinaryHomPoly::from_hompoly(p0));
    AtomicMeasure m1 = mu_exact_n1(BinaryHomPoly::from_hompoly(p1));
    res.ambient_w2 = wq_assignment(m0, m1, 2.0).distance;
  } else {
    AtomicMeasure m0 = mu_sampled_lines(p0, lines);
    AtomicMeasure m1 = mu_sampled_lines(p1, lines);
    res.ambient_w2 = wq_auto(m0, m1, 2.0).distance;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Empirical Lipschitz probe: ratio of the inner distance to the
// coefficient-space Fubini-Study distance over sampled nearby pairs, under a
// discriminant guard margin.
// ---------------------------------------------------------------------------

struct LipschitzProbe {
  struct Pair {
    double d_fs;
    double w2in;
    double ratio;
  };
  std::vector<Pair> pairs;
  double max_ratio = 0.0;
  double median_ratio = 0.0;
};

inline LipschitzProbe lipschitz_probe(int n, int d, double epsilon, int trials, Rng& rng,
                                      GeodesicConfig cfg = {}) {
  if (!(epsilon > 0)) throw InvalidInput("epsilon must be positive");
  std::vector<Line> guard_lines;
  if (n >= 2) guard_lines = sample_lines(n, cfg.quad_lines, rng);
  auto mis = multi_indices(n, d);
  const int dim = static_cast<int>(mis.size());
  LipschitzProbe probe;
  int made = 0, guard_cap = 100 * trials;
  while (made < trials && guard_cap-- > 0) {
    CVector u = rng.cgauss_vector(dim);
    u /= u.norm();
    HomPoly p = from_bw_coords(n, d, u);
    if (discriminant_guard_value(p, guard_lines) < epsilon) continue;
    double sigma = std::pow(10.0, -1.0 - 2.0 * rng.uniform());  // FS offsets in [1e-3, 1e-1]
    CVector w = rng.cgauss_vector(dim);
    w -= herm_inner(w, u) * u;
    w *= sigma / w.norm();
    CVector uq = u + w;
    uq /= uq.norm();
    HomPoly q = from_bw_coords(n, d, uq);
    if (discriminant_guard_value(q, guard_lines) < epsilon) continue;
    double dfs = std::acos(clamp01(std::abs(herm_inner(uq, u))));
    if (dfs < 1e-12) continue;
    cfg.seed = rng.raw();
    GeodesicResult r = optimize(p, q, cfg);
    probe.pairs.push_back({dfs, r.w2in_estimate, r.w2in_estimate / dfs});
    ++made;
  }
  if (probe.pairs.empty()) throw InvalidInput("no admissible pairs sampled; lower epsilon");
  std::vector<double> ratios;
  for (auto& pr : probe.pairs) ratios.push_back(pr.ratio);
  std::sort(ratios.begin(), ratios.end());
  probe.max_ratio = ratios.back();
  probe.median_ratio = ratios[ratios.size() / 2];
  return probe;
}

}  // namespace projot
