#pragma once

#include <optional>

#include "projot/transport.hpp"

namespace projot {

/// How zero-set integrals are evaluated: exact roots for n = 1, Monte Carlo
/// over lines for n >= 2 (n = 1 may also run the line estimator for
/// cross-checks).
struct QuadratureSpec {
  enum class Mode { ExactRoots, LineMonteCarlo };
  Mode mode = Mode::ExactRoots;
  int lines = 2000;
  std::uint64_t seed = 1;
  int time_nodes = 64;
  double gradient_guard = 1e-8;  // min allowed |grad p| at a quadrature node
  double cluster_radius = -1.0;

  static QuadratureSpec exact() { return {}; }
  static QuadratureSpec monte_carlo(int lines, std::uint64_t seed) {
    QuadratureSpec q;
    q.mode = Mode::LineMonteCarlo;
    q.lines = lines;
    q.seed = seed;
    return q;
  }
};

struct HermitianValue {
  Complex value{0, 0};
  double stderr_est = 0.0;  // 0 in exact mode, sample stderr with a roundoff floor otherwise
};

/// Quadrature nodes on the zero set of a fixed p: unit representatives with
/// the squared gradient norm of p, grouped by sampled line for the variance
/// estimate. `factor` turns a group mean into the h-hat normalization
/// (2 pi sum over roots at n = 1, vol(S^{2n-1}) E_line[...] in general).
struct ZeroQuadrature {
  struct Node {
    CVector b;
    double grad_sq;
    int group;
  };
  std::vector<Node> nodes;
  int groups = 1;
  double factor = 2.0 * kPi;
  int skipped_lines = 0;
};

inline ZeroQuadrature zero_quadrature_exact(const HomPoly& p, const QuadratureSpec& quad) {
  if (p.n() != 1) throw InvalidInput("exact quadrature requires n = 1");
  ZeroQuadrature zq;
  zq.factor = 2.0 * kPi;
  zq.groups = 1;
  RootSet rs = all_roots(BinaryHomPoly::from_hompoly(p), quad.cluster_radius);
  for (auto& [pt, mult] : rs.roots) {
    CVector g = grad_c(p, pt.rep());
    zq.nodes.push_back({pt.rep(), g.squaredNorm(), 0});
  }
  return zq;
}

inline ZeroQuadrature zero_quadrature_lines(const HomPoly& p, const std::vector<Line>& lines,
                                            const QuadratureSpec& quad) {
  ZeroQuadrature zq;
  zq.factor = sphere_volume_odd(p.n());
  zq.groups = 0;
  const double pnorm = bw_norm(p);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    BinaryHomPoly r = restrict_to_line(p, lines[li]);
    if (r.max_abs_coeff() <= 1e-12 * pnorm) {
      ++zq.skipped_lines;
      continue;
    }
    int group = zq.groups++;
    RootSet rs = all_roots(r, quad.cluster_radius);
    for (auto& [pt, mult] : rs.roots) {
      CVector b = pt.rep()(0) * lines[li].e0 + pt.rep()(1) * lines[li].e1;
      b /= b.norm();
      CVector g = grad_c(p, b);
      zq.nodes.push_back({std::move(b), g.squaredNorm(), group});
    }
  }
  if (zq.groups == 0) throw DegenerateSampling("all quadrature lines lie on Z(p)");
  return zq;
}

inline ZeroQuadrature zero_quadrature(const HomPoly& p, const QuadratureSpec& quad) {
  if (quad.mode == QuadratureSpec::Mode::ExactRoots) return zero_quadrature_exact(p, quad);
  Rng rng(quad.seed);
  auto lines = sample_lines(p.n(), quad.lines, rng);
  return zero_quadrature_lines(p, lines, quad);
}

namespace detail {

inline void guard_nodes(const ZeroQuadrature& zq, double guard, const std::string& where) {
  for (std::size_t k = 0; k < zq.nodes.size(); ++k) {
    if (std::sqrt(zq.nodes[k].grad_sq) < guard)
      throw NearDiscriminant(where + ": |grad p| = " + std::to_string(std::sqrt(zq.nodes[k].grad_sq)) +
                             " at quadrature node " + std::to_string(k));
  }
}

template <typename F1, typename F2>
HermitianValue hhat_on_nodes(const ZeroQuadrature& zq, F1&& q1_at, F2&& q2_at) {
  std::vector<Complex> per_group(zq.groups, Complex(0, 0));
  for (auto& node : zq.nodes)
    per_group[node.group] += q1_at(node.b) * std::conj(q2_at(node.b)) / node.grad_sq;
  Complex mean(0, 0);
  for (auto& g : per_group) mean += g;
  mean /= static_cast<double>(zq.groups);
  HermitianValue hv;
  hv.value = zq.factor * mean;
  if (zq.groups > 1) {
    double var = 0;
    for (auto& g : per_group) var += std::norm(g - mean);
    var /= (zq.groups - 1.0) * zq.groups;
    hv.stderr_est = zq.factor * std::sqrt(var);
  }
  // double-precision quadrature floor; keeps "within k stderr" meaningful
  // when the per-line integrand has zero mathematical variance
  hv.stderr_est = std::max(hv.stderr_est, 1e-13 * (1.0 + std::abs(hv.value)));
  if (zq.groups == 1) hv.stderr_est = 0.0;
  return hv;
}

}  // namespace detail

/// The Hermitian form of the zero set: integral of q1 conj(q2) / |grad p|^2
/// over the unit-sphere zero locus of p. Exact mode sums over the roots with
/// the 2 pi circle-fiber factor; Monte Carlo mode averages over lines with
/// the vol(S^{2n-1}) factor. Scale-invariant in (p, q1, q2) jointly.
inline HermitianValue hhat(const HomPoly& p, const HomPoly& q1, const HomPoly& q2,
                           const QuadratureSpec& quad) {
  if (p.n() != q1.n() || p.n() != q2.n() || p.d() != q1.d() || p.d() != q2.d())
    throw DimensionMismatch("hhat operands must share n and d");
  ZeroQuadrature zq = zero_quadrature(p, quad);
  detail::guard_nodes(zq, quad.gradient_guard * bw_norm(p), "hhat");
  bool z1 = q1.is_zero(), z2 = q2.is_zero();
  return detail::hhat_on_nodes(
      zq, [&](const CVector& b) { return z1 ? Complex(0, 0) : eval(q1, b); },
      [&](const CVector& b) { return z2 ? Complex(0, 0) : eval(q2, b); });
}

/// Gram matrix of h-hat on a tangent basis, over one shared set of
/// quadrature nodes (hence positive semidefinite by construction).
inline CMatrix hermitian_gram(const HomPoly& p, const std::vector<HomPoly>& basis,
                              const QuadratureSpec& quad) {
  ZeroQuadrature zq = zero_quadrature(p, quad);
  detail::guard_nodes(zq, quad.gradient_guard * bw_norm(p), "hermitian_gram");
  const int m = static_cast<int>(basis.size());
  CMatrix vals(m, static_cast<int>(zq.nodes.size()));
  for (int i = 0; i < m; ++i) {
    bool zi = basis[i].is_zero();
    for (std::size_t k = 0; k < zq.nodes.size(); ++k)
      vals(i, static_cast<int>(k)) = zi ? Complex(0, 0) : eval(basis[i], zq.nodes[k].b);
  }
  CMatrix gram = CMatrix::Zero(m, m);
  for (std::size_t k = 0; k < zq.nodes.size(); ++k)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        gram(i, j) += vals(i, k) * std::conj(vals(j, k)) / zq.nodes[k].grad_sq;
  gram *= zq.factor / zq.groups;
  return (gram + gram.adjoint().eval()) / 2.0;
}

/// Imaginary part of h-hat: the Kahler 2-form evaluated pointwise.
inline double kahler_form(const HomPoly& p, const HomPoly& q1, const HomPoly& q2,
                          const QuadratureSpec& quad) {
  return hhat(p, q1, q2, quad).value.imag();
}

// ---------------------------------------------------------------------------
// Discretized polynomial curves and their energy
// ---------------------------------------------------------------------------

/// Discretized curve of unit-BW-norm polynomials over an increasing grid.
struct PolyPath {
  std::vector<HomPoly> knots;
  std::vector<double> times;

  PolyPath() = default;
  PolyPath(std::vector<HomPoly> ks, std::vector<double> ts)
      : knots(std::move(ks)), times(std::move(ts)) {
    if (knots.size() != times.size() || knots.size() < 2)
      throw InvalidInput("path needs matching knot/time lists of length >= 2");
    for (std::size_t i = 1; i < times.size(); ++i)
      if (!(times[i] > times[i - 1])) throw InvalidInput("path times must increase");
    for (auto& k : knots) k = bw_normalized(k);
  }

  int n() const { return knots.front().n(); }
  int d() const { return knots.front().d(); }

  static std::vector<double> uniform_times(int count) {
    std::vector<double> t(count);
    for (int i = 0; i < count; ++i) t[i] = static_cast<double>(i) / (count - 1);
    return t;
  }
};

struct PathEnergy {
  double energy = 0.0;
  std::vector<double> node_speed_sq;  // the integrand samples |mu-dot|^2
  double richardson = 0.0;            // coarse-grid energy difference / 3
};

namespace detail {

inline std::vector<CVector> aligned_bw_coords(const PolyPath& path) {
  std::vector<CVector> u(path.knots.size());
  for (std::size_t i = 0; i < path.knots.size(); ++i) {
    u[i] = bw_coords(path.knots[i]);
    u[i] /= u[i].norm();
    if (i > 0) {
      Complex a = herm_inner(u[i], u[i - 1]);
      if (std::abs(a) > 1e-14) u[i] *= std::conj(a) / std::abs(a);
    }
  }
  return u;
}

inline PathEnergy path_energy_impl(const PolyPath& path, const QuadratureSpec& quad,
                                   const std::vector<HomPoly>* velocities, bool with_richardson) {
  const int K = static_cast<int>(path.knots.size());
  const int n = path.n(), d = path.d();
  const double norm_factor = d * sphere_volume_odd(n);

  std::vector<CVector> u = aligned_bw_coords(path);
  // shared lines across knots (common random numbers) in Monte Carlo mode
  std::optional<std::vector<Line>> lines;
  if (quad.mode == QuadratureSpec::Mode::LineMonteCarlo) {
    Rng rng(quad.seed);
    lines = sample_lines(n, quad.lines, rng);
  }

  PathEnergy pe;
  pe.node_speed_sq.resize(K);
  for (int i = 0; i < K; ++i) {
    CVector v;
    if (velocities != nullptr) {
      v = bw_coords((*velocities)[i]);
    } else if (i == 0) {
      v = (u[1] - u[0]) / (path.times[1] - path.times[0]);
    } else if (i == K - 1) {
      v = (u[K - 1] - u[K - 2]) / (path.times[K - 1] - path.times[K - 2]);
    } else {
      v = (u[i + 1] - u[i - 1]) / (path.times[i + 1] - path.times[i - 1]);
    }
    v -= herm_inner(v, u[i]) * u[i];  // drop the span{c} kernel direction
    HomPoly knot = from_bw_coords(n, d, u[i]);
    HomPoly vel = from_bw_coords(n, d, v);
    ZeroQuadrature zq = (quad.mode == QuadratureSpec::Mode::ExactRoots)
                            ? zero_quadrature_exact(knot, quad)
                            : zero_quadrature_lines(knot, *lines, quad);
    guard_nodes(zq, quad.gradient_guard, "path_energy at time node " + std::to_string(i));
    bool vz = vel.is_zero();
    HermitianValue h = hhat_on_nodes(
        zq, [&](const CVector& b) { return vz ? Complex(0, 0) : eval(vel, b); },
        [&](const CVector& b) { return vz ? Complex(0, 0) : eval(vel, b); });
    pe.node_speed_sq[i] = std::max(0.0, h.value.real()) / norm_factor;
  }
  for (int i = 0; i + 1 < K; ++i)
    pe.energy += 0.5 * (pe.node_speed_sq[i] + pe.node_speed_sq[i + 1]) *
                 (path.times[i + 1] - path.times[i]);

  if (with_richardson && K >= 5 && velocities == nullptr) {
    PolyPath coarse;
    for (int i = 0; i < K; i += 2) {
      coarse.knots.push_back(path.knots[i]);
      coarse.times.push_back(path.times[i]);
    }
    if (coarse.times.back() != path.times.back()) {
      coarse.knots.push_back(path.knots[K - 1]);
      coarse.times.push_back(path.times[K - 1]);
    }
    PathEnergy ce = path_energy_impl(coarse, quad, nullptr, false);
    pe.richardson = (pe.energy - ce.energy) / 3.0;
  }
  return pe;
}

}  // namespace detail

/// Energy of a discretized path: velocities by central differences on the
/// phase-aligned knots, h-hat speeds, trapezoid in time.
/// E = (1 / (d vol(S^{2n-1}))) integral of h-hat_c(c-dot, c-dot).
inline PathEnergy path_energy(const PolyPath& path, const QuadratureSpec& quad) {
  return detail::path_energy_impl(path, quad, nullptr, true);
}

/// Closed-form-velocity overload for analytic tests.
inline PathEnergy path_energy(const PolyPath& path, const std::vector<HomPoly>& velocities,
                              const QuadratureSpec& quad) {
  if (velocities.size() != path.knots.size())
    throw InvalidInput("one velocity per knot required");
  return detail::path_energy_impl(path, quad, &velocities, false);
}

// ---------------------------------------------------------------------------
// Metric speed at n = 1: two independent evaluations
// ---------------------------------------------------------------------------

struct MetricSpeedN1 {
  double hermitian = 0.0;      // sqrt((1/d) sum |c-dot(b)|^2 / |grad c(b)|^2)
  double root_velocity = 0.0;  // sqrt((1/d) sum FS-speed(root)^2) by implicit differentiation
};

inline MetricSpeedN1 metric_speed_n1(const BinaryHomPoly& c, const BinaryHomPoly& cdot,
                                     double gradient_guard = 1e-8, double cluster_radius = -1.0) {
  if (c.d() != cdot.d()) throw DimensionMismatch("c and c-dot must share the degree");
  // Roots are located on a normalized copy; all evaluations use c as given,
  // so that (c, c-dot) are treated as a point and velocity of the same curve.
  const BinaryHomPoly& cu = c;
  const double cnorm = c.bw_norm();
  const int d = cu.d();
  RootSet rs = all_roots(cu, cluster_radius);
  MetricSpeedN1 out;
  double herm = 0, rootv = 0;
  for (auto& [pt, mult] : rs.roots) {
    const CVector& b = pt.rep();
    CVector g = cu.grad(b);
    double gn = g.norm();
    if (gn < gradient_guard * cnorm)
      throw NearDiscriminant("metric_speed_n1: |grad c| = " + std::to_string(gn));
    Complex cd = cdot.eval(b);
    herm += std::norm(cd) / (gn * gn) * mult;

    // implicit differentiation in the better-conditioned affine chart
    if (std::abs(b(1)) <= std::abs(b(0))) {
      // chart z0 = 1, coordinate l = z1/z0, f(l) = c(1, l)
      Complex l = b(1) / b(0);
      Complex df(0, 0), ft(0, 0);
      for (int k = 0; k <= d; ++k) {
        // c(1, l) = sum_k c_k l^{d-k}
        if (d - k >= 1)
          df += cu.coeff(k) * static_cast<double>(d - k) * std::pow(l, d - k - 1);
        ft += cdot.coeff(k) * std::pow(l, d - k);
      }
      Complex ldot = -ft / df;
      double fs_speed = std::abs(ldot) / (1.0 + std::norm(l));
      rootv += fs_speed * fs_speed * mult;
    } else {
      // chart z1 = 1, coordinate v = z0/z1, g(v) = c(v, 1)
      Complex vv = b(0) / b(1);
      Complex df(0, 0), ft(0, 0);
      for (int k = 0; k <= d; ++k) {
        if (k >= 1) df += cu.coeff(k) * static_cast<double>(k) * std::pow(vv, k - 1);
        ft += cdot.coeff(k) * std::pow(vv, k);
      }
      Complex vdot = -ft / df;
      double fs_speed = std::abs(vdot) / (1.0 + std::norm(vv));
      rootv += fs_speed * fs_speed * mult;
    }
  }
  out.hermitian = std::sqrt(herm / d);
  out.root_velocity = std::sqrt(rootv / d);
  return out;
}

}  // namespace projot
