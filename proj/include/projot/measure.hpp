#pragma once

#include <algorithm>

#include "projot/roots.hpp"

namespace projot {

/// Finitely supported probability measure on CP^n. Atom weights are strictly
/// positive and sum to 1; `line` keeps the index of the sampled line an atom
/// came from (-1 when not applicable) so couplings can share lines.
struct AtomicMeasure {
  struct Atom {
    ProjPoint point;
    double weight;
    int line = -1;
  };

  std::vector<Atom> atoms;
  int degenerate_lines = 0;  // lines with identically-zero restriction, skipped

  double total_weight() const {
    double s = 0;
    for (auto& a : atoms) s += a.weight;
    return s;
  }

  void normalize_and_sort() {
    double s = total_weight();
    if (!(s > 0)) throw InvalidMeasure("measure with no mass");
    for (auto& a : atoms) a.weight /= s;
    std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) {
      if (x.line != y.line) return x.line < y.line;
      return canonical_less(x.point, y.point);
    });
  }
};

/// Exact n = 1 measure: atoms at the roots, weight multiplicity / d.
inline AtomicMeasure mu_exact_n1(const BinaryHomPoly& p, double cluster_radius = -1.0) {
  RootSet rs = all_roots(p, cluster_radius);
  AtomicMeasure m;
  const double d = p.d();
  for (auto& [pt, mult] : rs.roots) m.atoms.push_back({pt, mult / d, -1});
  m.normalize_and_sort();
  return m;
}

/// Line-sampled measure for n >= 2 (Monte Carlo over G(1,n)): every sampled
/// line contributes its d intersection points with multiplicity; lines lying
/// on Z(p) are recorded and skipped, and the measure is renormalized over the
/// remaining lines.
inline AtomicMeasure mu_sampled_lines(const HomPoly& p, const std::vector<Line>& lines,
                                      double cluster_radius = -1.0, int threads = 1) {
  if (p.is_zero()) throw InvalidPolynomial("mu of the zero polynomial");
  if (lines.empty()) throw InvalidInput("need at least one line");
  const int d = p.d();
  const double pnorm = bw_norm(p);
  struct Slot {
    bool degenerate = false;
    std::vector<std::pair<ProjPoint, int>> roots;
  };
  std::vector<Slot> slots(lines.size());
  parallel_for(lines.size(), threads, [&](std::size_t i) {
    BinaryHomPoly r = restrict_to_line(p, lines[i]);
    if (r.max_abs_coeff() <= 1e-12 * pnorm) {
      slots[i].degenerate = true;
      return;
    }
    RootSet rs = all_roots(r, cluster_radius);
    for (auto& [pt, mult] : rs.roots) {
      CVector ambient = pt.rep()(0) * lines[i].e0 + pt.rep()(1) * lines[i].e1;
      slots[i].roots.emplace_back(ProjPoint(std::move(ambient)), mult);
    }
  });

  AtomicMeasure m;
  int live = 0;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].degenerate) {
      ++m.degenerate_lines;
      continue;
    }
    ++live;
    for (auto& [pt, mult] : slots[i].roots)
      m.atoms.push_back({pt, static_cast<double>(mult), static_cast<int>(i)});
  }
  if (live == 0)
    throw DegenerateSampling("every sampled line lies on Z(p); is p ruled/reducible?");
  for (auto& a : m.atoms) a.weight /= static_cast<double>(d) * live;
  m.normalize_and_sort();
  return m;
}

inline AtomicMeasure mu_sampled(const HomPoly& p, int line_count, Rng& rng,
                                double cluster_radius = -1.0, int threads = 1) {
  if (p.n() < 1) throw InvalidInput("mu_sampled needs n >= 1");
  if (line_count < 1) throw InvalidInput("need at least one line");
  auto lines = sample_lines(p.n(), line_count, rng);
  return mu_sampled_lines(p, lines, cluster_radius, threads);
}

/// Measure map dispatch: exact atoms for n = 1, line sampling for n >= 2.
inline AtomicMeasure mu(const HomPoly& p, int line_count, Rng& rng, double cluster_radius = -1.0,
                        int threads = 1) {
  if (p.n() == 1) return mu_exact_n1(BinaryHomPoly::from_hompoly(p), cluster_radius);
  return mu_sampled(p, line_count, rng, cluster_radius, threads);
}

inline AtomicMeasure pushforward_unitary(const AtomicMeasure& m, const CMatrix& g) {
  if (!is_unitary(g)) throw InvalidTransform("pushforward needs a unitary map");
  AtomicMeasure out;
  out.degenerate_lines = m.degenerate_lines;
  for (auto& a : m.atoms) out.atoms.push_back({ProjPoint(g * a.point.rep()), a.weight, a.line});
  out.normalize_and_sort();
  return out;
}

template <typename Fn>
double integrate(const AtomicMeasure& m, Fn&& f) {
  double s = 0;
  for (auto& a : m.atoms) s += a.weight * f(a.point);
  return s;
}

}  // namespace projot
