#pragma once

#include <algorithm>
#include <optional>

#include "projot/common.hpp"

namespace projot {

/// Point of CP^n held as a unit representative in C^{n+1}.
class ProjPoint {
public:
  ProjPoint() = default;

  explicit ProjPoint(CVector rep) : rep_(std::move(rep)) {
    double nrm = rep_.norm();
    if (!(nrm > 1e-14)) throw InvalidInput("projective point needs a nonzero representative");
    rep_ /= nrm;
  }

  static ProjPoint from_coords(std::initializer_list<Complex> cs) {
    CVector v(static_cast<int>(cs.size()));
    int i = 0;
    for (auto c : cs) v(i++) = c;
    return ProjPoint(std::move(v));
  }

  const CVector& rep() const { return rep_; }
  int ambient_vars() const { return static_cast<int>(rep_.size()); }

  /// Representative with the largest-magnitude entry rotated to the positive
  /// real axis; used for canonical ordering and hashing.
  CVector canonical_rep() const {
    CVector v = rep_;
    int imax = 0;
    double best = -1.0;
    for (int i = 0; i < v.size(); ++i) {
      double a = std::abs(v(i));
      if (a > best) {
        best = a;
        imax = i;
      }
    }
    Complex ph = v(imax) / std::abs(v(imax));
    v /= ph;
    return v;
  }

private:
  CVector rep_;
};

inline Complex herm_inner(const CVector& a, const CVector& b) { return (b.conjugate().transpose() * a)(0); }

inline bool proj_equal(const ProjPoint& x, const ProjPoint& y, double tol = kProjEqTol) {
  return 1.0 - std::abs(herm_inner(x.rep(), y.rep())) <= tol;
}

/// Geodesic (Fubini-Study) distance, in [0, pi/2]. Computed through
/// atan2(orthogonal component, |inner|), which keeps full precision at both
/// ends of the range (acos alone floors near-zero distances at sqrt(eps)).
inline double fs_distance(const ProjPoint& x, const ProjPoint& y) {
  Complex a = herm_inner(x.rep(), y.rep());
  double ca = std::abs(a);
  if (ca < 0.7) return std::acos(clamp01(ca));
  // w = x - <x,y'> y' with y' the phase-aligned y; |w| = sin(theta)
  CVector ya = (a / ca) * y.rep();
  CVector w = x.rep() - ca * ya;
  return std::atan2(w.norm(), ca);
}

/// Point at parameter t of the constant-speed minimal geodesic from x to y.
/// An antipodal pair (distance pi/2) has no unique geodesic; a tie-break
/// tangent at x must then be supplied, otherwise AmbiguousGeodesic.
inline ProjPoint fs_geodesic_point(const ProjPoint& x, const ProjPoint& y, double t,
                                   const CVector* tie_break = nullptr) {
  Complex a = herm_inner(y.rep(), x.rep());
  double ca = std::abs(a);
  double theta = std::acos(clamp01(ca));
  if (theta < 1e-14) return x;
  CVector y_aligned;
  if (1.0 - 2.0 * theta / kPi <= kProjEqTol) {
    if (tie_break == nullptr)
      throw AmbiguousGeodesic("antipodal pair, supply a tie-break tangent direction");
    // rotate y so that its component along the tie-break tangent is real > 0
    Complex c = herm_inner(y.rep(), *tie_break);
    if (std::abs(c) < 1e-14)
      throw AmbiguousGeodesic("tie-break direction orthogonal to the target");
    y_aligned = y.rep() * (std::abs(c) / c);
  } else {
    y_aligned = y.rep() * (std::conj(a) / ca);
  }
  double s = std::sin(theta);
  CVector g = (std::sin((1.0 - t) * theta) / s) * x.rep() + (std::sin(t * theta) / s) * y_aligned;
  return ProjPoint(std::move(g));
}

/// Element of G(1,n): a Hermitian-orthonormal 2-frame of C^{n+1}.
struct Line {
  CVector e0;
  CVector e1;
};

/// Uniform (unitary-invariant) line: Gram-Schmidt on two independent complex
/// Gaussian vectors; a rank-deficient draw is resampled internally.
inline Line sample_line(int n, Rng& rng) {
  if (n < 1) throw InvalidInput("sample_line needs n >= 1");
  const int m = n + 1;
  for (;;) {
    CVector a = rng.cgauss_vector(m);
    CVector b = rng.cgauss_vector(m);
    double na = a.norm();
    if (na < 1e-8) continue;
    a /= na;
    b -= herm_inner(b, a) * a;
    double nb = b.norm();
    if (nb < 1e-8) continue;
    b /= nb;
    return Line{std::move(a), std::move(b)};
  }
}

inline std::vector<Line> sample_lines(int n, int count, Rng& rng) {
  std::vector<Line> ls;
  ls.reserve(count);
  for (int i = 0; i < count; ++i) ls.push_back(sample_line(n, rng));
  return ls;
}

/// Strict weak order on canonical representatives (ties resolved exactly on
/// the double values, so sorting is deterministic).
inline bool canonical_less(const ProjPoint& x, const ProjPoint& y) {
  CVector a = x.canonical_rep(), b = y.canonical_rep();
  if (a.size() != b.size()) return a.size() < b.size();
  for (int i = 0; i < a.size(); ++i) {
    if (a(i).real() != b(i).real()) return a(i).real() < b(i).real();
    if (a(i).imag() != b(i).imag()) return a(i).imag() < b(i).imag();
  }
  return false;
}

inline bool is_unitary(const CMatrix& g, double tol = 1e-10) {
  if (g.rows() != g.cols()) return false;
  CMatrix d = g.adjoint() * g - CMatrix::Identity(g.rows(), g.cols());
  return d.cwiseAbs().maxCoeff() <= tol;
}

}  // namespace projot
