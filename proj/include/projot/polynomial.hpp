#pragma once

#include <cmath>
#include <map>
#include <numeric>

#include "projot/projective.hpp"

namespace projot {

using MultiIndex = std::vector<int>;

inline int multi_degree(const MultiIndex& a) { return std::accumulate(a.begin(), a.end(), 0); }

/// log(alpha! / d!) for the Bombieri-Weyl weight of the monomial z^alpha.
inline double log_bw_weight(const MultiIndex& a, int d) {
  double s = -std::lgamma(static_cast<double>(d) + 1.0);
  for (int ai : a) s += std::lgamma(static_cast<double>(ai) + 1.0);
  return s;
}

/// All multi-indices of total degree d in n+1 variables, lex order (within a
/// fixed degree this is the graded-lex order used everywhere, JSON included).
inline std::vector<MultiIndex> multi_indices(int n, int d) {
  std::vector<MultiIndex> out;
  MultiIndex cur(n + 1, 0);
  // lex descending on the vector? We emit ascending lex: (0,..,d) first.
  // Recursive fill.
  auto rec = [&](auto&& self, int pos, int rem) -> void {
    if (pos == n) {
      cur[pos] = rem;
      out.push_back(cur);
      return;
    }
    for (int k = 0; k <= rem; ++k) {
      cur[pos] = k;
      self(self, pos + 1, rem - k);
    }
  };
  rec(rec, 0, d);
  return out;
}

/// Homogeneous polynomial of degree d in n+1 complex variables, sparse
/// coefficient map keyed by multi-index in graded-lex order.
class HomPoly {
public:
  HomPoly() = default;
  HomPoly(int n, int d) : n_(n), d_(d) {
    if (n < 0 || d < 1) throw InvalidPolynomial("need n >= 0 and d >= 1");
  }

  int n() const { return n_; }
  int d() const { return d_; }
  int vars() const { return n_ + 1; }
  const std::map<MultiIndex, Complex>& coeffs() const { return coeffs_; }

  void set(const MultiIndex& a, Complex c) {
    if (static_cast<int>(a.size()) != n_ + 1 || multi_degree(a) != d_)
      throw InvalidPolynomial("multi-index degree mismatch");
    if (c == Complex(0, 0))
      coeffs_.erase(a);
    else
      coeffs_[a] = c;
  }

  void add(const MultiIndex& a, Complex c) {
    auto it = coeffs_.find(a);
    Complex v = (it == coeffs_.end() ? Complex(0, 0) : it->second) + c;
    set(a, v);
  }

  Complex coeff(const MultiIndex& a) const {
    auto it = coeffs_.find(a);
    return it == coeffs_.end() ? Complex(0, 0) : it->second;
  }

  bool is_zero(double tol = 0.0) const {
    for (auto& [a, c] : coeffs_)
      if (std::abs(c) > tol) return false;
    return true;
  }

  static HomPoly monomial(int n, const MultiIndex& a, Complex c = {1, 0}) {
    HomPoly p(n, multi_degree(a));
    p.set(a, c);
    return p;
  }

  /// z_i^d
  static HomPoly variable_power(int n, int d, int i) {
    MultiIndex a(n + 1, 0);
    a[i] = d;
    return monomial(n, a);
  }

  HomPoly& operator*=(Complex s) {
    for (auto& [a, c] : coeffs_) c *= s;
    return *this;
  }

  friend HomPoly operator*(Complex s, HomPoly p) {
    p *= s;
    return p;
  }

  friend HomPoly operator+(const HomPoly& x, const HomPoly& y) {
    if (x.n_ != y.n_ || x.d_ != y.d_) throw DimensionMismatch("polynomial sum shape mismatch");
    HomPoly r = x;
    for (auto& [a, c] : y.coeffs_) r.add(a, c);
    return r;
  }

  friend HomPoly operator-(const HomPoly& x, const HomPoly& y) { return x + (Complex(-1, 0) * y); }

private:
  int n_ = 0;
  int d_ = 1;
  std::map<MultiIndex, Complex> coeffs_;
};

// ---------------------------------------------------------------------------
// Evaluation and differentiation
// ---------------------------------------------------------------------------

inline Complex eval(const HomPoly& p, const CVector& z) {
  if (z.size() != p.vars()) throw DimensionMismatch("eval: wrong number of variables");
  if (p.is_zero()) throw InvalidPolynomial("eval of the zero polynomial");
  Complex s(0, 0);
  for (auto& [a, c] : p.coeffs()) {
    Complex t = c;
    for (int j = 0; j < p.vars(); ++j)
      for (int k = 0; k < a[j]; ++k) t *= z(j);
    s += t;
  }
  return s;
}

/// Complex gradient (d p/d z_0, ..., d p/d z_n) at z.
inline CVector grad_c(const HomPoly& p, const CVector& z) {
  if (z.size() != p.vars()) throw DimensionMismatch("grad_c: wrong number of variables");
  if (p.is_zero()) throw InvalidPolynomial("grad_c of the zero polynomial");
  CVector g = CVector::Zero(p.vars());
  for (auto& [a, c] : p.coeffs()) {
    for (int j = 0; j < p.vars(); ++j) {
      if (a[j] == 0) continue;
      Complex t = c * static_cast<double>(a[j]);
      for (int m = 0; m < p.vars(); ++m) {
        int e = a[m] - (m == j ? 1 : 0);
        for (int k = 0; k < e; ++k) t *= z(m);
      }
      g(j) += t;
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Bombieri-Weyl product: <p,q> = sum_a (a!/d!) c_a(p) conj(c_a(q)), the
// scaling in which {(d!/a!)^(1/2) z^a} is an orthonormal basis.
// ---------------------------------------------------------------------------

inline Complex bw_inner(const HomPoly& p, const HomPoly& q) {
  if (p.n() != q.n() || p.d() != q.d()) throw DimensionMismatch("bw_inner shape mismatch");
  Complex s(0, 0);
  for (auto& [a, c] : p.coeffs()) {
    Complex e = q.coeff(a);
    if (e == Complex(0, 0)) continue;
    s += std::exp(log_bw_weight(a, p.d())) * c * std::conj(e);
  }
  return s;
}

inline double bw_norm(const HomPoly& p) { return std::sqrt(std::max(0.0, bw_inner(p, p).real())); }

inline HomPoly bw_normalized(const HomPoly& p) {
  double nrm = bw_norm(p);
  if (!(nrm > 1e-300)) throw InvalidPolynomial("cannot normalize the zero polynomial");
  return Complex(1.0 / nrm, 0) * p;
}

/// Coordinates of p in the orthonormal Bombieri-Weyl monomial basis, ordered
/// by multi_indices(n, d). Euclidean norm of the vector equals bw_norm(p).
inline CVector bw_coords(const HomPoly& p) {
  auto mis = multi_indices(p.n(), p.d());
  CVector u(static_cast<int>(mis.size()));
  for (int i = 0; i < u.size(); ++i)
    u(i) = p.coeff(mis[i]) * std::exp(0.5 * log_bw_weight(mis[i], p.d()));
  return u;
}

inline HomPoly from_bw_coords(int n, int d, const CVector& u) {
  auto mis = multi_indices(n, d);
  if (u.size() != static_cast<int>(mis.size())) throw DimensionMismatch("bw coordinate size");
  HomPoly p(n, d);
  for (int i = 0; i < u.size(); ++i) {
    if (u(i) != Complex(0, 0)) p.set(mis[i], u(i) * std::exp(-0.5 * log_bw_weight(mis[i], d)));
  }
  return p;
}

// ---------------------------------------------------------------------------
// Binary homogeneous polynomials (n = 1), dense: coeff[k] multiplies
// z0^k z1^(d-k).
// ---------------------------------------------------------------------------

class BinaryHomPoly {
public:
  BinaryHomPoly() = default;
  explicit BinaryHomPoly(int d) : c_(d + 1, Complex(0, 0)) {
    if (d < 1) throw InvalidPolynomial("degree must be >= 1");
  }
  explicit BinaryHomPoly(std::vector<Complex> coeffs) : c_(std::move(coeffs)) {
    if (c_.size() < 2) throw InvalidPolynomial("degree must be >= 1");
  }

  int d() const { return static_cast<int>(c_.size()) - 1; }
  Complex coeff(int k) const { return c_[k]; }
  void set(int k, Complex v) { c_[k] = v; }
  const std::vector<Complex>& coeffs() const { return c_; }

  bool is_zero(double tol = 0.0) const {
    for (auto& c : c_)
      if (std::abs(c) > tol) return false;
    return true;
  }

  double max_abs_coeff() const {
    double m = 0;
    for (auto& c : c_) m = std::max(m, std::abs(c));
    return m;
  }

  Complex eval(Complex z0, Complex z1) const {
    // Horner in the better-scaled chart.
    const int deg = d();
    if (std::abs(z0) <= std::abs(z1)) {
      if (std::abs(z1) < 1e-300) return c_[deg] * std::pow(z0, deg);
      Complex w = z0 / z1, s = c_[deg];
      for (int k = deg - 1; k >= 0; --k) s = s * w + c_[k];
      return s * std::pow(z1, deg);
    }
    Complex w = z1 / z0, s = c_[0];
    for (int k = 1; k <= deg; ++k) s = s * w + c_[k];
    return s * std::pow(z0, deg);
  }

  Complex eval(const CVector& z) const { return eval(z(0), z(1)); }

  /// (d p/d z0, d p/d z1)
  CVector grad(const CVector& z) const {
    const int deg = d();
    Complex g0(0, 0), g1(0, 0);
    for (int k = 0; k <= deg; ++k) {
      if (c_[k] == Complex(0, 0)) continue;
      if (k >= 1) g0 += c_[k] * static_cast<double>(k) * pow_mon(z, k - 1, deg - k);
      if (deg - k >= 1) g1 += c_[k] * static_cast<double>(deg - k) * pow_mon(z, k, deg - k - 1);
    }
    CVector g(2);
    g(0) = g0;
    g(1) = g1;
    return g;
  }

  double bw_norm_sq() const {
    const int deg = d();
    double s = 0;
    for (int k = 0; k <= deg; ++k) {
      double w = std::exp(std::lgamma(k + 1.0) + std::lgamma(deg - k + 1.0) - std::lgamma(deg + 1.0));
      s += w * std::norm(c_[k]);
    }
    return s;
  }

  double bw_norm() const { return std::sqrt(bw_norm_sq()); }

  BinaryHomPoly bw_normalized() const {
    double nrm = bw_norm();
    if (!(nrm > 1e-300)) throw InvalidPolynomial("cannot normalize the zero polynomial");
    std::vector<Complex> out = c_;
    for (auto& c : out) c /= nrm;
    return BinaryHomPoly(std::move(out));
  }

  HomPoly to_hompoly() const {
    HomPoly p(1, d());
    for (int k = 0; k <= d(); ++k)
      if (c_[k] != Complex(0, 0)) p.set({k, d() - k}, c_[k]);
    return p;
  }

  static BinaryHomPoly from_hompoly(const HomPoly& p) {
    if (p.n() != 1) throw DimensionMismatch("not a binary polynomial");
    BinaryHomPoly b(p.d());
    for (auto& [a, c] : p.coeffs()) b.set(a[0], c);
    return b;
  }

private:
  static Complex pow_mon(const CVector& z, int e0, int e1) {
    Complex t(1, 0);
    for (int i = 0; i < e0; ++i) t *= z(0);
    for (int i = 0; i < e1; ++i) t *= z(1);
    return t;
  }

  std::vector<Complex> c_;
};

// ---------------------------------------------------------------------------
// Restriction to a line: coefficients of (z0, z1) -> p(z0 e0 + z1 e1).
// Multinomial expansion for d <= 12, unit-circle interpolation above
// (Vandermonde at roots of unity inverts exactly).
// ---------------------------------------------------------------------------

namespace detail {

// coefficient array of (a z0 + b z1)^m, index = power of z0
inline std::vector<Complex> linear_power(Complex a, Complex b, int m) {
  std::vector<Complex> out(m + 1);
  // binomials iteratively
  double binom = 1.0;
  // out[k] = C(m,k) a^k b^{m-k}
  std::vector<Complex> apow(m + 1), bpow(m + 1);
  apow[0] = bpow[0] = Complex(1, 0);
  for (int k = 1; k <= m; ++k) {
    apow[k] = apow[k - 1] * a;
    bpow[k] = bpow[k - 1] * b;
  }
  for (int k = 0; k <= m; ++k) {
    if (k > 0) binom = binom * (m - k + 1) / k;
    out[k] = binom * apow[k] * bpow[m - k];
  }
  return out;
}

inline std::vector<Complex> conv(const std::vector<Complex>& x, const std::vector<Complex>& y) {
  std::vector<Complex> out(x.size() + y.size() - 1, Complex(0, 0));
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) out[i + j] += x[i] * y[j];
  return out;
}

}  // namespace detail

inline BinaryHomPoly restrict_to_line(const HomPoly& p, const Line& line) {
  if (line.e0.size() != p.vars()) throw DimensionMismatch("line frame dimension mismatch");
  if (p.is_zero()) throw InvalidPolynomial("restrict of the zero polynomial");
  const int d = p.d();
  std::vector<Complex> acc(d + 1, Complex(0, 0));
  if (d <= 12) {
    for (auto& [a, c] : p.coeffs()) {
      std::vector<Complex> term{c};
      for (int j = 0; j < p.vars(); ++j) {
        if (a[j] == 0) continue;
        term = detail::conv(term, detail::linear_power(line.e0(j), line.e1(j), a[j]));
      }
      term.resize(d + 1, Complex(0, 0));
      for (int k = 0; k <= d; ++k) acc[k] += term[k];
    }
  } else {
    // p(w e0 + e1) = sum_k a_k w^k at w = roots of unity
    const int m = d + 1;
    std::vector<Complex> f(m);
    for (int j = 0; j < m; ++j) {
      Complex w = std::polar(1.0, 2.0 * kPi * j / m);
      CVector z = w * line.e0 + line.e1;
      f[j] = eval(p, z);
    }
    for (int k = 0; k < m; ++k) {
      Complex s(0, 0);
      for (int j = 0; j < m; ++j) s += f[j] * std::polar(1.0, -2.0 * kPi * j * k / m);
      acc[k] = s / static_cast<double>(m);
    }
  }
  return BinaryHomPoly(std::move(acc));
}

/// Product expansion of prod_j (l_{j,1} z0 - l_{j,0} z1)^{m_j}, normalized to
/// unit Bombieri-Weyl norm. Roots must be points of CP^1.
inline BinaryHomPoly poly_from_roots(const std::vector<std::pair<ProjPoint, int>>& roots) {
  if (roots.empty()) throw InvalidPolynomial("empty root list");
  std::vector<Complex> acc{Complex(1, 0)};
  int total = 0;
  for (auto& [pt, mult] : roots) {
    if (pt.ambient_vars() != 2) throw DimensionMismatch("roots must be on CP^1");
    if (mult < 1) throw InvalidPolynomial("multiplicities must be positive");
    total += mult;
    Complex l0 = pt.rep()(0), l1 = pt.rep()(1);
    for (int k = 0; k < mult; ++k) acc = detail::conv(acc, {Complex(0, 0) - l0, l1});
    // factor (l1 z0 - l0 z1): coeff of z0^1 is l1, of z1^1 (index 0) is -l0
  }
  if (total < 1) throw InvalidPolynomial("total degree must be >= 1");
  return BinaryHomPoly(std::move(acc)).bw_normalized();
}

// ---------------------------------------------------------------------------
// Change of variables p -> p(M z); unitary M preserves the BW norm.
// ---------------------------------------------------------------------------

inline HomPoly compose(const HomPoly& p, const CMatrix& m) {
  if (m.rows() != p.vars() || m.cols() != p.vars()) throw DimensionMismatch("compose shape");
  const int nv = p.vars();
  // multiply sparse multivariate polynomials: map multi-index -> coeff
  using Poly = std::map<MultiIndex, Complex>;
  auto mul = [&](const Poly& x, const Poly& y) {
    Poly out;
    for (auto& [ax, cx] : x)
      for (auto& [ay, cy] : y) {
        MultiIndex a(nv);
        for (int i = 0; i < nv; ++i) a[i] = ax[i] + ay[i];
        out[a] += cx * cy;
      }
    return out;
  };
  HomPoly result(p.n(), p.d());
  for (auto& [alpha, c] : p.coeffs()) {
    Poly term{{MultiIndex(nv, 0), c}};
    for (int j = 0; j < nv; ++j) {
      if (alpha[j] == 0) continue;
      Poly lin;
      for (int k = 0; k < nv; ++k) {
        if (m(j, k) == Complex(0, 0)) continue;
        MultiIndex a(nv, 0);
        a[k] = 1;
        lin[a] = m(j, k);
      }
      for (int e = 0; e < alpha[j]; ++e) term = mul(term, lin);
    }
    for (auto& [a, cc] : term)
      if (cc != Complex(0, 0)) result.add(a, cc);
  }
  return result;
}

inline BinaryHomPoly compose(const BinaryHomPoly& p, const CMatrix& m) {
  return BinaryHomPoly::from_hompoly(compose(p.to_hompoly(), m));
}

}  // namespace projot
