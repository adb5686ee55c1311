#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace projot {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;

// Global projective-equality tolerance on 1 - |<x,y>| (single knob, see README).
inline constexpr double kProjEqTol = 1e-9;

// ---------------------------------------------------------------------------
// Errors. Exit-code classes: 2 = bad input, 3 = degenerate math, 4 = no
// convergence. The CLI maps exceptions to exit codes through `exit_code()`.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
  Error(std::string name, std::string what, int exit_code)
      : std::runtime_error(name + ": " + what), name_(std::move(name)), exit_code_(exit_code) {}
  const std::string& name() const { return name_; }
  int exit_code() const { return exit_code_; }

private:
  std::string name_;
  int exit_code_;
};

#define PROJOT_ERROR(NAME, CODE)                                        \
  class NAME : public Error {                                           \
  public:                                                               \
    explicit NAME(const std::string& what) : Error(#NAME, what, CODE) {} \
  };

PROJOT_ERROR(InvalidPolynomial, 2)
PROJOT_ERROR(DimensionMismatch, 2)
PROJOT_ERROR(InvalidMeasure, 2)
PROJOT_ERROR(InvalidTransform, 2)
PROJOT_ERROR(SizeMismatch, 2)
PROJOT_ERROR(InvalidInput, 2)
PROJOT_ERROR(DegenerateSampling, 3)
PROJOT_ERROR(AmbiguousGeodesic, 3)
PROJOT_ERROR(NearDiscriminant, 3)
PROJOT_ERROR(EndpointOnDiscriminant, 3)
PROJOT_ERROR(InfiniteCondition, 3)
PROJOT_ERROR(DegenerateRootSet, 3)
PROJOT_ERROR(TrackingLost, 3)
PROJOT_ERROR(RootFindingFailed, 4)
PROJOT_ERROR(StuckNearDiscriminant, 4)

#undef PROJOT_ERROR

// ---------------------------------------------------------------------------
// RNG. Box-Muller on top of mt19937_64 so that seeded streams are stable
// across standard-library versions (std::normal_distribution is not).
// ---------------------------------------------------------------------------

class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() {
    // in (0,1); 53-bit mantissa
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1p-53;
  }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = uniform(), v = uniform();
    double r = std::sqrt(-2.0 * std::log(u));
    double a = 2.0 * kPi * v;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  Complex cgauss() {
    // standard complex Gaussian: density exp(-|z|^2)/pi
    double u = uniform(), v = uniform();
    double r = std::sqrt(-std::log(u));
    double a = 2.0 * kPi * v;
    return {r * std::cos(a), r * std::sin(a)};
  }

  CVector cgauss_vector(int m) {
    CVector z(m);
    for (int i = 0; i < m; ++i) z(i) = cgauss();
    return z;
  }

  std::uint64_t raw() { return gen_(); }

  // Haar-distributed unitary via QR of a complex Gaussian matrix with the
  // usual phase fix on the diagonal of R.
  CMatrix unitary(int m) {
    CMatrix g(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) g(i, j) = cgauss();
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ();
    CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < m; ++j) {
      Complex d = r(j, j);
      double ad = std::abs(d);
      Complex phase = ad > 0 ? d / ad : Complex(1, 0);
      q.col(j) *= phase;
    }
    return q;
  }

private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// Deterministic parallel loop: static blocked partition, results must be
// written to caller-owned slots so the schedule never affects the output.
// ---------------------------------------------------------------------------

template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  int workers = std::min<std::size_t>(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([=, &fn]() {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

// vol(S^{2n-1}) = 2 pi^n / (n-1)!
inline double sphere_volume_odd(int n) {
  double v = 2.0 * std::pow(kPi, n);
  for (int k = 2; k < n; ++k) v /= k;
  return n >= 1 ? v : 0.0;
}

}  // namespace projot
