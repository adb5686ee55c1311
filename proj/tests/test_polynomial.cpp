#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace pjt;

TEST_CASE("eval on monomials and homogeneity") {
  HomPoly p(1, 2);
  p.set({1, 1}, {1, 0});  // z0 z1
  CVector z(2);
  z(0) = Complex(1, 0);
  z(1) = Complex(1, 0);
  CHECK(eval(p, z) == Complex(1, 0));

  const int d = 5;
  HomPoly q = HomPoly::variable_power(2, d, 0);  // z0^d, n = 2
  Rng rng(1);
  Complex lambda = rng.cgauss();
  CVector e0 = CVector::Zero(3);
  e0(0) = Complex(1, 0);
  CHECK(std::abs(eval(q, (lambda * e0).eval()) - std::pow(lambda, d)) < 1e-12);

  for (int it = 0; it < 20; ++it) {
    HomPoly r = random_hompoly(2, 4, rng);
    CVector zz = rng.cgauss_vector(3);
    CHECK(std::abs(eval(r, (2.0 * zz).eval()) - 16.0 * eval(r, zz)) <
          1e-10 * std::abs(eval(r, zz)) + 1e-12);
  }
  CHECK_THROWS_AS(eval(HomPoly(1, 2), z), InvalidPolynomial);
}

TEST_CASE("grad_c and the Euler identity") {
  HomPoly p = HomPoly::variable_power(1, 2, 0);  // z0^2
  CVector z(2);
  z(0) = Complex(1, 0);
  z(1) = Complex(0, 0);
  CVector g = grad_c(p, z);
  CHECK(std::abs(g(0) - Complex(2, 0)) < 1e-15);
  CHECK(std::abs(g(1)) < 1e-15);

  HomPoly q(1, 2);
  q.set({1, 1}, {1, 0});  // z0 z1 -> grad = (z1, z0)
  Rng rng(2);
  CVector ab = rng.cgauss_vector(2);
  CVector gq = grad_c(q, ab);
  CHECK(std::abs(gq(0) - ab(1)) < 1e-14);
  CHECK(std::abs(gq(1) - ab(0)) < 1e-14);

  for (int it = 0; it < 100; ++it) {
    int n = 1 + static_cast<int>(rng.uniform() * 2);
    int d = 1 + static_cast<int>(rng.uniform() * 5);
    HomPoly r = random_hompoly(n, d, rng);
    CVector zz = rng.cgauss_vector(n + 1);
    Complex euler = herm_inner(zz, grad_c(r, zz).conjugate().eval()) - static_cast<double>(d) * eval(r, zz);
    CHECK(std::abs(euler) < 1e-10 * (1 + std::abs(eval(r, zz))));
  }
}

TEST_CASE("bw_inner: orthonormal basis scaling") {
  const int d = 4;
  HomPoly z0d = HomPoly::variable_power(1, d, 0);
  HomPoly z1d = HomPoly::variable_power(1, d, 1);
  CHECK(std::abs(bw_inner(z0d, z0d) - Complex(1, 0)) < 1e-14);
  CHECK(std::abs(bw_inner(z0d, z1d)) < 1e-15);

  // raw monomial z0 z1 at n=1, d=2 has squared norm 1/2
  HomPoly m(1, 2);
  m.set({1, 1}, {1, 0});
  CHECK(std::abs(bw_inner(m, m) - Complex(0.5, 0)) < 1e-14);

  HomPoly mismatch(1, 3);
  mismatch.set({3, 0}, {1, 0});
  CHECK_THROWS_AS(bw_inner(m, mismatch), DimensionMismatch);

  // Hermitian property and positivity on random inputs
  Rng rng(5);
  for (int it = 0; it < 20; ++it) {
    HomPoly a = random_hompoly(2, 3, rng), b = random_hompoly(2, 3, rng);
    CHECK(std::abs(bw_inner(a, b) - std::conj(bw_inner(b, a))) < 1e-14);
    CHECK(bw_inner(a, a).real() > 0);
    CHECK(std::abs(bw_inner(a, a).imag()) < 1e-14);
  }
}

TEST_CASE("bw_inner equals the Gaussian integral up to d!") {
  // Monte Carlo oracle for the integral definition (1/pi^{n+1}) int p qbar e^{-|z|^2};
  // the basis-orthonormal product used everywhere is that integral divided by d!.
  Rng rng(7);
  HomPoly m(1, 2);
  m.set({1, 1}, {1, 0});  // z0 z1
  const int N = 200000;
  double sum = 0, sumsq = 0;
  for (int i = 0; i < N; ++i) {
    Complex z0 = rng.cgauss(), z1 = rng.cgauss();
    double v = std::norm(z0 * z1);
    sum += v;
    sumsq += v * v;
  }
  double dfact = 2.0;
  double mean = sum / N / dfact;
  double sigma = std::sqrt((sumsq / N - (sum / N) * (sum / N)) / N) / dfact;
  CHECK(std::abs(mean - bw_inner(m, m).real()) < 3 * sigma);
}

TEST_CASE("bw_norm is unitarily invariant") {
  Rng rng(13);
  for (int it = 0; it < 25; ++it) {
    int n = 1 + static_cast<int>(rng.uniform() * 2);
    int d = 1 + static_cast<int>(rng.uniform() * 4);
    HomPoly p = random_hompoly(n, d, rng);
    CMatrix g = rng.unitary(n + 1);
    CHECK(rel_err(bw_norm(compose(p, g)), bw_norm(p)) < 1e-8);
  }
}

TEST_CASE("restrict_to_line: plane coordinates, contained lines, eval oracle") {
  // p = z0 on CP^2, line spanned by the first two coordinate axes
  HomPoly p = HomPoly::variable_power(2, 1, 0);
  Line l{CVector::Zero(3), CVector::Zero(3)};
  l.e0(0) = Complex(1, 0);
  l.e1(1) = Complex(1, 0);
  BinaryHomPoly r = restrict_to_line(p, l);
  CHECK(std::abs(r.coeff(1) - Complex(1, 0)) < 1e-15);
  CHECK(std::abs(r.coeff(0)) < 1e-15);

  // line contained in Z(p): p = z2 z0 and the z2 = 0 line
  HomPoly q(2, 2);
  q.set({1, 0, 1}, {1, 0});
  CHECK(restrict_to_line(q, l).max_abs_coeff() < 1e-14);

  Rng rng(19);
  for (int it = 0; it < 30; ++it) {
    int n = 2 + static_cast<int>(rng.uniform() * 2);
    int d = 1 + static_cast<int>(rng.uniform() * 13);  // crosses the d > 12 interpolation path
    HomPoly pp = random_hompoly(n, d, rng);
    Line ll = sample_line(n, rng);
    BinaryHomPoly rr = restrict_to_line(pp, ll);
    for (int k = 0; k < 20; ++k) {
      Complex z0 = rng.cgauss(), z1 = rng.cgauss();
      Complex direct = eval(pp, (z0 * ll.e0 + z1 * ll.e1).eval());
      CHECK(std::abs(rr.eval(z0, z1) - direct) < 1e-9 * (1 + std::abs(direct)));
    }
  }
}

TEST_CASE("restrict commutes with unitaries") {
  Rng rng(23);
  for (int it = 0; it < 20; ++it) {
    int n = 2;
    int d = 1 + static_cast<int>(rng.uniform() * 5);
    HomPoly p = random_hompoly(n, d, rng);
    CMatrix g = rng.unitary(n + 1);
    Line l = sample_line(n, rng);
    Line gl{g * l.e0, g * l.e1};
    BinaryHomPoly a = restrict_to_line(compose(p, g), l);
    BinaryHomPoly b = restrict_to_line(p, gl);
    for (int k = 0; k < 10; ++k) {
      Complex z0 = rng.cgauss(), z1 = rng.cgauss();
      CHECK(std::abs(a.eval(z0, z1) - b.eval(z0, z1)) < 1e-9 * (1 + std::abs(b.eval(z0, z1))));
    }
  }
}

TEST_CASE("poly_from_roots examples and round trip") {
  // roots [1,0], [0,1] -> z0 z1 up to scale
  BinaryHomPoly p = poly_from_roots({{pt2({1, 0}, {0, 0}), 1}, {pt2({0, 0}, {1, 0}), 1}});
  CHECK(std::abs(p.coeff(0)) < 1e-14);
  CHECK(std::abs(p.coeff(2)) < 1e-14);
  CHECK(std::abs(p.coeff(1)) > 0.5);

  // [1,1]/sqrt2 with multiplicity 2 -> (z0 - z1)^2 up to scale and phase
  double s = 1 / std::sqrt(2.0);
  BinaryHomPoly q = poly_from_roots({{pt2({s, 0}, {s, 0}), 2}});
  BinaryHomPoly ref = binary_from({{1, 0}, {-2, 0}, {1, 0}});
  CHECK(poly_distance_up_to_phase(q, ref) < 1e-12);

  CHECK_THROWS_AS(poly_from_roots({}), InvalidPolynomial);

  Rng rng(31);
  for (int it = 0; it < 100; ++it) {
    int d = 1 + static_cast<int>(rng.uniform() * 6);
    std::vector<std::pair<ProjPoint, int>> roots;
    std::vector<ProjPoint> pts;
    for (int k = 0; k < d; ++k) {
      ProjPoint z{rng.cgauss_vector(2)};
      bool clash = false;
      for (auto& w : pts)
        if (fs_distance(w, z) < 0.05) clash = true;
      if (clash) {
        --k;
        continue;
      }
      pts.push_back(z);
      roots.emplace_back(z, 1);
    }
    BinaryHomPoly pp = poly_from_roots(roots);
    RootSet rs = all_roots(pp);
    REQUIRE(rs.roots.size() == static_cast<std::size_t>(d));
    std::vector<ProjPoint> found;
    for (auto& [z, m] : rs.roots) found.push_back(z);
    CHECK(set_distance(pts, found) < 1e-8);
  }
}

TEST_CASE("bw coordinate round trip") {
  Rng rng(37);
  for (int it = 0; it < 20; ++it) {
    int n = 1 + static_cast<int>(rng.uniform() * 2);
    int d = 1 + static_cast<int>(rng.uniform() * 4);
    HomPoly p = random_hompoly(n, d, rng);
    CVector u = bw_coords(p);
    CHECK(std::abs(u.norm() - bw_norm(p)) < 1e-12);
    HomPoly q = from_bw_coords(n, d, u);
    CHECK(bw_norm(q - p) < 1e-12);
  }
}
