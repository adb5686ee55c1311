#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace pjt;

namespace {

HomPoly z0_pow(int d) { return HomPoly::variable_power(1, d, 0); }
HomPoly z1_pow(int d) { return HomPoly::variable_power(1, d, 1); }

PolyPath rotation_path(int K, double theta_rate) {
  // c_t = cos(theta_rate t) z1 + sin(theta_rate t) z0, d = 1
  std::vector<HomPoly> knots(K);
  std::vector<double> times = PolyPath::uniform_times(K);
  for (int i = 0; i < K; ++i) {
    double th = theta_rate * times[i];
    HomPoly p(1, 1);
    p.set({0, 1}, {std::cos(th), 0});
    p.set({1, 0}, {std::sin(th), 0});
    knots[i] = p;
  }
  return PolyPath(std::move(knots), std::move(times));
}

}  // namespace

TEST_CASE("hhat closed form: 2 pi at the linear pole") {
  auto h = hhat(z1_pow(1), z0_pow(1), z0_pow(1), QuadratureSpec::exact());
  CHECK(std::abs(h.value - Complex(2 * kPi, 0)) < 1e-10);
  CHECK(h.stderr_est == 0.0);

  auto hm = hhat(z1_pow(1), z0_pow(1), z0_pow(1), QuadratureSpec::monte_carlo(2000, 5));
  CHECK(std::abs(hm.value - Complex(2 * kPi, 0)) < 3 * hm.stderr_est);
}

TEST_CASE("hhat kernel and Hermitian symmetry") {
  Rng rng(127);
  for (int it = 0; it < 20; ++it) {
    int d = 2 + static_cast<int>(rng.uniform() * 4);
    HomPoly p = random_separated_binary(d, rng, 0.1).to_hompoly();
    HomPoly q = random_hompoly(1, d, rng);
    auto k = hhat(p, p, q, QuadratureSpec::exact());
    CHECK(std::abs(k.value) < 1e-9);
    HomPoly q2 = random_hompoly(1, d, rng);
    auto a = hhat(p, q, q2, QuadratureSpec::exact());
    auto b = hhat(p, q2, q, QuadratureSpec::exact());
    CHECK(std::abs(a.value - std::conj(b.value)) < 1e-10 * (1 + std::abs(a.value)));
  }
}

TEST_CASE("hhat scale invariance and kernel perturbation") {
  Rng rng(131);
  HomPoly p = random_separated_binary(3, rng, 0.1).to_hompoly();
  HomPoly q = random_hompoly(1, 3, rng);
  Complex lambda = rng.cgauss();
  auto base = hhat(p, q, q, QuadratureSpec::exact());
  auto scaled = hhat(lambda * p, lambda * q, lambda * q, QuadratureSpec::exact());
  CHECK(std::abs(base.value - scaled.value) < 1e-9 * (1 + std::abs(base.value)));

  HomPoly r = random_hompoly(1, 3, rng);
  auto hr = hhat(p, r, r, QuadratureSpec::exact()).value.real();
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    HomPoly pert = p + Complex(eps, 0) * r;
    double hv = hhat(p, pert, pert, QuadratureSpec::exact()).value.real();
    CHECK(std::abs(hv - eps * eps * hr) <= eps * 1e-6 + 1e-10);
  }
}

TEST_CASE("hhat unitary invariance") {
  Rng rng(137);
  for (int it = 0; it < 10; ++it) {
    HomPoly p = random_separated_binary(3, rng, 0.1).to_hompoly();
    HomPoly q1 = random_hompoly(1, 3, rng), q2 = random_hompoly(1, 3, rng);
    CMatrix g = rng.unitary(2);
    CMatrix ginv = g.adjoint();
    auto a = hhat(p, q1, q2, QuadratureSpec::exact());
    auto b = hhat(compose(p, ginv), compose(q1, ginv), compose(q2, ginv), QuadratureSpec::exact());
    CHECK(std::abs(a.value - b.value) < 1e-7 * (1 + std::abs(a.value)));
  }
}

TEST_CASE("hhat exact versus Monte Carlo at n = 1") {
  Rng rng(139);
  for (int it = 0; it < 5; ++it) {
    HomPoly p = random_separated_binary(3, rng, 0.15).to_hompoly();
    HomPoly q = random_hompoly(1, 3, rng);
    auto ex = hhat(p, q, q, QuadratureSpec::exact());
    auto mc = hhat(p, q, q, QuadratureSpec::monte_carlo(500, 1000 + it));
    CHECK(std::abs(ex.value - mc.value) < 3 * mc.stderr_est + 1e-12);
  }
}

TEST_CASE("hhat closed form for linear forms at n = 2") {
  // For unit linear p the zero set on S^5 is the unit 3-sphere of a complex
  // plane, grad p is constant, and the integral of |q(b)|^2 over S^3(V) is
  // vol(S^3) * |w|^2 / 2 with w the component of q BW-orthogonal to p:
  // h-hat_p(q, q) = pi^2 * (|q|^2 - |<q,p>|^2).
  Rng rng(141);
  for (int it = 0; it < 3; ++it) {
    HomPoly p = random_hompoly(2, 1, rng);
    HomPoly q = random_hompoly(2, 1, rng);
    double qn = bw_norm(q);
    double overlap = std::abs(bw_inner(q, p));
    double expected = kPi * kPi * (qn * qn - overlap * overlap);
    auto mc = hhat(p, q, q, QuadratureSpec::monte_carlo(4000, 77 + it));
    CHECK(std::abs(mc.value.real() - expected) < 3 * mc.stderr_est + 1e-10);
    CHECK(std::abs(mc.value.imag()) < 3 * mc.stderr_est + 1e-10);
  }
}

TEST_CASE("hhat near-discriminant guard") {
  // (z0 - z1)^2 has a singular zero: the gradient vanishes there
  HomPoly dbl = binary_from({{1, 0}, {-2, 0}, {1, 0}}).to_hompoly();
  CHECK_THROWS_AS(hhat(dbl, dbl, dbl, QuadratureSpec::exact()), NearDiscriminant);
}

TEST_CASE("hermitian_gram: kernel vector, PSD, closed form at d = 1") {
  HomPoly p = z1_pow(1);
  CMatrix g1 = hermitian_gram(p, {p}, QuadratureSpec::exact());
  CHECK(std::abs(g1(0, 0)) < 1e-12);

  CMatrix g = hermitian_gram(p, {z0_pow(1), z1_pow(1)}, QuadratureSpec::exact());
  CHECK(std::abs(g(0, 0) - Complex(2 * kPi, 0)) < 1e-10);
  CHECK(std::abs(g(1, 1)) < 1e-10);
  CHECK(std::abs(g(0, 1)) < 1e-10);

  Rng rng(149);
  HomPoly pp = random_separated_binary(3, rng, 0.1).to_hompoly();
  std::vector<HomPoly> basis;
  auto mis = multi_indices(1, 3);
  for (auto& a : mis) basis.push_back(HomPoly::monomial(1, a, std::exp(-0.5 * log_bw_weight(a, 3))));
  CMatrix gg = hermitian_gram(pp, basis, QuadratureSpec::exact());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(gg);
  for (int i = 0; i < es.eigenvalues().size(); ++i) CHECK(es.eigenvalues()(i) > -1e-9);
  // kernel is exactly span{p}: the smallest eigenvalue on the BW-orthogonal
  // complement of p is positive
  CVector u = bw_coords(pp);
  u /= u.norm();
  CMatrix proj = CMatrix::Identity(4, 4) - u * u.adjoint();
  CMatrix restricted = proj * gg * proj;
  Eigen::SelfAdjointEigenSolver<CMatrix> es2(restricted);
  std::vector<double> ev;
  for (int i = 0; i < 4; ++i) ev.push_back(es2.eigenvalues()(i));
  std::sort(ev.begin(), ev.end());
  CHECK(ev[0] > -1e-9);   // the projected-out direction
  CHECK(ev[1] > 1e-6);    // everything orthogonal to p is non-degenerate
}

TEST_CASE("kahler form: antisymmetry and compatibility") {
  Rng rng(151);
  HomPoly p = random_separated_binary(3, rng, 0.1).to_hompoly();
  for (int it = 0; it < 10; ++it) {
    HomPoly q1 = random_hompoly(1, 3, rng), q2 = random_hompoly(1, 3, rng);
    double s12 = kahler_form(p, q1, q2, QuadratureSpec::exact());
    double s21 = kahler_form(p, q2, q1, QuadratureSpec::exact());
    CHECK(std::abs(kahler_form(p, q1, q1, QuadratureSpec::exact())) < 1e-10);
    CHECK(std::abs(s12 + s21) < 1e-10 * (1 + std::abs(s12)));
    // sigma(i q1, i q2) = sigma(q1, q2)
    double sii = kahler_form(p, Complex(0, 1) * q1, Complex(0, 1) * q2, QuadratureSpec::exact());
    CHECK(std::abs(sii - s12) < 1e-10 * (1 + std::abs(s12)));
    // g(u, v) = Re h(u, v) = sigma(i u, v) with the integrand convention
    // h(q1, q2) = q1 conj(q2); equivalently sigma(u, i v) = -g(u, v)
    double g = hhat(p, q1, q2, QuadratureSpec::exact()).value.real();
    double s_iu_v = kahler_form(p, Complex(0, 1) * q1, q2, QuadratureSpec::exact());
    CHECK(std::abs(g - s_iu_v) < 1e-10 * (1 + std::abs(g)));
  }
}

TEST_CASE("path_energy: constant path, rotation family, reparametrization") {
  Rng rng(157);
  HomPoly p = random_separated_binary(3, rng, 0.1).to_hompoly();
  std::vector<HomPoly> ks(9, p);
  PolyPath constant(ks, PolyPath::uniform_times(9));
  PathEnergy pe = path_energy(constant, QuadratureSpec::exact());
  CHECK(pe.energy == Catch::Approx(0.0).margin(1e-14));

  // the single root of c_t traverses a Fubini-Study geodesic at speed pi/4
  PolyPath rot = rotation_path(33, kPi / 4);
  PathEnergy re = path_energy(rot, QuadratureSpec::exact());
  double expected = (kPi / 4) * (kPi / 4);
  CHECK(rel_err(re.energy, expected) < 2e-3);
  for (double s : re.node_speed_sq) CHECK(rel_err(std::sqrt(s), kPi / 4) < 2e-3);

  // a warped time grid of the same trace has energy >= the constant-speed one
  std::vector<double> warped(33);
  for (int i = 0; i < 33; ++i) {
    double s = i / 32.0;
    warped[i] = s * s * (3 - 2 * s);  // smoothstep
  }
  warped[0] = 0;
  warped[32] = 1;
  std::vector<HomPoly> wk(33);
  for (int i = 0; i < 33; ++i) {
    double th = kPi / 4 * warped[i];
    HomPoly q(1, 1);
    q.set({0, 1}, {std::cos(th), 0});
    q.set({1, 0}, {std::sin(th), 0});
    wk[i] = q;
  }
  PolyPath warped_path(std::move(wk), PolyPath::uniform_times(33));
  PathEnergy we = path_energy(warped_path, QuadratureSpec::exact());
  CHECK(re.energy <= we.energy * 1.01);
  CHECK(re.richardson < 1e-3);
}

TEST_CASE("path_energy with analytic velocities") {
  PolyPath rot = rotation_path(17, kPi / 4);
  std::vector<HomPoly> vels(17);
  for (int i = 0; i < 17; ++i) {
    double th = kPi / 4 * rot.times[i];
    HomPoly v(1, 1);
    v.set({0, 1}, {-std::sin(th) * kPi / 4, 0});
    v.set({1, 0}, {std::cos(th) * kPi / 4, 0});
    vels[i] = v;
  }
  PathEnergy pe = path_energy(rot, vels, QuadratureSpec::exact());
  CHECK(rel_err(pe.energy, (kPi / 4) * (kPi / 4)) < 1e-10);
}

TEST_CASE("path_energy lower-bounds by the endpoint Wasserstein distance") {
  Rng rng(163);
  for (int it = 0; it < 5; ++it) {
    BinaryHomPoly p0 = random_separated_binary(3, rng, 0.2);
    BinaryHomPoly p1 = random_separated_binary(3, rng, 0.2);
    PolynomialGeodesic geo = w2_polynomial_geodesic(p0, p1);
    const int K = 33;
    std::vector<HomPoly> ks(K);
    std::vector<double> ts = PolyPath::uniform_times(K);
    for (int i = 0; i < K; ++i) ks[i] = geo.at(ts[i]).to_hompoly();
    PolyPath path(std::move(ks), std::move(ts));
    PathEnergy pe = path_energy(path, QuadratureSpec::exact());
    double w = wq_assignment(mu_exact_n1(p0), mu_exact_n1(p1), 2.0).distance;
    // finite differences shorten chords by O(1/K^2); allow exactly that much
    CHECK(pe.energy >= w * w * (1.0 - 5.0 / (K * K)) - 1e-9);
    // along the W_2 geodesic the energy is the squared distance
    CHECK(rel_err(pe.energy, w * w) < 0.01);
    // the discrete metric energy respects the bound with no discretization slack
    CHECK(path_metric_energy(path, {}) >= w * w - 1e-12);
  }
}

TEST_CASE("metric_speed_n1: kernel, rotation, random agreement") {
  Rng rng(167);
  BinaryHomPoly c = random_separated_binary(4, rng, 0.1);
  MetricSpeedN1 zero = metric_speed_n1(c, c);
  CHECK(zero.hermitian < 1e-10);

  // unit-rate rotation family: speed exactly 1
  double th = 0.35;
  BinaryHomPoly cc = binary_from({{std::sin(th), 0}, {std::cos(th), 0}});
  BinaryHomPoly cd = binary_from({{std::cos(th), 0}, {-std::sin(th), 0}});
  MetricSpeedN1 rotsp = metric_speed_n1(cc, cd);
  CHECK(rel_err(rotsp.hermitian, 1.0) < 1e-12);
  CHECK(rel_err(rotsp.root_velocity, 1.0) < 1e-12);

  for (int it = 0; it < 50; ++it) {
    BinaryHomPoly a = random_separated_binary(4, rng, 0.1);
    BinaryHomPoly v = random_binary(4, rng);
    MetricSpeedN1 sp = metric_speed_n1(a, v);
    CHECK(rel_err(sp.hermitian, sp.root_velocity) < 1e-8);
  }
}
