#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace pjt;

namespace {

HomPoly from_coeffs_n1(std::initializer_list<Complex> cs) {
  return binary_from(cs).bw_normalized().to_hompoly();
}

}  // namespace

TEST_CASE("initial_path: constant, plain interpolation, kicked interpolation") {
  GeodesicConfig cfg;
  cfg.knots = 5;
  cfg.root_interpolation_init = false;  // exercise the coefficient-FS route

  HomPoly p = from_coeffs_n1({{0, 0}, {1, 0}, {0, 0}, {1, 0}});
  PolyPath constant = initial_path(p, p, 5, cfg);
  for (auto& k : constant.knots) CHECK(bw_norm(k - constant.knots.front()) < 1e-10);

  // the n = 1 default: matched-root interpolation, endpoints reproduced
  GeodesicConfig rcfg;
  PolyPath rooted = initial_path(p, from_coeffs_n1({{1, 0}, {0, 0}, {0, 0}, {2, 0}}), 5, rcfg);
  CHECK(std::abs(std::abs(bw_inner(rooted.knots.front(), bw_normalized(p))) - 1.0) < 1e-9);

  // z0^2 + z1^2 to 2 z0^2 + z1^2: no discriminant crossing, plain FS accepted
  HomPoly a = from_coeffs_n1({{1, 0}, {0, 0}, {1, 0}});
  HomPoly b = from_coeffs_n1({{1, 0}, {0, 0}, {2, 0}});
  PolyPath plain = initial_path(a, b, 3, cfg);
  CVector u0 = bw_coords(plain.knots[0]), u1 = bw_coords(plain.knots[2]);
  CVector mid_expect = detail::slerp(u0 / u0.norm(), u1 / u1.norm(), 0.5);
  CVector mid = bw_coords(plain.knots[1]);
  mid /= mid.norm();
  Complex al = herm_inner(mid, mid_expect);
  CHECK(std::abs(std::abs(al) - 1.0) < 1e-10);
  for (int i = 0; i < 3; ++i)
    CHECK(discriminant_guard_value(plain.knots[i], {}) > cfg.guard_delta);

  // z0 z1 to (z0 - z1)(z0 + z1) = z0^2 - z1^2: interior knots pass the guard
  // (with kicks if the straight interpolation gets too close to Delta)
  HomPoly c = from_coeffs_n1({{0, 0}, {1, 0}, {0, 0}});
  HomPoly e = from_coeffs_n1({{-1, 0}, {0, 0}, {1, 0}});
  PolyPath kicked = initial_path(c, e, 7, cfg);
  for (auto& k : kicked.knots) CHECK(discriminant_guard_value(k, {}) > cfg.guard_delta);

  // endpoints on the discriminant are rejected
  HomPoly dbl = from_coeffs_n1({{1, 0}, {-2, 0}, {1, 0}});
  CHECK_THROWS_AS(initial_path(dbl, a, 5, cfg), EndpointOnDiscriminant);
}

TEST_CASE("optimize at n=1 reaches the Hungarian W2 squared") {
  Rng rng(173);
  GeodesicConfig cfg;
  cfg.knots = 17;
  for (int it = 0; it < 6; ++it) {
    int d = 2 + it % 3;
    BinaryHomPoly p0 = random_separated_binary(d, rng, 0.25);
    BinaryHomPoly p1 = random_separated_binary(d, rng, 0.25);
    cfg.seed = 100 + it;
    GeodesicResult r = optimize(p0.to_hompoly(), p1.to_hompoly(), cfg);
    double w = r.ambient_w2;
    CHECK(r.energy <= w * w * 1.02);
    CHECK(r.w2in_estimate >= w - 1e-6);
    for (std::size_t i = 1; i < r.energy_trace.size(); ++i)
      CHECK(r.energy_trace[i] <= r.energy_trace[i - 1] + 1e-15);
    // near-constant parametrization after the final re-gridding
    double smax = 0, smin = 1e300;
    for (double s : r.node_speeds) {
      smax = std::max(smax, s);
      smin = std::min(smin, s);
    }
    if (smax > 1e-8) CHECK((smax - smin) / smax < 0.10);
  }
}

TEST_CASE("optimize symmetry in the endpoints") {
  Rng rng(179);
  GeodesicConfig cfg;
  cfg.knots = 13;
  BinaryHomPoly p0 = random_separated_binary(3, rng, 0.25);
  BinaryHomPoly p1 = random_separated_binary(3, rng, 0.25);
  cfg.seed = 7;
  GeodesicResult fwd = optimize(p0.to_hompoly(), p1.to_hompoly(), cfg);
  GeodesicResult bwd = optimize(p1.to_hompoly(), p0.to_hompoly(), cfg);
  CHECK(rel_err(fwd.energy, bwd.energy) < 0.02);
}

TEST_CASE("optimize at d=1: the metric is a multiple of Fubini-Study") {
  // the unique geodesic is the coefficient great circle; energy is constant
  // across reruns with different seeds
  GeodesicConfig cfg;
  cfg.knots = 9;
  HomPoly p0 = from_coeffs_n1({{1, 0}, {0.3, 0.4}});
  HomPoly p1 = from_coeffs_n1({{-0.2, 0.5}, {1, 0}});
  std::vector<double> energies;
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    cfg.seed = seed;
    energies.push_back(optimize(p0, p1, cfg).energy);
  }
  CHECK(rel_err(energies[0], energies[1]) < 1e-6);
  CHECK(rel_err(energies[0], energies[2]) < 1e-6);
  // d = 1, n = 1: mu is a unitary image of the coefficient point, so the
  // inner distance equals the coefficient FS distance
  CVector u0 = bw_coords(p0), u1 = bw_coords(p1);
  double dfs = std::acos(clamp01(std::abs(herm_inner(u1, u0)) / (u0.norm() * u1.norm())));
  CHECK(rel_err(std::sqrt(energies[0]), dfs) < 1e-3);
}

TEST_CASE("optimize keeps the lower bound at n = 2") {
  GeodesicConfig cfg;
  cfg.knots = 7;
  cfg.max_iterations = 40;
  cfg.quad_lines = 120;
  cfg.seed = 5;
  Rng rng(181);
  HomPoly p0 = random_hompoly(2, 2, rng);
  HomPoly p1 = random_hompoly(2, 2, rng);
  GeodesicResult r = optimize(p0, p1, cfg);
  CHECK(r.w2in_estimate >= r.ambient_w2 - 1e-6);
  CHECK(r.energy_trace.front() + 1e-12 >= r.energy_trace.back());
}

TEST_CASE("endpoint reparametrization grid is usable near the discriminant") {
  Rng rng(187);
  GeodesicConfig cfg;
  cfg.knots = 9;
  cfg.max_iterations = 60;
  cfg.endpoint_reparam_m = 3;  // clusters time nodes at both endpoints
  BinaryHomPoly p0 = random_separated_binary(3, rng, 0.2);
  BinaryHomPoly p1 = random_separated_binary(3, rng, 0.2);
  GeodesicResult r = optimize(p0.to_hompoly(), p1.to_hompoly(), cfg);
  CHECK(r.w2in_estimate >= r.ambient_w2 - 1e-6);
  CHECK(r.energy <= r.ambient_w2 * r.ambient_w2 * 1.05);
  // the grid is indeed clustered
  double first_gap = r.path.times[1] - r.path.times[0];
  double mid_gap = r.path.times[5] - r.path.times[4];
  CHECK(first_gap < 0.5 * mid_gap);
}

TEST_CASE("lipschitz_probe reports a bounded band") {
  Rng rng(191);
  GeodesicConfig cfg;
  cfg.knots = 9;
  cfg.max_iterations = 120;

  // d = 1: the ratio is constant across scales (multiple of FS)
  LipschitzProbe flat = lipschitz_probe(1, 1, 0.2, 10, rng, cfg);
  for (auto& pr : flat.pairs) CHECK(rel_err(pr.ratio, flat.median_ratio) < 5e-3);

  // n = 1, d = 3 with margin 0.2: finite band, no pair above 10x the median
  LipschitzProbe probe = lipschitz_probe(1, 3, 0.2, 20, rng, cfg);
  CHECK(probe.max_ratio <= 10 * probe.median_ratio);
  CHECK(probe.median_ratio > 0);
}
