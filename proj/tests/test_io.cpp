#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace pjt;

TEST_CASE("polynomial JSON: exact layout and round trip") {
  HomPoly p(1, 2);
  p.set({0, 2}, {1, 0});
  p.set({2, 0}, {-0.5, 0.25});
  std::string s = poly_to_json(p);
  // graded-lex order of the multi-indices, 17-significant-digit numbers
  CHECK(s ==
        "{\"n\":1,\"d\":2,\"coeffs\":[{\"alpha\":[0,2],\"re\":1,\"im\":0},"
        "{\"alpha\":[2,0],\"re\":-0.5,\"im\":0.25}]}");
  HomPoly q = poly_from_json(nlohmann::json::parse(s));
  CHECK(bw_norm(q - p) < 1e-16);

  Rng rng(277);
  for (int it = 0; it < 10; ++it) {
    HomPoly r = random_hompoly(2, 3, rng);
    HomPoly rt = poly_from_json(nlohmann::json::parse(poly_to_json(r)));
    CHECK(bw_norm(rt - r) == 0.0);  // %.17g round-trips doubles exactly
  }
}

TEST_CASE("measure JSON round trip") {
  Rng rng(281);
  BinaryHomPoly p = random_separated_binary(4, rng, 0.1);
  AtomicMeasure m = mu_exact_n1(p);
  JsonWriter w;
  w.begin_object();
  write_measure_fields(w, m);
  w.end_object();
  AtomicMeasure r = measure_from_json(nlohmann::json::parse(w.str()));
  REQUIRE(r.atoms.size() == m.atoms.size());
  for (std::size_t i = 0; i < m.atoms.size(); ++i) {
    CHECK(fs_distance(r.atoms[i].point, m.atoms[i].point) < 1e-15);
    CHECK(r.atoms[i].weight == Catch::Approx(m.atoms[i].weight).margin(1e-16));
  }
}

TEST_CASE("path JSON round trip") {
  Rng rng(283);
  const int K = 5;
  std::vector<HomPoly> ks(K);
  std::vector<double> ts = PolyPath::uniform_times(K);
  for (int i = 0; i < K; ++i) ks[i] = random_hompoly(1, 3, rng);
  PolyPath path(ks, ts);
  JsonWriter w;
  w.begin_object();
  write_path_fields(w, path);
  w.end_object();
  PolyPath r = path_from_json(nlohmann::json::parse(w.str()));
  REQUIRE(r.knots.size() == path.knots.size());
  for (int i = 0; i < K; ++i) {
    CHECK(r.times[i] == path.times[i]);
    CHECK(bw_norm(r.knots[i] - path.knots[i]) < 1e-15);
  }
}

TEST_CASE("json writer emits deterministic 17-digit numbers") {
  CHECK(fmt17(kPi) == "3.1415926535897931");
  CHECK(fmt17(1.0) == "1");
  CHECK(fmt17(-0.125) == "-0.125");
  double x = 0.1 + 0.2;
  CHECK(std::stod(fmt17(x)) == x);
}
