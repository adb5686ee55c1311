// projot command-line driver: measures, distances, geodesics, energies,
// condition-number and regularity experiments with reproducible file I/O.

#include <iostream>

#include "CLI11.hpp"
#include "projot/geodesic.hpp"
#include "projot/io.hpp"
#include "projot/regularity.hpp"

namespace pj = projot;

namespace {

constexpr const char* kFormatVersion = "projot-1";

void add_common(CLI::App* cmd, pj::RunConfig& cfg) {
  cmd->add_option("--seed", cfg.seed, "RNG seed")->envname("PROJOT_SEED");
  cmd->add_option("--lines", cfg.lines, "Monte Carlo line count")->envname("PROJOT_LINES");
  cmd->add_option("--time-nodes", cfg.time_nodes, "time grid size")->envname("PROJOT_TIME_NODES");
  cmd->add_option("--q", cfg.q, "Wasserstein exponent")->envname("PROJOT_Q");
  cmd->add_option("--epsilon", cfg.epsilon, "tail cutoff epsilon")->envname("PROJOT_EPSILON");
  cmd->add_option("--knots", cfg.knots, "geodesic knot count")->envname("PROJOT_KNOTS");
  cmd->add_option("--threads", cfg.threads, "worker cap")->envname("PROJOT_THREADS");
  cmd->add_option("--cluster-radius", cfg.cluster_radius, "root clustering radius (<0: 1e-6*d)")
      ->envname("PROJOT_CLUSTER_RADIUS");
  cmd->add_option("--guard-delta", cfg.guard_delta, "discriminant guard")->envname("PROJOT_GUARD_DELTA");
  cmd->add_option("--out", cfg.out, "output file")->required()->envname("PROJOT_OUT");
}

std::string csv_header(const pj::RunConfig& cfg) {
  std::string s = "# projot-csv format_version=";
  s += kFormatVersion;
  s += " seed=" + std::to_string(cfg.seed) + " lines=" + std::to_string(cfg.lines) +
       " time_nodes=" + std::to_string(cfg.time_nodes) + " knots=" + std::to_string(cfg.knots) +
       " q=" + pj::fmt17(cfg.q) + " epsilon=" + pj::fmt17(cfg.epsilon) +
       " threads=" + std::to_string(cfg.threads) + "\n";
  return s;
}

std::string companion_csv_path(const std::string& out) {
  auto dot = out.rfind('.');
  if (dot == std::string::npos || out.substr(dot) == ".csv") return out + ".csv";
  return out.substr(0, dot) + ".csv";
}

pj::AtomicMeasure load_measure_or_poly(const std::string& path, const pj::RunConfig& cfg,
                                       bool* was_poly = nullptr) {
  nlohmann::json j = pj::load_json_file(path);
  if (j.contains("atoms")) {
    if (was_poly) *was_poly = false;
    return pj::measure_from_json(j);
  }
  if (j.contains("coeffs")) {
    if (was_poly) *was_poly = true;
    pj::HomPoly p = pj::poly_from_json(j);
    pj::Rng rng(cfg.seed);
    return pj::mu(p, cfg.lines, rng, cfg.cluster_radius, cfg.threads);
  }
  throw pj::InvalidInput(path + " is neither a measure nor a polynomial file");
}

int cmd_mu(const std::string& in, const pj::RunConfig& cfg) {
  pj::HomPoly p = pj::poly_from_json(pj::load_json_file(in));
  pj::Rng rng(cfg.seed);
  pj::AtomicMeasure m = pj::mu(p, cfg.lines, rng, cfg.cluster_radius, cfg.threads);

  // Monte Carlo diagnostic: per-line contribution variance of the coordinate
  // moments f_j = |z_j|^2 / |z|^2, reported as a standard error per moment.
  std::vector<double> moment_stderr;
  if (p.n() >= 2) {
    std::map<int, std::vector<double>> per_line;
    for (auto& a : m.atoms) {
      auto& acc = per_line[a.line];
      if (acc.empty()) acc.assign(p.vars(), 0.0);
      for (int j = 0; j < p.vars(); ++j)
        acc[j] += std::norm(a.point.rep()(j)) / static_cast<double>(p.d());
    }
    const double L = static_cast<double>(per_line.size());
    moment_stderr.assign(p.vars(), 0.0);
    std::vector<double> mean(p.vars(), 0.0);
    for (auto& [line, acc] : per_line)
      for (int j = 0; j < p.vars(); ++j) mean[j] += acc[j] / L;
    for (auto& [line, acc] : per_line)
      for (int j = 0; j < p.vars(); ++j)
        moment_stderr[j] += (acc[j] - mean[j]) * (acc[j] - mean[j]);
    for (int j = 0; j < p.vars(); ++j)
      moment_stderr[j] = L > 1 ? std::sqrt(moment_stderr[j] / (L * (L - 1))) : 0.0;
  }

  pj::JsonWriter w;
  w.begin_object();
  w.key("format_version").string(kFormatVersion);
  cfg.write_fields(w);
  pj::write_measure_fields(w, m);
  if (!moment_stderr.empty()) {
    w.key("moment_stderr").begin_array();
    for (double s : moment_stderr) w.number(s);
    w.end_array();
  }
  w.end_object();
  pj::write_text_file(cfg.out, w.str() + "\n");
  return 0;
}

int cmd_dist(const std::string& a, const std::string& b, bool with_matching,
             const pj::RunConfig& cfg) {
  pj::AtomicMeasure ma = load_measure_or_poly(a, cfg);
  pj::AtomicMeasure mb = load_measure_or_poly(b, cfg);
  bool auto_routed = false;
  pj::TransportResult tr;
  try {
    tr = pj::wq_assignment(ma, mb, cfg.q);
  } catch (const pj::SizeMismatch&) {
    auto_routed = true;
    tr = pj::wq_lp(ma, mb, cfg.q);
  }
  pj::JsonWriter w;
  w.begin_object();
  w.key("format_version").string(kFormatVersion);
  cfg.write_fields(w);
  w.key("distance").number(tr.distance);
  w.key("cost").number(tr.matching.cost);
  w.key("method").string(tr.used_lp ? "lp" : "assignment");
  w.key("auto_routed").boolean(auto_routed);
  if (with_matching) {
    w.key("matching").begin_array();
    for (auto& pr : tr.matching.pairs) {
      w.begin_object();
      w.key("i").integer(pr.i);
      w.key("j").integer(pr.j);
      w.key("mass").number(pr.mass);
      w.end_object();
    }
    w.end_array();
  }
  w.end_object();
  pj::write_text_file(cfg.out, w.str() + "\n");
  return 0;
}

int cmd_geodesic(const std::string& p0f, const std::string& p1f, bool lines_explicit,
                 const pj::RunConfig& cfg) {
  pj::HomPoly p0 = pj::poly_from_json(pj::load_json_file(p0f));
  pj::HomPoly p1 = pj::poly_from_json(pj::load_json_file(p1f));
  pj::GeodesicConfig gc;
  gc.knots = cfg.knots;
  gc.seed = cfg.seed;
  // the optimizer re-solves the line quadrature inside every gradient
  // component; the measure-sampling default of 2000 lines is far too heavy
  // there, so cap it unless --lines was given explicitly
  gc.quad_lines = lines_explicit ? cfg.lines : std::min(cfg.lines, 300);
  gc.measure_lines = gc.quad_lines;
  gc.guard_delta = cfg.guard_delta;
  pj::GeodesicResult r = pj::optimize(p0, p1, gc);

  pj::JsonWriter w;
  w.begin_object();
  w.key("format_version").string(kFormatVersion);
  cfg.write_fields(w);
  w.key("energy").number(r.energy);
  w.key("w2in_estimate").number(r.w2in_estimate);
  w.key("ambient_w2").number(r.ambient_w2);
  w.key("iterations").integer(r.iterations);
  w.key("energy_trace").begin_array();
  for (double e : r.energy_trace) w.number(e);
  w.end_array();
  pj::write_path_fields(w, r.path);
  w.end_object();
  pj::write_text_file(cfg.out, w.str() + "\n");

  std::string csv = csv_header(cfg) + "t,speed\n";
  for (std::size_t i = 0; i < r.node_speeds.size(); ++i)
    csv += pj::fmt17(r.path.times[i]) + "," + pj::fmt17(r.node_speeds[i]) + "\n";
  pj::write_text_file(companion_csv_path(cfg.out), csv);
  return 0;
}

int cmd_energy(const std::string& pathf, const pj::RunConfig& cfg) {
  pj::PolyPath path = pj::path_from_json(pj::load_json_file(pathf));
  pj::QuadratureSpec quad = path.n() == 1
                                ? pj::QuadratureSpec::exact()
                                : pj::QuadratureSpec::monte_carlo(cfg.lines, cfg.seed);
  quad.cluster_radius = cfg.cluster_radius;
  pj::PathEnergy pe = pj::path_energy(path, quad);

  pj::JsonWriter w;
  w.begin_object();
  w.key("format_version").string(kFormatVersion);
  cfg.write_fields(w);
  w.key("energy").number(pe.energy);
  w.key("richardson").number(pe.richardson);
  w.key("node_speed_sq").begin_array();
  for (double s : pe.node_speed_sq) w.number(s);
  w.end_array();
  w.end_object();
  pj::write_text_file(cfg.out, w.str() + "\n");

  std::string csv = csv_header(cfg) + "t,speed_sq\n";
  for (std::size_t i = 0; i < pe.node_speed_sq.size(); ++i)
    csv += pj::fmt17(path.times[i]) + "," + pj::fmt17(pe.node_speed_sq[i]) + "\n";
  pj::write_text_file(companion_csv_path(cfg.out), csv);
  return 0;
}

pj::BinaryHomPoly random_simple_poly(int d, pj::Rng& rng, double min_gap) {
  for (;;) {
    std::vector<pj::Complex> c(d + 1);
    for (auto& x : c) x = rng.cgauss();
    pj::BinaryHomPoly p(std::move(c));
    pj::RootSet rs = pj::all_roots(p);
    if (static_cast<int>(rs.roots.size()) != d) continue;
    double gap = 1e300;
    for (std::size_t i = 0; i < rs.roots.size(); ++i)
      for (std::size_t j = i + 1; j < rs.roots.size(); ++j)
        gap = std::min(gap, pj::fs_distance(rs.roots[i].first, rs.roots[j].first));
    if (gap >= min_gap) return p.bw_normalized();
  }
}

void write_p14_fields(pj::JsonWriter& w, const pj::P14Report& rep) {
  w.key("alpha4_quasiconcave").boolean(rep.alpha4_quasiconcave);
  w.key("alpha2_quasiconcave").boolean(rep.alpha2_quasiconcave);
  w.key("interior_off_discriminant").boolean(rep.interior_off_discriminant);
  w.key("min_dist_delta").number(rep.min_dist_delta);
  w.key("l_cond").number(rep.l_cond);
  w.key("l_v").number(rep.l_v);
  w.key("nu_end_max").number(rep.nu_end_max);
  w.key("t").begin_array();
  for (double v : rep.t) w.number(v);
  w.end_array();
  w.key("alpha4").begin_array();
  for (double v : rep.alpha4_profile) w.number(v);
  w.end_array();
  w.key("alpha2").begin_array();
  for (double v : rep.alpha2_profile) w.number(v);
  w.end_array();
  w.key("nu").begin_array();
  for (double v : rep.nu_profile) w.number(v);
  w.end_array();
  w.key("dist_delta").begin_array();
  for (double v : rep.dist_delta_profile) w.number(v);
  w.end_array();
}

int cmd_condition(const std::string& p0f, const std::string& p1f, int batch, int degree, int grid,
                  const pj::RunConfig& cfg) {
  pj::JsonWriter w;
  w.begin_object();
  w.key("format_version").string(kFormatVersion);
  cfg.write_fields(w);
  std::string csv = csv_header(cfg) + "instance,t,alpha4,alpha2,nu,dist_delta\n";
  if (batch <= 0) {
    pj::BinaryHomPoly p0 = pj::BinaryHomPoly::from_hompoly(pj::poly_from_json(pj::load_json_file(p0f)));
    pj::BinaryHomPoly p1 = pj::BinaryHomPoly::from_hompoly(pj::poly_from_json(pj::load_json_file(p1f)));
    pj::P14Report rep = pj::p14_experiment(p0, p1, grid);
    write_p14_fields(w, rep);
    for (std::size_t i = 0; i < rep.t.size(); ++i)
      csv += "0," + pj::fmt17(rep.t[i]) + "," + pj::fmt17(rep.alpha4_profile[i]) + "," +
             pj::fmt17(rep.alpha2_profile[i]) + "," + pj::fmt17(rep.nu_profile[i]) + "," +
             pj::fmt17(rep.dist_delta_profile[i]) + "\n";
  } else {
    pj::Rng rng(cfg.seed);
    std::vector<pj::P14Report> reports;
    int violations = 0;
    for (int b = 0; b < batch; ++b) {
      pj::BinaryHomPoly p0 = random_simple_poly(degree, rng, 0.05);
      pj::BinaryHomPoly p1 = random_simple_poly(degree, rng, 0.05);
      pj::P14Report rep = pj::p14_experiment(p0, p1, grid);
      if (!rep.alpha4_quasiconcave || !rep.alpha2_quasiconcave || !rep.interior_off_discriminant)
        ++violations;
      for (std::size_t i = 0; i < rep.t.size(); ++i)
        csv += std::to_string(b) + "," + pj::fmt17(rep.t[i]) + "," +
               pj::fmt17(rep.alpha4_profile[i]) + "," + pj::fmt17(rep.alpha2_profile[i]) + "," +
               pj::fmt17(rep.nu_profile[i]) + "," + pj::fmt17(rep.dist_delta_profile[i]) + "\n";
      reports.push_back(std::move(rep));
    }
    pj::BetaFit fit = pj::fit_betas(reports);
    w.key("batch").integer(batch);
    w.key("degree").integer(degree);
    w.key("violations").integer(violations);
    w.key("beta3_hat").number(fit.beta3);
    w.key("beta4_hat").number(fit.beta4);
    w.key("beta4_conjectured").number(1.0);
    w.key("instances").begin_array();
    for (auto& rep : reports) {
      w.begin_object();
      write_p14_fields(w, rep);
      w.end_object();
    }
    w.end_array();
  }
  w.end_object();
  pj::write_text_file(cfg.out, w.str() + "\n");
  pj::write_text_file(companion_csv_path(cfg.out), csv);
  return 0;
}

int cmd_regularity(const std::string& pathf, int probe_degree, const std::string& q_csv,
                   const std::string& eps_csv, const pj::RunConfig& cfg) {
  auto split_doubles = [](const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) out.push_back(std::stod(tok));
    }
    return out;
  };
  pj::JsonWriter w;
  w.begin_object();
  w.key("format_version").string(kFormatVersion);
  cfg.write_fields(w);
  std::string csv = csv_header(cfg);
  if (probe_degree > 0) {
    std::vector<double> qs = split_doubles(q_csv.empty() ? "1.2,1.8" : q_csv);
    std::vector<double> eps = split_doubles(eps_csv);
    int nodes_per_decade = std::max(8, cfg.time_nodes / 2);
    pj::ExponentProbe probe = pj::exponent_probe(probe_degree, qs, eps, nodes_per_decade);
    w.key("d").integer(probe.d);
    w.key("entries").begin_array();
    csv += "q,epsilon,energy\n";
    for (auto& e : probe.entries) {
      w.begin_object();
      w.key("q").number(e.q);
      w.key("fitted_slope").number(e.fitted_slope);
      w.key("predicted_slope").number(e.predicted_slope);
      w.key("convergent_predicted").boolean(e.convergent_predicted);
      w.key("pass").boolean(e.pass);
      w.end_object();
      for (std::size_t i = 0; i < e.epsilons.size(); ++i)
        csv += pj::fmt17(e.q) + "," + pj::fmt17(e.epsilons[i]) + "," + pj::fmt17(e.energies[i]) + "\n";
    }
    w.end_array();
  } else {
    pj::PolyPath path = pj::path_from_json(pj::load_json_file(pathf));
    pj::SpeedProfile sp =
        pj::metric_speed_profile(path, cfg.q, 0.25, nullptr, cfg.lines, cfg.seed, cfg.cluster_radius);
    double energy = pj::sobolev_energy_from_profile(sp, cfg.q, cfg.epsilon);
    w.key("q").number(cfg.q);
    w.key("epsilon").number(cfg.epsilon);
    w.key("sobolev_energy").number(energy);
    w.key("degenerate_skipped").integer(sp.degenerate_skipped);
    w.key("fano_warning").boolean(sp.fano_warning);
    if (sp.fano_warning)
      std::cerr << "warning: d <= 2n-3, lines on Z(p) are possible and the per-line bound is "
                   "unverified in that regime\n";
    csv += "t,speed\n";
    for (std::size_t i = 0; i < sp.times.size(); ++i)
      csv += pj::fmt17(sp.times[i]) + "," + pj::fmt17(sp.speed[i]) + "\n";
  }
  w.end_object();
  pj::write_text_file(cfg.out, w.str() + "\n");
  pj::write_text_file(companion_csv_path(cfg.out), csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimal-transport geometry of projective hypersurfaces"};
  app.require_subcommand(1);

  pj::RunConfig cfg;
  std::string in_a, in_b, in_path;
  bool with_matching = false;
  int batch = 0, degree = 3, grid = 33, probe_degree = 0;
  std::string q_csv, eps_csv;

  auto* c_mu = app.add_subcommand("mu", "measure of a polynomial (exact n=1, line-sampled n>=2)");
  c_mu->add_option("--in", in_a, "polynomial JSON")->required();
  add_common(c_mu, cfg);

  auto* c_dist = app.add_subcommand("dist", "q-Wasserstein distance between measures or polynomials");
  c_dist->add_option("--a", in_a, "first input")->required();
  c_dist->add_option("--b", in_b, "second input")->required();
  c_dist->add_flag("--matching", with_matching, "include the transport plan");
  add_common(c_dist, cfg);

  auto* c_geo = app.add_subcommand("geodesic", "inner-Wasserstein geodesic approximation");
  c_geo->add_option("--p0", in_a, "endpoint polynomial JSON")->required();
  c_geo->add_option("--p1", in_b, "endpoint polynomial JSON")->required();
  add_common(c_geo, cfg);

  auto* c_en = app.add_subcommand("energy", "path energy of a polynomial curve");
  c_en->add_option("--path", in_path, "path JSON")->required();
  add_common(c_en, cfg);

  auto* c_cond = app.add_subcommand("condition", "condition-number experiments along W2 geodesics");
  c_cond->add_option("--p0", in_a, "endpoint polynomial JSON");
  c_cond->add_option("--p1", in_b, "endpoint polynomial JSON");
  c_cond->add_option("--batch", batch, "random-instance batch size (0: use --p0/--p1)");
  c_cond->add_option("--degree", degree, "degree for batch instances");
  c_cond->add_option("--grid", grid, "time grid nodes");
  add_common(c_cond, cfg);

  auto* c_reg = app.add_subcommand("regularity", "metric-speed profiles and the sharpness probe");
  c_reg->add_option("--path", in_path, "path JSON (speed-profile mode)");
  c_reg->add_option("--probe-degree", probe_degree, "run the z1^d - t z0^d probe at this degree");
  c_reg->add_option("--q-list", q_csv, "comma-separated q values for the probe");
  c_reg->add_option("--epsilons", eps_csv, "comma-separated tail epsilons for the probe");
  add_common(c_reg, cfg);

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_mu->parsed()) return cmd_mu(in_a, cfg);
    if (c_dist->parsed()) return cmd_dist(in_a, in_b, with_matching, cfg);
    if (c_geo->parsed()) return cmd_geodesic(in_a, in_b, c_geo->count("--lines") > 0, cfg);
    if (c_en->parsed()) return cmd_energy(in_path, cfg);
    if (c_cond->parsed()) {
      if (batch <= 0 && (in_a.empty() || in_b.empty()))
        throw pj::InvalidInput("condition needs --p0/--p1 or --batch");
      return cmd_condition(in_a, in_b, batch, degree, grid, cfg);
    }
    if (c_reg->parsed()) {
      if (probe_degree <= 0 && in_path.empty())
        throw pj::InvalidInput("regularity needs --path or --probe-degree");
      return cmd_regularity(in_path, probe_degree, q_csv, eps_csv, cfg);
    }
  } catch (const pj::Error& e) {
    std::cerr << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
