#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>

#include "projot/hermitian.hpp"

#include <nlohmann/json.hpp>

namespace projot {

/// 17 significant digits: enough to round-trip any double, identical on
/// every run.
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

/// Minimal JSON writer with explicit number formatting; parsing is done with
/// nlohmann::json, writing stays byte-deterministic under our control.
class JsonWriter {
public:
  JsonWriter& begin_object() {
    comma();
    out_ += '{';
    stack_.push_back(false);
    return *this;
  }
  JsonWriter& end_object() {
    out_ += '}';
    stack_.pop_back();
    mark();
    return *this;
  }
  JsonWriter& begin_array() {
    comma();
    out_ += '[';
    stack_.push_back(false);
    return *this;
  }
  JsonWriter& end_array() {
    out_ += ']';
    stack_.pop_back();
    mark();
    return *this;
  }
  JsonWriter& key(const std::string& k) {
    comma();
    out_ += '"' + escape(k) + "\":";
    pending_value_ = true;
    return *this;
  }
  JsonWriter& number(double v) {
    comma();
    out_ += fmt17(v);
    mark();
    return *this;
  }
  JsonWriter& integer(long long v) {
    comma();
    out_ += std::to_string(v);
    mark();
    return *this;
  }
  JsonWriter& unsigned_integer(unsigned long long v) {
    comma();
    out_ += std::to_string(v);
    mark();
    return *this;
  }
  JsonWriter& string(const std::string& s) {
    comma();
    out_ += '"' + escape(s) + '"';
    mark();
    return *this;
  }
  JsonWriter& boolean(bool b) {
    comma();
    out_ += b ? "true" : "false";
    mark();
    return *this;
  }
  JsonWriter& null() {
    comma();
    out_ += "null";
    mark();
    return *this;
  }
  const std::string& str() const { return out_; }

private:
  void comma() {
    if (pending_value_) {
      pending_value_ = false;
      return;
    }
    if (!stack_.empty() && stack_.back()) out_ += ',';
  }
  void mark() {
    if (!stack_.empty()) stack_.back() = true;
  }
  static std::string escape(const std::string& s) {
    std::string o;
    for (char c : s) {
      if (c == '"' || c == '\\') {
        o += '\\';
        o += c;
      } else if (c == '\n') {
        o += "\\n";
      } else {
        o += c;
      }
    }
    return o;
  }
  std::string out_;
  std::vector<bool> stack_;
  bool pending_value_ = false;
};

// ---------------------------------------------------------------------------
// Polynomial JSON: {"n": int, "d": int, "coeffs": [{"alpha": [...],
// "re": f, "im": f}]}, coefficients in graded-lex order.
// ---------------------------------------------------------------------------

inline void write_poly_fields(JsonWriter& w, const HomPoly& p) {
  w.key("n").integer(p.n());
  w.key("d").integer(p.d());
  w.key("coeffs").begin_array();
  for (auto& [a, c] : p.coeffs()) {  // std::map: already graded-lex
    w.begin_object();
    w.key("alpha").begin_array();
    for (int e : a) w.integer(e);
    w.end_array();
    w.key("re").number(c.real());
    w.key("im").number(c.imag());
    w.end_object();
  }
  w.end_array();
}

inline std::string poly_to_json(const HomPoly& p) {
  JsonWriter w;
  w.begin_object();
  write_poly_fields(w, p);
  w.end_object();
  return w.str();
}

inline HomPoly poly_from_json(const nlohmann::json& j) {
  if (!j.contains("n") || !j.contains("d") || !j.contains("coeffs"))
    throw InvalidInput("polynomial JSON needs n, d, coeffs");
  HomPoly p(j["n"].get<int>(), j["d"].get<int>());
  for (auto& e : j["coeffs"]) {
    MultiIndex a = e["alpha"].get<std::vector<int>>();
    p.set(a, Complex(e["re"].get<double>(), e["im"].get<double>()));
  }
  return p;
}

// ---------------------------------------------------------------------------
// Measure JSON: {"atoms": [{"point": [re, im, ...], "weight": f,
// "line": int|null}]}
// ---------------------------------------------------------------------------

inline void write_measure_fields(JsonWriter& w, const AtomicMeasure& m) {
  w.key("atoms").begin_array();
  for (auto& a : m.atoms) {
    w.begin_object();
    w.key("point").begin_array();
    for (int i = 0; i < a.point.rep().size(); ++i) {
      w.number(a.point.rep()(i).real());
      w.number(a.point.rep()(i).imag());
    }
    w.end_array();
    w.key("weight").number(a.weight);
    w.key("line");
    if (a.line < 0)
      w.null();
    else
      w.integer(a.line);
    w.end_object();
  }
  w.end_array();
  w.key("degenerate_lines").integer(m.degenerate_lines);
}

inline AtomicMeasure measure_from_json(const nlohmann::json& j) {
  if (!j.contains("atoms")) throw InvalidInput("measure JSON needs atoms");
  AtomicMeasure m;
  for (auto& e : j["atoms"]) {
    auto pt = e["point"].get<std::vector<double>>();
    if (pt.size() % 2 != 0 || pt.size() < 4) throw InvalidInput("bad point coordinates");
    CVector v(static_cast<int>(pt.size() / 2));
    for (int i = 0; i < v.size(); ++i) v(i) = Complex(pt[2 * i], pt[2 * i + 1]);
    int line = e.contains("line") && !e["line"].is_null() ? e["line"].get<int>() : -1;
    m.atoms.push_back({ProjPoint(std::move(v)), e["weight"].get<double>(), line});
  }
  if (j.contains("degenerate_lines")) m.degenerate_lines = j["degenerate_lines"].get<int>();
  m.normalize_and_sort();
  return m;
}

// ---------------------------------------------------------------------------
// Path JSON: {"times": [...], "knots": [polynomial JSON, ...]}
// ---------------------------------------------------------------------------

inline void write_path_fields(JsonWriter& w, const PolyPath& path) {
  w.key("times").begin_array();
  for (double t : path.times) w.number(t);
  w.end_array();
  w.key("knots").begin_array();
  for (auto& k : path.knots) {
    w.begin_object();
    write_poly_fields(w, k);
    w.end_object();
  }
  w.end_array();
}

inline PolyPath path_from_json(const nlohmann::json& j) {
  if (!j.contains("times") || !j.contains("knots")) throw InvalidInput("path JSON needs times, knots");
  std::vector<double> times = j["times"].get<std::vector<double>>();
  std::vector<HomPoly> knots;
  for (auto& e : j["knots"]) knots.push_back(poly_from_json(e));
  return PolyPath(std::move(knots), std::move(times));
}

// ---------------------------------------------------------------------------
// Run configuration, embedded verbatim into every CLI output.
// ---------------------------------------------------------------------------

struct RunConfig {
  std::uint64_t seed = 1;
  int lines = 2000;
  int time_nodes = 64;
  int knots = 17;
  double q = 2.0;
  double epsilon = 1e-7;
  int threads = 1;
  double cluster_radius = -1.0;  // negative: the 1e-6 * d default
  double guard_delta = 1e-4;
  double eq_tol = kProjEqTol;
  std::string out;

  void write_fields(JsonWriter& w) const {
    w.key("config").begin_object();
    w.key("seed").unsigned_integer(seed);
    w.key("lines").integer(lines);
    w.key("time_nodes").integer(time_nodes);
    w.key("knots").integer(knots);
    w.key("q").number(q);
    w.key("epsilon").number(epsilon);
    w.key("threads").integer(threads);
    w.key("cluster_radius").number(cluster_radius);
    w.key("guard_delta").number(guard_delta);
    w.key("eq_tol").number(eq_tol);
    w.key("out").string(out);
    w.end_object();
  }
};

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw InvalidInput("bad JSON in " + path + ": " + e.what());
  }
  return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out << content;
}

}  // namespace projot
