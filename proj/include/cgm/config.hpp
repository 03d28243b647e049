#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <locale>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cgm/error.hpp"
#include "cgm/measures.hpp"
#include "cgm/params.hpp"
#include "cgm/shape.hpp"

namespace cgm {

using Json = nlohmann::ordered_json;

// Numbers may be given as JSON numbers or as decimal strings; strings are
// parsed with the classic locale so output never drifts with the host.
inline double json_real(const Json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "Infinity") return kInf;
    std::istringstream is(s);
    is.imbue(std::locale::classic());
    double v = 0.0;
    is >> v;
    if (is.fail() || !is.eof()) throw ConfigError(what + ": not a decimal number: '" + s + "'");
    return v;
  }
  throw ConfigError(what + ": expected a number");
}

inline std::size_t json_index(const Json& j, const std::string& what) {
  const double v = json_real(j, what);
  if (!(v >= 0.0) || v != std::floor(v) || v > 9.0e15) throw ConfigError(what + ": expected a nonnegative integer");
  return static_cast<std::size_t>(v);
}

inline std::vector<double> json_reals(const Json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + ": expected an array");
  std::vector<double> v;
  for (const auto& x : j) v.push_back(json_real(x, what));
  return v;
}

inline std::string fmt(double x) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << x;
  return os.str();
}

// A family declaration:
//   {"kind": "constant", "value": v}
//   {"kind": "row_constant", "values": [...], "defects": [[i, v], ...], "base": v}
//   {"kind": "block_constant", "values": [...], "block": n}
//   {"kind": "triangular", "regimes": [{"m_lo", "m_hi", "base", "defects"| "values"}]}
//   {"kind": "macro_profile", "profile": [[u, f], ...]}
inline ParamFamily family_from_json(const Json& j, std::size_t cap, const std::string& what) {
  if (!j.is_object() || !j.contains("kind")) throw ConfigError(what + ": family needs a 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  auto defects_of = [&](const Json& o) {
    std::vector<std::pair<std::size_t, double>> d;
    if (o.contains("defects")) {
      for (const auto& p : o.at("defects")) {
        if (!p.is_array() || p.size() != 2) throw ConfigError(what + ": defects are [index, value] pairs");
        d.emplace_back(json_index(p[0], what), json_real(p[1], what));
      }
    }
    return d;
  };
  auto row_of = [&](const Json& o, std::size_t len) {
    std::vector<double> v;
    if (o.contains("values")) {
      v = json_reals(o.at("values"), what);
    } else if (o.contains("base") || o.contains("value")) {
      v.assign(len, json_real(o.contains("base") ? o.at("base") : o.at("value"), what));
    } else {
      throw ConfigError(what + ": need 'values' or 'base'");
    }
    for (auto [i, x] : defects_of(o)) {
      if (i >= 1 && i <= v.size()) v[i - 1] = x;
    }
    return v;
  };
  if (kind == "constant" || kind == "row_constant") return ParamFamily::row_constant(row_of(j, cap), cap);
  if (kind == "block_constant") {
    if (!j.contains("block")) throw ConfigError(what + ": block_constant needs 'block'");
    return ParamFamily::block_constant(json_reals(j.at("values"), what), json_index(j.at("block"), what), cap);
  }
  if (kind == "triangular") {
    std::vector<Triangular::Regime> regs;
    for (const auto& r : j.at("regimes")) {
      const std::size_t lo = json_index(r.at("m_lo"), what);
      if (lo > cap) continue;  // regime starts past the grid
      const std::size_t hi = r.contains("m_hi") ? std::min(json_index(r.at("m_hi"), what), cap) : cap;
      regs.push_back({lo, hi, row_of(r, hi)});
    }
    return ParamFamily::triangular(std::move(regs), cap);
  }
  if (kind == "macro_profile") {
    std::vector<std::pair<double, double>> bp;
    for (const auto& p : j.at("profile")) bp.emplace_back(json_real(p.at(0), what), json_real(p.at(1), what));
    return ParamFamily::macro_profile(std::move(bp), cap);
  }
  throw ConfigError(what + ": unknown family kind '" + kind + "'");
}

inline Measure1D measure_from_json(const Json& j, const std::string& what) {
  std::vector<Atom> atoms;
  std::vector<UniformPiece> pieces;
  if (j.contains("atoms")) {
    for (const auto& a : j.at("atoms")) atoms.push_back({json_real(a.at(0), what), json_real(a.at(1), what)});
  }
  if (j.contains("pieces")) {
    for (const auto& p : j.at("pieces")) {
      pieces.push_back({json_real(p.at(0), what), json_real(p.at(1), what), json_real(p.at(2), what)});
    }
  }
  return Measure1D(std::move(atoms), std::move(pieces));
}

inline Json measure_to_json(const Measure1D& m) {
  Json j;
  j["atoms"] = Json::array();
  for (const auto& a : m.atoms()) j["atoms"].push_back({fmt(a.loc), fmt(a.mass)});
  j["pieces"] = Json::array();
  for (const auto& p : m.pieces()) j["pieces"].push_back({fmt(p.left), fmt(p.right), fmt(p.mass)});
  return j;
}

inline ShapeSpec spec_from_json(const Json& j) {
  const std::string w = "spec";
  TransformPair tp(measure_from_json(j.at("alpha"), w), measure_from_json(j.at("beta"), w),
                   json_real(j.at("frak_a"), w), json_real(j.at("frak_b"), w));
  const double A = j.contains("frakA") ? json_real(j.at("frakA"), w) : tp.mfa;
  const double B = j.contains("frakB") ? json_real(j.at("frakB"), w) : tp.mfb;
  return ShapeSpec(std::move(tp), A, B);
}

inline Json spec_to_json(const ShapeSpec& s) {
  Json j;
  j["alpha"] = measure_to_json(s.tp.alpha);
  j["beta"] = measure_to_json(s.tp.beta);
  j["frak_a"] = fmt(s.tp.mfa);
  j["frak_b"] = fmt(s.tp.mfb);
  j["frakA"] = fmt(s.frakA);
  j["frakB"] = fmt(s.frakB);
  return j;
}

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {
      "simulate",    "shape",       "centering",         "tasep",           "verify-burke", "verify-permutation",
      "verify-tails", "verify-exit", "verify-limitshape", "verify-expsum", "rains"};
  return names;
}

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"rost", "fig1b", "fig1c", "fig1d", "rains-squares"};
  return names;
}

struct RunConfig {
  std::string command;
  std::optional<std::string> preset;
  Json a;  // family declarations
  Json b;
  std::optional<Json> spec;
  std::size_t m = 0;  // grid extent; N x N when only N is given
  std::size_t n = 0;
  double t = 0.0;
  std::uint64_t seed = 1;
  std::size_t replicas = 0;
  int threads = 0;
  std::string out = "out";
  Json options = Json::object();  // command-specific knobs

  // Everything that determines the artifacts; excludes threads and out.
  Json canonical() const {
    Json j;
    j["command"] = command;
    j["preset"] = preset ? Json(*preset) : Json(nullptr);
    j["a"] = a;
    j["b"] = b;
    j["spec"] = spec ? *spec : Json(nullptr);
    j["m"] = m;
    j["n"] = n;
    j["t"] = fmt(t);
    j["seed"] = std::to_string(seed);
    j["replicas"] = replicas;
    j["options"] = options;
    return j;
  }
};

namespace detail {

inline Json constant_family(double v) { return Json{{"kind", "constant"}, {"value", fmt(v)}}; }

inline Json atom_spec(double frak_a, double frak_b, double frakA, double frakB) {
  Json d = Json{{"atoms", Json::array({Json::array({"0.5", "1"})})}};
  return Json{{"alpha", d}, {"beta", d}, {"frak_a", fmt(frak_a)}, {"frak_b", fmt(frak_b)},
              {"frakA", fmt(frakA)}, {"frakB", fmt(frakB)}};
}

}  // namespace detail

// Fills the fields a preset defines. Explicit fields applied afterwards win.
inline void apply_preset(RunConfig& c, const std::string& name) {
  c.preset = name;
  c.b = detail::constant_family(0.5);
  c.m = c.n = 4000;
  c.t = 1000.0;
  if (name == "rost") {
    c.a = detail::constant_family(0.5);
    c.spec = detail::atom_spec(0.5, 0.5, 0.5, 0.5);
  } else if (name == "fig1b") {
    c.a = Json{{"kind", "row_constant"}, {"base", "0.5"}, {"defects", Json::array({Json::array({100, "0"})})}};
    c.spec = detail::atom_spec(0.0, 0.5, 0.5, 0.5);
  } else if (name == "fig1c") {
    c.a = Json{{"kind", "row_constant"},
               {"base", "0.5"},
               {"defects", Json::array({Json::array({50, "0.25"}), Json::array({100, "0"})})}};
    c.spec = detail::atom_spec(0.0, 0.5, 0.5, 0.5);
  } else if (name == "fig1d") {
    c.a = Json{{"kind", "triangular"},
               {"regimes", Json::array({Json{{"m_lo", 1}, {"m_hi", 99}, {"base", "0.5"},
                                             {"defects", Json::array({Json::array({50, "-0.25"})})}},
                                        Json{{"m_lo", 100}, {"base", "0.5"},
                                             {"defects", Json::array({Json::array({100, "0"})})}}})}};
    c.spec = detail::atom_spec(0.0, 0.5, 0.5, 0.5);
  } else if (name == "rains-squares") {
    c.command = c.command.empty() ? "rains" : c.command;
    c.a = Json::object();
    c.b = Json::object();
    c.spec.reset();
    c.options["block"] = 100;
    c.options["K"] = 20;
    c.options["series"] = "squares";
    c.m = c.n = 0;
    c.t = 0.0;
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
}

// Parses a config object (the same layout a preset produces). `preset`
// inside the object is expanded first, then every other key overrides.
inline RunConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  RunConfig c;
  if (j.contains("command")) c.command = j.at("command").get<std::string>();
  if (j.contains("preset") && !j.at("preset").is_null()) apply_preset(c, j.at("preset").get<std::string>());
  if (j.contains("a")) c.a = j.at("a");
  if (j.contains("b")) c.b = j.at("b");
  if (j.contains("spec")) c.spec = j.at("spec").is_null() ? std::optional<Json>{} : std::optional<Json>{j.at("spec")};
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    if (g.contains("N")) c.m = c.n = json_index(g.at("N"), "grid.N");
    if (g.contains("m")) c.m = json_index(g.at("m"), "grid.m");
    if (g.contains("n")) c.n = json_index(g.at("n"), "grid.n");
  }
  if (j.contains("t")) c.t = json_real(j.at("t"), "t");
  if (j.contains("seed")) {
    const auto& s = j.at("seed");
    c.seed = s.is_string() ? std::stoull(s.get<std::string>()) : s.get<std::uint64_t>();
  }
  if (j.contains("replicas")) c.replicas = json_index(j.at("replicas"), "replicas");
  if (j.contains("threads")) c.threads = static_cast<int>(json_index(j.at("threads"), "threads"));
  if (j.contains("out")) c.out = j.at("out").get<std::string>();
  if (j.contains("options")) {
    for (const auto& [k, v] : j.at("options").items()) c.options[k] = v;
  }
  return c;
}

inline RunConfig config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return config_from_json(j);
}

inline ParamPair params_of(const RunConfig& c, std::size_t cap_a, std::size_t cap_b) {
  if (c.a.is_null() || c.a.empty() || c.b.is_null() || c.b.empty()) {
    throw ConfigError("config: parameter families 'a' and 'b' are required");
  }
  return ParamPair(family_from_json(c.a, cap_a, "a"), family_from_json(c.b, cap_b, "b"));
}

// The configured spec, or the one read off the families at extent (m, n):
// empirical measures of rows m and n, frak_a = min a_m, frak_A = sup of the
// running minima over m <= cap.
inline ShapeSpec spec_of(const RunConfig& c, const ParamPair& pp, std::size_t m, std::size_t n) {
  if (c.spec) return spec_from_json(*c.spec);
  TransformPair tp(empirical_measure(pp.a(), m), empirical_measure(pp.b(), n), pp.a().row_min(m),
                   pp.b().row_min(n));
  return ShapeSpec(std::move(tp), pp.a().sup_row_min(), pp.b().sup_row_min());
}

}  // namespace cgm
