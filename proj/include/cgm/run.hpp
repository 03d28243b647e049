#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "cgm/centering.hpp"
#include "cgm/config.hpp"
#include "cgm/error.hpp"
#include "cgm/lpp.hpp"
#include "cgm/params.hpp"
#include "cgm/rng.hpp"
#include "cgm/shape.hpp"
#include "cgm/tasep.hpp"
#include "cgm/verify.hpp"

namespace cgm {

// Process exit statuses.
enum ExitStatus : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitConfig = 3,
  kExitInvalidParameters = 4,
  kExitDomain = 5,
  kExitResource = 6,
  kExitNumerical = 7,
  kExitData = 8,
  kExitCheckFailed = 9,
};

inline int exit_status_for(const Error& e) {
  const std::string& c = e.code();
  if (c == "config") return kExitConfig;
  if (c == "invalid_parameters") return kExitInvalidParameters;
  if (c == "domain" || c == "range") return kExitDomain;
  if (c == "resource" || c == "insufficient_extent") return kExitResource;
  if (c == "numerical" || c == "divergence") return kExitNumerical;
  if (c == "validation" || c == "data") return kExitData;
  return kExitInternal;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

inline std::uint64_t fnv1a(const std::string& bytes) {
  Fnv1a h;
  h.add_bytes(bytes.data(), bytes.size());
  return h.value();
}

// Writes artifacts into the output directory and records their checksums.
class ArtifactSink {
 public:
  explicit ArtifactSink(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw ResourceError("cannot create output directory '" + dir_.string() + "': " + ec.message());
  }

  void write(const std::string& name, const std::string& bytes) {
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw ResourceError("cannot write '" + (dir_ / name).string() + "'");
    f << bytes;
    entries_.push_back({{"file", name}, {"bytes", bytes.size()}, {"fnv1a64", hex64(fnv1a(bytes))}});
  }

  void grid(const std::string& name, std::uint64_t checksum) { grids_[name] = hex64(checksum); }

  const Json& entries() const noexcept { return entries_; }
  const Json& grids() const noexcept { return grids_; }
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
  Json entries_ = Json::array();
  Json grids_ = Json::object();
};

struct Verdicts {
  Json checks = Json::array();
  bool all = true;

  void add(const std::string& id, double statistic, double threshold, bool pass) {
    checks.push_back({{"check", id}, {"statistic", fmt(statistic)}, {"threshold", fmt(threshold)}, {"pass", pass}});
    all = all && pass;
  }

  std::string dump() const {
    Json j;
    j["checks"] = checks;
    j["pass"] = all;
    return j.dump(2) + "\n";
  }
};

struct RunResult {
  int status = kExitOk;
  Json manifest;
};

namespace detail {

inline std::size_t opt_index(const RunConfig& c, const char* key, std::size_t dflt) {
  return c.options.contains(key) ? json_index(c.options.at(key), key) : dflt;
}

inline double opt_real(const RunConfig& c, const char* key, double dflt) {
  return c.options.contains(key) ? json_real(c.options.at(key), key) : dflt;
}

inline std::vector<double> opt_reals(const RunConfig& c, const char* key, std::vector<double> dflt) {
  return c.options.contains(key) ? json_reals(c.options.at(key), key) : dflt;
}

inline std::vector<std::size_t> opt_indices(const RunConfig& c, const char* key, std::vector<std::size_t> dflt) {
  if (!c.options.contains(key)) return dflt;
  std::vector<std::size_t> v;
  for (const auto& x : c.options.at(key)) v.push_back(json_index(x, key));
  return v;
}

inline void require_grid(const RunConfig& c) {
  if (c.m == 0 || c.n == 0) throw ConfigError(c.command + ": grid extent m x n is required");
}

inline std::string boundary_csv(const BoundaryGeometry& g, double scale) {
  std::ostringstream os;
  os << "kind,x,y,x_scaled,y_scaled\n";
  auto put = [&](const char* kind, const Point& p) {
    os << kind << "," << fmt(p.x) << "," << fmt(p.y) << "," << fmt(scale * p.x) << "," << fmt(scale * p.y) << "\n";
  };
  auto seg = [&](const char* kind, const std::optional<Segment>& s) {
    if (!s) return;
    put(kind, s->from);
    put(kind, s->to);
  };
  seg("flat_v", g.flat_v);
  for (const auto& p : g.curved) put("curved", p);
  seg("flat_h", g.flat_h);
  seg("spike_v", g.spike_v);
  seg("spike_h", g.spike_h);
  return os.str();
}

inline void cmd_simulate(const RunConfig& c, ArtifactSink& out, Verdicts&) {
  require_grid(c);
  const ParamPair pp = params_of(c, c.m, c.n);
  const std::string coupling = c.options.value("coupling", std::string("shared"));
  LppField f;
  if (coupling == "shared") {
    f = lpp_field(pp, c.m, c.n, c.seed, stream_grid_id(kStreamSimulate, 0), c.threads);
  } else if (coupling == "independent") {
    f = lpp_field_independent(pp, c.m, c.n, c.seed);
  } else {
    throw ConfigError("simulate: coupling must be 'shared' or 'independent'");
  }
  out.grid("field", f.checksum());
  const ClusterRaster r = cluster(f, c.t);
  out.write("cluster.pgm", r.pgm());
  out.write("cluster_rle.csv", r.run_length_csv());
  const ShapeSpec s = spec_of(c, pp, c.m, c.n);
  if (!(s.tp.alpha.is_zero() && s.tp.beta.is_zero()) && !(s.tp.mfa == kInf || s.tp.mfb == kInf)) {
    const double C = opt_real(c, "C", 1.1);
    out.write("boundary.csv", boundary_csv(boundary(s, opt_index(c, "samples", 400), C), c.t));
  }
  std::ostringstream st;
  st << "t,cells_in_cluster,touches_edge\n" << fmt(c.t) << "," << r.count() << "," << (r.touches_edge() ? 1 : 0) << "\n";
  out.write("cluster_stats.csv", st.str());
}

inline void cmd_shape(const RunConfig& c, ArtifactSink& out, Verdicts&) {
  ShapeSpec s;
  if (c.spec) {
    s = spec_from_json(*c.spec);
  } else {
    require_grid(c);
    const ParamPair pp = params_of(c, c.m, c.n);
    s = spec_of(c, pp, c.m, c.n);
  }
  const double C = opt_real(c, "C", 1.1);
  out.write("boundary.csv", boundary_csv(boundary(s, opt_index(c, "samples", 400), C), 1.0));
  const std::size_t gx = opt_index(c, "gx", 20);
  const std::size_t gy = opt_index(c, "gy", 20);
  const double xmax = opt_real(c, "xmax", 1.0);
  const double ymax = opt_real(c, "ymax", 1.0);
  std::ostringstream os;
  os << "x,y,gamma,region\n";
  const bool nondeg = !s.degenerate();
  for (std::size_t ky = 1; ky <= gy; ++ky) {
    for (std::size_t kx = 1; kx <= gx; ++kx) {
      const double x = xmax * static_cast<double>(kx) / static_cast<double>(gx);
      const double y = ymax * static_cast<double>(ky) / static_cast<double>(gy);
      os << fmt(x) << "," << fmt(y) << "," << fmt(gamma(s, x, y)) << ","
         << (nondeg ? region_name(classify_region(s, x, y)) : "degenerate") << "\n";
    }
  }
  out.write("gamma_grid.csv", os.str());
}

inline void cmd_centering(const RunConfig& c, ArtifactSink& out, Verdicts&) {
  std::vector<std::pair<std::size_t, std::size_t>> pts;
  if (c.options.contains("points")) {
    for (const auto& p : c.options.at("points")) pts.emplace_back(json_index(p.at(0), "points"), json_index(p.at(1), "points"));
  } else {
    require_grid(c);
    pts.emplace_back(c.m, c.n);
  }
  std::size_t cm = 1;
  std::size_t cn = 1;
  for (auto [m, n] : pts) {
    cm = std::max(cm, m);
    cn = std::max(cn, n);
  }
  const ParamPair pp = params_of(c, cm, cn);
  std::ostringstream os;
  os << "m,n,zeta,M,C,Delta,residual\n";
  for (auto [m, n] : pts) {
    const CenteringResult r = solve_centering(pp, m, n);
    os << m << "," << n << "," << fmt(r.zeta) << "," << fmt(r.M) << "," << fmt(r.C) << "," << fmt(r.Delta) << ","
       << fmt(r.residual) << "\n";
  }
  out.write("centering.csv", os.str());
}

inline void cmd_tasep(const RunConfig& c, ArtifactSink& out, Verdicts&) {
  require_grid(c);
  const ParamPair pp = params_of(c, c.m, c.n);
  const LppField f = lpp_field(pp, c.m, c.n, c.seed, stream_grid_id(kStreamTasep, 0), c.threads);
  out.grid("field", f.checksum());
  const auto times = opt_reals(c, "times", {c.t});
  std::vector<std::size_t> all_n(c.n);
  for (std::size_t k = 0; k < c.n; ++k) all_n[k] = k + 1;
  std::vector<std::size_t> half_m(std::max<std::size_t>(c.m / 2, 1));
  for (std::size_t k = 0; k < half_m.size(); ++k) half_m[k] = k + 1;
  const auto ns = opt_indices(c, "n_values", all_n);
  const auto ms = opt_indices(c, "m_values", half_m);
  std::ostringstream h;
  h << "t,n,H,sigma\n";
  std::ostringstream fl;
  fl << "t,m,F\n";
  for (double t : times) {
    for (auto n : ns) {
      const std::size_t H = height(f, n, t);
      h << fmt(t) << "," << n << "," << H << "," << (static_cast<long long>(H) - static_cast<long long>(n) + 1) << "\n";
    }
    for (auto m : ms) fl << fmt(t) << "," << m << "," << flux(f, m, t) << "\n";
  }
  out.write("tasep_height.csv", h.str());
  out.write("tasep_flux.csv", fl.str());
}

inline void cmd_burke(const RunConfig& c, ArtifactSink& out, Verdicts& v) {
  const std::size_t m = c.m ? c.m : 50;
  const std::size_t n = c.n ? c.n : 50;
  const ParamPair pp = params_of(c, m, n);
  const auto zs = opt_reals(c, "z", {0.0, 0.2});
  const auto rows = opt_indices(c, "rows", {1, m});
  const auto cols = opt_indices(c, "cols", {1, n});
  const std::size_t N = c.replicas ? c.replicas : 10000;
  std::ostringstream os;
  os << "z,kind,index,rate,D,threshold,ks_pass,lag1,lag1_threshold,lag1_pass\n";
  for (double z : zs) {
    const BurkeReport r = burke_check(pp, m, n, z, c.seed, rows, cols, N, std::nullopt, c.threads);
    for (const auto& s : r.streams) {
      os << fmt(z) << "," << s.kind << "," << s.index << "," << fmt(s.rate) << "," << fmt(s.ks.statistic) << ","
         << fmt(s.ks.threshold) << "," << s.ks.pass << "," << fmt(s.lag1) << "," << fmt(s.lag1_threshold) << ","
         << s.lag1_pass << "\n";
      const std::string id = "burke z=" + fmt(z) + " " + s.kind + " " + std::to_string(s.index);
      v.add(id + " ks", s.ks.statistic, s.ks.threshold, s.ks.pass);
      v.add(id + " lag1", std::abs(s.lag1), s.lag1_threshold, s.lag1_pass);
    }
  }
  out.write("burke.csv", os.str());
}

inline void cmd_permutation(const RunConfig& c, ArtifactSink& out, Verdicts& v) {
  require_grid(c);
  const ParamPair pp = params_of(c, c.m, c.n);
  const Json pa = c.options.contains("permuted_a") ? c.options.at("permuted_a") : c.a;
  const Json pb = c.options.contains("permuted_b") ? c.options.at("permuted_b") : c.b;
  const ParamPair qq(family_from_json(pa, c.m, "permuted_a"), family_from_json(pb, c.n, "permuted_b"));
  const std::size_t N = c.replicas ? c.replicas : 20000;
  const bool crn = c.options.value("common_numbers", false);
  const bool unchecked = c.options.value("unchecked", false);
  const TwoSampleReport r = unchecked ? compare_point_laws(pp, qq, c.m, c.n, c.seed, N, crn, c.threads)
                                      : permutation_check(pp, qq, c.m, c.n, c.seed, N, crn, c.threads);
  std::ostringstream os;
  os << "D,threshold,pass,n1,n2,mean1,mean2\n"
     << fmt(r.statistic) << "," << fmt(r.threshold) << "," << r.pass << "," << r.n1 << "," << r.n2 << ","
     << fmt(r.mean1) << "," << fmt(r.mean2) << "\n";
  out.write("permutation.csv", os.str());
  v.add("permutation two-sample ks", r.statistic, r.threshold, r.pass);
}

inline void cmd_tails(const RunConfig& c, ArtifactSink& out, Verdicts& v) {
  require_grid(c);
  const ParamPair pp = params_of(c, c.m, c.n);
  const auto s_grid = opt_reals(c, "s_grid", {0.0, 1.0, 2.0, 3.0});
  const std::string side = c.options.value("side", std::string("right"));
  if (side != "right" && side != "left") throw ConfigError("verify-tails: side must be right or left");
  const TailProfile p = tail_profile(pp, c.m, c.n, s_grid, c.replicas ? c.replicas : 1000,
                                     side == "right" ? TailSide::Right : TailSide::Left, c.seed,
                                     opt_real(c, "shift", 0.0), c.threads);
  std::ostringstream os;
  os << "s,count,freq,wilson_lo,wilson_hi\n";
  for (const auto& r : p.rows) {
    os << fmt(r.s) << "," << r.count << "," << fmt(r.freq) << "," << fmt(r.ci.lo) << "," << fmt(r.ci.hi) << "\n";
  }
  out.write("tails.csv", os.str());
  v.add("tails monotone in s", p.monotone ? 1.0 : 0.0, 1.0, p.monotone);
  if (p.below_half_at_1 && side == "right") v.add("tails right freq at s=1 below 0.5", 0.0, 0.5, *p.below_half_at_1);
}

inline void cmd_exit(const RunConfig& c, ArtifactSink& out, Verdicts& v) {
  require_grid(c);
  const ParamPair pp = params_of(c, c.m, c.n);
  std::optional<double> z;
  if (c.options.contains("z")) z = json_real(c.options.at("z"), "z");
  const ExitProfile p = exit_profile(pp, c.m, c.n, c.seed, c.replicas ? c.replicas : 1000, z, c.threads);
  std::ostringstream os;
  os << "axis,exit,count\n";
  for (auto [k, cnt] : p.hor) os << "hor," << k << "," << cnt << "\n";
  for (auto [k, cnt] : p.ver) os << "ver," << k << "," << cnt << "\n";
  out.write("exit_hist.csv", os.str());
  std::ostringstream su;
  su << "z,median_max_exit,scale,frac_beyond_scale,wilson_lo,wilson_hi,both_positive\n"
     << fmt(p.z) << "," << fmt(p.median_max_exit) << "," << fmt(p.scale) << "," << fmt(p.frac_beyond_scale) << ","
     << fmt(p.frac_ci.lo) << "," << fmt(p.frac_ci.hi) << "," << p.both_positive << "\n";
  out.write("exit_summary.csv", su.str());
  v.add("exit median below m^0.75", p.median_max_exit, p.scale, p.median_max_exit <= p.scale);
}

inline void cmd_limitshape(const RunConfig& c, ArtifactSink& out, Verdicts& v) {
  require_grid(c);
  const ParamPair pp = params_of(c, c.m, c.n);
  const ShapeSpec s = spec_of(c, pp, c.m, c.n);
  const double C = opt_real(c, "C", 1.1);
  const std::size_t K = opt_index(c, "K", 800);
  const LppField f = lpp_field(pp, c.m, c.n, c.seed, stream_grid_id(kStreamCluster, 0), c.threads);
  out.grid("field", f.checksum());
  auto times = opt_reals(c, "trend_times", {});
  std::vector<double> all = times;
  if (std::find(all.begin(), all.end(), c.t) == all.end()) all.push_back(c.t);
  std::sort(all.begin(), all.end());
  std::ostringstream os;
  os << "t,hausdorff,h\n";
  std::vector<double> d;
  for (double t : all) {
    const LimitShapeReport r = limit_shape_distance(f, s, t, C, K);
    os << fmt(t) << "," << fmt(r.distance) << "," << fmt(r.h) << "\n";
    d.push_back(r.distance);
    if (t == c.t) {
      out.write("cluster_scaled.pgm", r.cluster.pgm());
      out.write("predicted.pgm", r.predicted.pgm());
      const double thr = opt_real(c, "max_distance", 0.08);
      v.add("hausdorff at t=" + fmt(t), r.distance, thr, r.distance <= thr);
    }
  }
  for (std::size_t k = 1; k < d.size(); ++k) {
    v.add("hausdorff trend t=" + fmt(all[k]), d[k], 1.5 * d[k - 1], d[k] <= 1.5 * d[k - 1]);
  }
  out.write("limitshape.csv", os.str());
}

inline void cmd_expsum(const RunConfig& c, ArtifactSink& out, Verdicts& v) {
  const auto rates = opt_reals(c, "rates", std::vector<double>(100, 1.0));
  const auto s_grid = opt_reals(c, "s_grid", {0.0, 1.0, 2.0, 3.0, 4.0});
  const ExpSumProfile p = expsum_concentration(rates, c.replicas ? c.replicas : 10000, s_grid, c.seed, c.threads);
  std::ostringstream os;
  os << "s,count,freq,wilson_lo,wilson_hi\n";
  for (const auto& r : p.rows) {
    os << fmt(r.s) << "," << r.count << "," << fmt(r.freq) << "," << fmt(r.ci.lo) << "," << fmt(r.ci.hi) << "\n";
  }
  out.write("expsum.csv", os.str());
  v.add("expsum monotone in s", p.monotone ? 1.0 : 0.0, 1.0, p.monotone);
}

inline void cmd_rains(const RunConfig& c, ArtifactSink& out, Verdicts& v) {
  const std::size_t block = opt_index(c, "block", 100);
  const std::size_t K = opt_index(c, "K", 20);
  const std::string series = c.options.value("series", std::string("squares"));
  Sequence a;
  Sequence b;
  std::size_t Kser = 0;
  double tail = 0.0;
  if (series == "squares") {
    a = [](std::size_t i) { return static_cast<double>(i) * static_cast<double>(i); };
    b = a;
    Kser = opt_index(c, "series_terms", 1000000);
    const double k = static_cast<double>(Kser);
    // Σ_{i>K} 1/(i^2 - 1) per side bounds the tail for |z| < 1.
    tail = 1.0 / k + 1.0 / (k + 1.0);
  } else if (series == "explicit") {
    const auto av = json_reals(c.options.at("a_values"), "a_values");
    const auto bv = json_reals(c.options.at("b_values"), "b_values");
    if (av.size() != bv.size()) throw ConfigError("rains: a_values and b_values need equal length");
    a = [av](std::size_t i) { return av.at(i - 1); };
    b = [bv](std::size_t i) { return bv.at(i - 1); };
    Kser = av.size();
    tail = json_real(c.options.at("tail_bound"), "tail_bound");
  } else {
    throw ConfigError("rains: series must be 'squares' or 'explicit'");
  }
  const RainsLimit lim = rains_limit(a, b, Kser, tail);
  const RainsReport r = rains_check(a, b, block, K, c.seed, lim.value);
  std::ostringstream os;
  os << "n,K,sup_over_n,limit,limit_lower,limit_upper,rel_error\n"
     << block << "," << K << "," << fmt(r.sup_over_n) << "," << fmt(lim.value) << "," << fmt(lim.lower) << ","
     << fmt(lim.upper) << "," << fmt(r.rel_error) << "\n";
  out.write("rains.csv", os.str());
  const double thr = opt_real(c, "max_rel_error", 0.10);
  v.add("rains ratio vs limit", r.rel_error, thr, r.rel_error <= thr);
}

}  // namespace detail

// Runs one configured command, writing artifacts, verdict.json (for the
// verify commands and rains) and run.json into c.out.
inline RunResult run(const RunConfig& c) {
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), c.command) == names.end()) {
    throw ConfigError("unknown command '" + c.command + "'");
  }
  ArtifactSink out(c.out);
  Verdicts v;
  const std::string& k = c.command;
  if (k == "simulate") detail::cmd_simulate(c, out, v);
  else if (k == "shape") detail::cmd_shape(c, out, v);
  else if (k == "centering") detail::cmd_centering(c, out, v);
  else if (k == "tasep") detail::cmd_tasep(c, out, v);
  else if (k == "verify-burke") detail::cmd_burke(c, out, v);
  else if (k == "verify-permutation") detail::cmd_permutation(c, out, v);
  else if (k == "verify-tails") detail::cmd_tails(c, out, v);
  else if (k == "verify-exit") detail::cmd_exit(c, out, v);
  else if (k == "verify-limitshape") detail::cmd_limitshape(c, out, v);
  else if (k == "verify-expsum") detail::cmd_expsum(c, out, v);
  else if (k == "rains") detail::cmd_rains(c, out, v);
  const bool has_verdict = !v.checks.empty();
  if (has_verdict) out.write("verdict.json", v.dump());

  const Json canon = c.canonical();
  Json m;
  m["command"] = c.command;
  m["config"] = canon;
  m["config_hash"] = hex64(fnv1a(canon.dump()));
  m["seed"] = std::to_string(c.seed);
  m["threads"] = resolve_threads(c.threads);
  m["artifacts"] = out.entries();
  m["grid_checksums"] = out.grids();
  if (has_verdict) m["pass"] = v.all;
  std::ofstream f(out.dir() / "run.json");
  f << m.dump(2) << "\n";
  if (!f) throw ResourceError("cannot write run.json");
  RunResult r;
  r.manifest = m;
  r.status = has_verdict && !v.all ? kExitCheckFailed : kExitOk;
  return r;
}

}  // namespace cgm
