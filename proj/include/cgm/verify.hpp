#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cgm/centering.hpp"
#include "cgm/error.hpp"
#include "cgm/lpp.hpp"
#include "cgm/params.hpp"
#include "cgm/rng.hpp"
#include "cgm/shape.hpp"

namespace cgm {

inline constexpr double kKsAlpha = 0.001;

// Asymptotic Kolmogorov critical constant, sqrt(-log(alpha/2)/2).
inline double ks_critical_constant(double alpha = kKsAlpha) { return std::sqrt(-0.5 * std::log(0.5 * alpha)); }

// Replica streams, one per check, so that checks never share weights.
enum Stream : std::uint64_t {
  kStreamBurke = 1,
  kStreamPermA = 2,
  kStreamPermB = 3,
  kStreamTail = 4,
  kStreamExit = 5,
  kStreamExpSum = 6,
  kStreamCluster = 7,
  kStreamRains = 8,
  kStreamSimulate = 9,
  kStreamTasep = 10,
};

class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> sample) : x_(std::move(sample)) { std::sort(x_.begin(), x_.end()); }

  std::size_t size() const noexcept { return x_.size(); }
  const std::vector<double>& sorted() const noexcept { return x_; }

  double operator()(double t) const {
    if (x_.empty()) return 0.0;
    const auto k = std::upper_bound(x_.begin(), x_.end(), t) - x_.begin();
    return static_cast<double>(k) / static_cast<double>(x_.size());
  }

 private:
  std::vector<double> x_;
};

struct KsReport {
  double statistic = 0.0;
  std::size_t n = 0;
  std::string reference;
  double threshold = 0.0;
  bool pass = false;
};

inline KsReport ks_exponential(const std::vector<double>& sample, double rate, double alpha = kKsAlpha) {
  if (!(rate > 0.0)) throw DomainError("ks_exponential: rate must be > 0");
  if (sample.size() < 100) throw DomainError("ks_exponential: need at least 100 observations");
  for (double x : sample) {
    if (!(x >= -1e-12)) throw DataError("ks_exponential: negative or NaN observation in an exponential sample");
  }
  const EmpiricalCdf F(sample);
  const auto& xs = F.sorted();
  const double n = static_cast<double>(xs.size());
  double D = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double cdf = -std::expm1(-rate * std::max(xs[k], 0.0));
    D = std::max({D, static_cast<double>(k + 1) / n - cdf, cdf - static_cast<double>(k) / n});
  }
  KsReport r;
  r.statistic = D;
  r.n = xs.size();
  std::ostringstream os;
  os << "Exp(" << rate << ")";
  r.reference = os.str();
  r.threshold = ks_critical_constant(alpha) / std::sqrt(n);
  r.pass = D < r.threshold;
  return r;
}

struct TwoSampleReport {
  double statistic = 0.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  double threshold = 0.0;
  bool pass = false;
  double mean1 = 0.0;
  double mean2 = 0.0;
};

inline TwoSampleReport ks_two_sample(std::vector<double> x, std::vector<double> y, double alpha = kKsAlpha) {
  if (x.empty() || y.empty()) throw DomainError("ks_two_sample: empty sample");
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n1 = static_cast<double>(x.size());
  const double n2 = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double D = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    D = std::max(D, std::abs(static_cast<double>(i) / n1 - static_cast<double>(j) / n2));
  }
  TwoSampleReport r;
  r.statistic = D;
  r.n1 = x.size();
  r.n2 = y.size();
  r.threshold = ks_critical_constant(alpha) * std::sqrt((n1 + n2) / (n1 * n2));
  r.pass = D < r.threshold;
  CompensatedSum s1;
  CompensatedSum s2;
  for (double v : x) s1 += v;
  for (double v : y) s2 += v;
  r.mean1 = s1.value() / n1;
  r.mean2 = s2.value() / n2;
  return r;
}

inline double sample_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  CompensatedSum sx;
  CompensatedSum sy;
  for (std::size_t k = 0; k < n; ++k) {
    sx += x[k];
    sy += y[k];
  }
  const double mx = sx.value() / static_cast<double>(n);
  const double my = sy.value() / static_cast<double>(n);
  CompensatedSum cxy;
  CompensatedSum cxx;
  CompensatedSum cyy;
  for (std::size_t k = 0; k < n; ++k) {
    cxy += (x[k] - mx) * (y[k] - my);
    cxx += (x[k] - mx) * (x[k] - mx);
    cyy += (y[k] - my) * (y[k] - my);
  }
  return cxy.value() / std::sqrt(cxx.value() * cyy.value());
}

// Wilson score interval for k successes in n trials.
struct Wilson {
  double lo;
  double hi;
};

inline Wilson wilson_interval(std::size_t k, std::size_t n, double z = 3.2905) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double den = 1.0 + z2 / nn;
  const double c = (p + z2 / (2.0 * nn)) / den;
  const double h = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / den;
  return {std::max(0.0, c - h), std::min(1.0, c + h)};
}

namespace detail {

// out[r] = f(r) for r < count, over a worker pool; slot r is written only
// by replica r, so the result does not depend on the thread count.
template <class T, class F>
std::vector<T> replicate(std::size_t count, int threads, F&& f) {
  std::vector<T> out(count);
  const int nt = resolve_threads(threads);
  const auto c = static_cast<std::ptrdiff_t>(count);
#ifdef _OPENMP
#pragma omp parallel for num_threads(nt) schedule(static)
#endif
  for (std::ptrdiff_t r = 0; r < c; ++r) out[static_cast<std::size_t>(r)] = f(static_cast<std::size_t>(r));
  (void)nt;
  return out;
}

}  // namespace detail

struct IncrementStream {
  std::string kind;  // "row" (I(i, n)) or "col" (J(m, j))
  std::size_t index = 0;
  double rate = 0.0;
  KsReport ks;
  double lag1 = 0.0;  // correlation with the neighbouring increment
  double lag1_threshold = 0.0;
  bool lag1_pass = false;
};

struct BurkeReport {
  double z = 0.0;
  double reference_z = 0.0;
  std::size_t replicas = 0;
  std::vector<IncrementStream> streams;
  bool pass = false;
};

// Increments I(i, n) ~ Exp(a_m(i) + z) along the top row and
// J(m, j) ~ Exp(b_n(j) - z) along the right column. `reference_z` sets
// the rates tested against (equal to z for the real check).
inline BurkeReport burke_check(const ParamPair& pp, std::size_t m, std::size_t n, double z, std::uint64_t seed,
                               const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols,
                               std::size_t replicas, std::optional<double> reference_z = std::nullopt,
                               int threads = 0) {
  for (auto i : rows) {
    if (i < 1 || i > m) throw RangeError("burke_check: row index outside [1, m]");
  }
  for (auto j : cols) {
    if (j < 1 || j > n) throw RangeError("burke_check: column index outside [1, n]");
  }
  require_stationary_z(pp, m, n, z);
  const double zr = reference_z.value_or(z);
  const std::size_t ns = rows.size() + cols.size();
  // Per replica: for each stream the increment and its neighbour.
  auto draws = detail::replicate<std::vector<double>>(replicas, threads, [&](std::size_t r) {
    const StationaryGrid sg = stationary_grid(pp, m, n, z, seed, stream_grid_id(kStreamBurke, r));
    std::vector<double> v;
    v.reserve(2 * ns);
    for (auto i : rows) {
      const std::size_t nb = i < m ? i + 1 : i - 1;
      v.push_back(sg.I(i, n));
      v.push_back(nb >= 1 ? sg.I(nb, n) : 0.0);
    }
    for (auto j : cols) {
      const std::size_t nb = j < n ? j + 1 : j - 1;
      v.push_back(sg.J(m, j));
      v.push_back(nb >= 1 ? sg.J(m, nb) : 0.0);
    }
    return v;
  });
  BurkeReport rep;
  rep.z = z;
  rep.reference_z = zr;
  rep.replicas = replicas;
  rep.pass = true;
  const double rho_thr = 4.0 / std::sqrt(static_cast<double>(replicas));
  for (std::size_t s = 0; s < ns; ++s) {
    std::vector<double> x(replicas);
    std::vector<double> y(replicas);
    for (std::size_t r = 0; r < replicas; ++r) {
      x[r] = draws[r][2 * s];
      y[r] = draws[r][2 * s + 1];
    }
    IncrementStream st;
    const bool is_row = s < rows.size();
    st.kind = is_row ? "row" : "col";
    st.index = is_row ? rows[s] : cols[s - rows.size()];
    st.rate = is_row ? pp.a().value(m, st.index) + zr : pp.b().value(n, st.index) - zr;
    st.ks = ks_exponential(x, st.rate);
    const bool has_neighbour = is_row ? m > 1 : n > 1;
    st.lag1 = has_neighbour ? sample_correlation(x, y) : 0.0;
    st.lag1_threshold = rho_thr;
    st.lag1_pass = std::abs(st.lag1) <= rho_thr;
    rep.pass = rep.pass && st.ks.pass && st.lag1_pass;
    rep.streams.push_back(std::move(st));
  }
  return rep;
}

// G(m, n) draws from a stream of independent collections.
inline std::vector<double> point_draws(const ParamPair& pp, std::size_t m, std::size_t n, std::uint64_t seed,
                                       std::uint64_t stream, std::size_t replicas, int threads = 0) {
  pp.check_positivity(m, n);
  return detail::replicate<double>(replicas, threads, [&](std::size_t r) {
    return lpp_grid(pp, m, n, seed, stream_grid_id(stream, r), Storage::Rolling, 1).corner();
  });
}

// Two-sample comparison of the laws of G(m, n) under two parameter pairs,
// without any check on how they relate.
inline TwoSampleReport compare_point_laws(const ParamPair& p1, const ParamPair& p2, std::size_t m, std::size_t n,
                                          std::uint64_t seed, std::size_t replicas, bool common_numbers = false,
                                          int threads = 0) {
  auto x = point_draws(p1, m, n, seed, kStreamPermA, replicas, threads);
  auto y = point_draws(p2, m, n, seed, common_numbers ? kStreamPermA : kStreamPermB, replicas, threads);
  return ks_two_sample(std::move(x), std::move(y));
}

// The law of G(m, n) is invariant under permuting a_m and b_n. Requires
// `permuted` to carry the same multisets on [m] x [n].
inline TwoSampleReport permutation_check(const ParamPair& pp, const ParamPair& permuted, std::size_t m, std::size_t n,
                                         std::uint64_t seed, std::size_t replicas, bool common_numbers = false,
                                         int threads = 0) {
  auto same_multiset = [](std::vector<double> x, std::vector<double> y) {
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    return x == y;
  };
  if (!same_multiset(pp.a().row(m), permuted.a().row(m)) || !same_multiset(pp.b().row(n), permuted.b().row(n))) {
    throw ValidationError("permutation_check: the second parameter pair is not a permutation of the first");
  }
  return compare_point_laws(pp, permuted, m, n, seed, replicas, common_numbers, threads);
}

struct TailRow {
  double s;
  std::size_t count;
  double freq;
  Wilson ci;
};

struct TailProfile {
  double M = 0.0;
  double C = 0.0;
  std::size_t replicas = 0;
  std::vector<TailRow> rows;
  bool monotone = false;
  std::optional<bool> below_half_at_1;
};

enum class TailSide { Right, Left };

// Exceedance frequencies P{G >= M + shift + s sqrt(C)} (right) or
// P{G <= M + shift - s sqrt(C)} (left).
inline TailProfile tail_profile(const ParamPair& pp, std::size_t m, std::size_t n, const std::vector<double>& s_grid,
                                std::size_t replicas, TailSide side, std::uint64_t seed, double shift = 0.0,
                                int threads = 0) {
  if (replicas < 1000) throw DomainError("tail_profile: need at least 1000 replicas");
  const CenteringResult c = solve_centering(pp, m, n);
  const auto g = point_draws(pp, m, n, seed, kStreamTail, replicas, threads);
  TailProfile tp;
  tp.M = c.M;
  tp.C = c.C;
  tp.replicas = replicas;
  const double center = c.M + shift;
  const double sd = std::sqrt(c.C);
  for (double s : s_grid) {
    std::size_t k = 0;
    for (double v : g) {
      if (side == TailSide::Right ? v >= center + s * sd : v <= center - s * sd) ++k;
    }
    tp.rows.push_back({s, k, static_cast<double>(k) / static_cast<double>(replicas), wilson_interval(k, replicas)});
  }
  // Nesting of events: larger s, smaller event, so counts cannot increase.
  std::vector<TailRow> by_s = tp.rows;
  std::sort(by_s.begin(), by_s.end(), [](const TailRow& a, const TailRow& b) { return a.s < b.s; });
  tp.monotone = true;
  for (std::size_t k = 1; k < by_s.size(); ++k) tp.monotone = tp.monotone && by_s[k].count <= by_s[k - 1].count;
  for (const auto& r : tp.rows) {
    if (r.s == 1.0) tp.below_half_at_1 = r.freq < 0.5;
  }
  return tp;
}

struct ExitProfile {
  double z = 0.0;
  std::size_t replicas = 0;
  std::map<std::size_t, std::size_t> hor;  // Z_hor value -> count
  std::map<std::size_t, std::size_t> ver;
  double median_max_exit = 0.0;
  double scale = 0.0;  // m^{3/4}
  double frac_beyond_scale = 0.0;
  Wilson frac_ci{0.0, 1.0};
  std::size_t both_positive = 0;  // replicas with Z_hor > 0 and Z_ver > 0
};

inline ExitProfile exit_profile(const ParamPair& pp, std::size_t m, std::size_t n, std::uint64_t seed,
                                std::size_t replicas, std::optional<double> z = std::nullopt, int threads = 0) {
  if (replicas == 0) throw DomainError("exit_profile: need replicas >= 1");
  const double zz = z ? *z : solve_centering(pp, m, n).zeta;
  require_stationary_z(pp, m, n, zz);
  const auto ex = detail::replicate<ExitPoints>(replicas, threads, [&](std::size_t r) {
    const StationaryGrid sg = stationary_grid(pp, m, n, zz, seed, stream_grid_id(kStreamExit, r));
    return exit_points(sg, m, n);
  });
  ExitProfile p;
  p.z = zz;
  p.replicas = replicas;
  p.scale = std::pow(static_cast<double>(m), 0.75);
  std::vector<double> mx;
  mx.reserve(replicas);
  std::size_t beyond = 0;
  for (const auto& e : ex) {
    ++p.hor[e.hor];
    ++p.ver[e.ver];
    if (e.hor > 0 && e.ver > 0) ++p.both_positive;
    const double v = static_cast<double>(std::max(e.hor, e.ver));
    mx.push_back(v);
    if (v > p.scale) ++beyond;
  }
  std::sort(mx.begin(), mx.end());
  const std::size_t h = mx.size() / 2;
  p.median_max_exit = mx.size() % 2 ? mx[h] : 0.5 * (mx[h - 1] + mx[h]);
  p.frac_beyond_scale = static_cast<double>(beyond) / static_cast<double>(replicas);
  p.frac_ci = wilson_interval(beyond, replicas);
  return p;
}

struct ExpSumRow {
  double s;
  std::size_t count;
  double freq;
  Wilson ci;
};

struct ExpSumProfile {
  double mean = 0.0;
  double sd = 0.0;
  std::vector<ExpSumRow> rows;
  bool monotone = false;
};

// Two-sided deviations of Σ X_k, X_k ~ Exp(rate_k), in units of the
// standard deviation sqrt(Σ 1/rate_k^2).
inline ExpSumProfile expsum_concentration(const std::vector<double>& rates, std::size_t replicas,
                                          const std::vector<double>& s_grid, std::uint64_t seed, int threads = 0) {
  if (rates.empty()) throw DomainError("expsum_concentration: no rates");
  for (double r : rates) {
    if (!(r > 0.0)) throw DomainError("expsum_concentration: rates must be > 0");
  }
  CompensatedSum mu;
  CompensatedSum var;
  for (double r : rates) {
    mu += 1.0 / r;
    var += 1.0 / (r * r);
  }
  ExpSumProfile p;
  p.mean = mu.value();
  p.sd = std::sqrt(var.value());
  const auto dev = detail::replicate<double>(replicas, threads, [&](std::size_t r) {
    const CellRng rng(seed, stream_grid_id(kStreamExpSum, r));
    CompensatedSum s;
    for (std::size_t k = 0; k < rates.size(); ++k) s += rng.exp1(static_cast<std::uint32_t>(k + 1), 1) / rates[k];
    return std::abs(s.value() - p.mean);
  });
  for (double s : s_grid) {
    std::size_t k = 0;
    for (double d : dev) {
      if (d >= s * p.sd) ++k;
    }
    p.rows.push_back({s, k, static_cast<double>(k) / static_cast<double>(replicas), wilson_interval(k, replicas)});
  }
  std::vector<ExpSumRow> by_s = p.rows;
  std::sort(by_s.begin(), by_s.end(), [](const ExpSumRow& a, const ExpSumRow& b) { return a.s < b.s; });
  p.monotone = true;
  for (std::size_t k = 1; k < by_s.size(); ++k) p.monotone = p.monotone && by_s[k].count <= by_s[k - 1].count;
  return p;
}

// Boolean samples of a region at the lattice points (k h, l h),
// 0 <= k, l <= K, covering [0, C]^2 with h = C / K.
class RegionRaster {
 public:
  RegionRaster(std::size_t K, double C) : K_(K), C_(C), cells_((K + 1) * (K + 1), 0) {
    if (K == 0 || !(C > 0.0)) throw DomainError("RegionRaster: need K >= 1 and C > 0");
  }

  template <class Pred>
  static RegionRaster rasterize(std::size_t K, double C, Pred&& inside) {
    RegionRaster r(K, C);
    for (std::size_t l = 0; l <= K; ++l) {
      for (std::size_t k = 0; k <= K; ++k) r.set(k, l, inside(k, l, r.coord(k), r.coord(l)));
    }
    return r;
  }

  std::size_t K() const noexcept { return K_; }
  double C() const noexcept { return C_; }
  double h() const noexcept { return C_ / static_cast<double>(K_); }
  double coord(std::size_t k) const noexcept { return C_ * static_cast<double>(k) / static_cast<double>(K_); }
  bool operator()(std::size_t k, std::size_t l) const { return cells_[l * (K_ + 1) + k] != 0; }
  void set(std::size_t k, std::size_t l, bool v) { cells_[l * (K_ + 1) + k] = v ? 1 : 0; }
  bool empty() const { return std::find(cells_.begin(), cells_.end(), 1) == cells_.end(); }
  const std::vector<unsigned char>& cells() const noexcept { return cells_; }

  std::string pgm() const {
    std::ostringstream os;
    os << "P5\n" << (K_ + 1) << " " << (K_ + 1) << "\n1\n";
    for (std::size_t r = 0; r <= K_; ++r) {
      const std::size_t l = K_ - r;
      for (std::size_t k = 0; k <= K_; ++k) os.put((*this)(k, l) ? '\1' : '\0');
    }
    return os.str();
  }

 private:
  std::size_t K_;
  double C_;
  std::vector<unsigned char> cells_;
};

namespace detail {

// Felzenszwalb-Huttenlocher 1D squared-distance transform of f.
inline void edt_1d(const double* f, double* d, std::size_t n, std::vector<std::size_t>& v, std::vector<double>& z) {
  constexpr double kBig = 1e300;
  v.assign(n, 0);
  z.assign(n + 1, 0.0);
  std::size_t k = 0;
  v[0] = 0;
  z[0] = -kBig;
  z[1] = kBig;
  for (std::size_t q = 1; q < n; ++q) {
    double s;
    for (;;) {
      const double p = static_cast<double>(v[k]);
      const double qq = static_cast<double>(q);
      s = ((f[q] + qq * qq) - (f[v[k]] + p * p)) / (2.0 * qq - 2.0 * p);
      if (s <= z[k] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kBig;
  }
  k = 0;
  for (std::size_t q = 0; q < n; ++q) {
    while (z[k + 1] < static_cast<double>(q)) ++k;
    const double dq = static_cast<double>(q) - static_cast<double>(v[k]);
    d[q] = dq * dq + f[v[k]];
  }
}

// Exact squared Euclidean distance (in lattice units) to the nearest set cell.
inline std::vector<double> squared_distance_to(const RegionRaster& r) {
  const std::size_t n = r.K() + 1;
  constexpr double kFar = 1e20;
  std::vector<double> g(n * n);
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t k = 0; k < n; ++k) g[l * n + k] = r(k, l) ? 0.0 : kFar;
  }
  std::vector<std::size_t> v;
  std::vector<double> z;
  std::vector<double> f(n);
  std::vector<double> d(n);
  for (std::size_t k = 0; k < n; ++k) {  // columns
    for (std::size_t l = 0; l < n; ++l) f[l] = g[l * n + k];
    edt_1d(f.data(), d.data(), n, v, z);
    for (std::size_t l = 0; l < n; ++l) g[l * n + k] = d[l];
  }
  for (std::size_t l = 0; l < n; ++l) {  // rows
    edt_1d(g.data() + l * n, d.data(), n, v, z);
    std::copy(d.begin(), d.end(), g.begin() + static_cast<std::ptrdiff_t>(l * n));
  }
  return g;
}

inline double directed_hausdorff(const RegionRaster& from, const std::vector<double>& dist_to) {
  double best = 0.0;
  const std::size_t n = from.K() + 1;
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t k = 0; k < n; ++k) {
      if (from(k, l)) best = std::max(best, dist_to[l * n + k]);
    }
  }
  return std::sqrt(best);
}

}  // namespace detail

inline double hausdorff(const RegionRaster& a, const RegionRaster& b) {
  if (a.K() != b.K() || a.C() != b.C()) throw DomainError("hausdorff: rasters differ in extent or resolution");
  if (a.empty() || b.empty()) throw DomainError("hausdorff: distance to an empty raster is undefined");
  const auto da = detail::squared_distance_to(a);
  const auto db = detail::squared_distance_to(b);
  return a.h() * std::max(detail::directed_hausdorff(a, db), detail::directed_hausdorff(b, da));
}

// Samples of the closure of t^{-1} R(t): (x, y) is in it iff
// G(ceil(tx) + 1{x = 0}, ceil(ty) + 1{y = 0}) <= t.
inline RegionRaster scaled_cluster_raster(const LppField& f, double t, double C, std::size_t K) {
  if (!(t > 0.0)) throw DomainError("scaled_cluster_raster: t must be > 0");
  auto index = [&](std::size_t k, double x) -> std::size_t {
    if (k == 0) return 1;
    const double v = t * x;
    const double r = std::round(v);
    const double c = std::abs(v - r) <= 1e-9 * std::max(1.0, v) ? r : std::ceil(v);
    return static_cast<std::size_t>(c);
  };
  const std::size_t need = index(K, C);
  if (need > f.M() || need > f.N()) {
    std::ostringstream os;
    os << "scaled_cluster_raster: [0, " << C << "]^2 at t = " << t << " needs a field of extent " << need;
    throw InsufficientExtent(os.str());
  }
  return RegionRaster::rasterize(K, C, [&](std::size_t k, std::size_t l, double x, double y) {
    return f(index(k, x), index(l, y)) <= t;
  });
}

inline RegionRaster limit_shape_raster(const ShapeSpec& spec, double C, std::size_t K) {
  return RegionRaster::rasterize(K, C, [&](std::size_t, std::size_t, double x, double y) {
    return in_limit_shape(spec, x, y);
  });
}

struct LimitShapeReport {
  double t = 0.0;
  double distance = 0.0;
  double h = 0.0;
  RegionRaster cluster;
  RegionRaster predicted;
};

inline LimitShapeReport limit_shape_distance(const LppField& f, const ShapeSpec& spec, double t, double C,
                                             std::size_t K = 800) {
  RegionRaster cl = scaled_cluster_raster(f, t, C, K);
  RegionRaster pr = limit_shape_raster(spec, C, K);
  const double d = hausdorff(cl, pr);
  return {t, d, cl.h(), std::move(cl), std::move(pr)};
}

// Hausdorff distance between the scaled cluster at time t on an N x N
// shared-sample field and the predicted limit shape, both on [0, C]^2.
inline LimitShapeReport limit_shape_check(const ParamPair& pp, const ShapeSpec& spec, double t, std::size_t N,
                                          std::uint64_t seed, double C, int threads = 0, std::size_t K = 800) {
  const LppField f = lpp_field(pp, N, N, seed, stream_grid_id(kStreamCluster, 0), threads);
  return limit_shape_distance(f, spec, t, C, K);
}

struct RainsReport {
  double sup_over_n = 0.0;
  double reference = 0.0;
  double rel_error = 0.0;
};

// G_n(Kn, Kn) / n for weights Exp(a_{ceil(i/n)} + b_{ceil(j/n)}); with
// nonnegative weights the sup over the box sits at the far corner.
inline RainsReport rains_check(const Sequence& a_seq, const Sequence& b_seq, std::size_t n, std::size_t K,
                               std::uint64_t seed, double reference) {
  if (n == 0 || K == 0) throw DomainError("rains_check: need n, K >= 1");
  std::vector<double> a(K);
  std::vector<double> b(K);
  for (std::size_t k = 0; k < K; ++k) {
    a[k] = a_seq(k + 1);
    b[k] = b_seq(k + 1);
  }
  const std::size_t L = K * n;
  const ParamPair pp(ParamFamily::block_constant(a, n, L), ParamFamily::block_constant(b, n, L));
  const double g = lpp_grid(pp, L, L, seed, stream_grid_id(kStreamRains, n), Storage::Rolling, 1).corner();
  RainsReport r;
  r.sup_over_n = g / static_cast<double>(n);
  r.reference = reference;
  r.rel_error = std::abs(r.sup_over_n - reference) / reference;
  return r;
}

}  // namespace cgm
