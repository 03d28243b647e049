#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <sstream>
#include <vector>

#include "cgm/error.hpp"
#include "cgm/numeric.hpp"
#include "cgm/params.hpp"

namespace cgm {

struct CenteringResult {
  double zeta;      // minimizer in (-min a_m, min b_n)
  double M;         // minimum of the stationary mean
  double C;         // common variance at zeta
  double Delta;     // distance of zeta to the nearer endpoint
  double residual;  // a-side minus b-side inverse-square sum at zeta
  double C_b;       // the b-side inverse-square sum, equal to C at the root
};

namespace detail {

// The stationary-mean sums written in the coordinate u = z + min a, so that
// every denominator is p_i + u or q_j - u with p_i >= 0, q_j >= L = |I|.
// Keeps full relative precision near the left pole and makes the problem
// exactly invariant under a -> a + s, b -> b - s.
struct ShiftedSums {
  std::vector<double> p;
  std::vector<double> q;
  double amin;
  double length;

  ShiftedSums(std::span<const double> a, std::span<const double> b) {
    amin = *std::min_element(a.begin(), a.end());
    const double bmin = *std::min_element(b.begin(), b.end());
    length = amin + bmin;
    p.reserve(a.size());
    q.reserve(b.size());
    for (double x : a) p.push_back(x - amin);
    for (double y : b) q.push_back(y + amin);
  }

  double mean(double u) const {
    CompensatedSum s;
    for (double x : p) s += 1.0 / (x + u);
    for (double y : q) s += 1.0 / (y - u);
    return s.value();
  }

  double var_a(double u) const {
    CompensatedSum s;
    for (double x : p) s += 1.0 / ((x + u) * (x + u));
    return s.value();
  }

  double var_b(double u) const {
    CompensatedSum s;
    for (double y : q) s += 1.0 / ((y - u) * (y - u));
    return s.value();
  }

  // Derivative of var_a - var_b in u (strictly negative).
  double slope(double u) const {
    CompensatedSum s;
    for (double x : p) s += -2.0 / ((x + u) * (x + u) * (x + u));
    for (double y : q) s += -2.0 / ((y - u) * (y - u) * (y - u));
    return s.value();
  }
};

}  // namespace detail

// Σ_{i<=m} 1/(a_m(i)+z) + Σ_{j<=n} 1/(b_n(j)-z), the mean of the
// increment-stationary last-passage time at (m, n).
inline double stationary_mean(std::span<const double> a, std::span<const double> b, double z) {
  const double lo = -*std::min_element(a.begin(), a.end());
  const double hi = *std::min_element(b.begin(), b.end());
  if (!(z > lo && z < hi)) {
    std::ostringstream os;
    os << "stationary_mean: z = " << z << " outside (" << lo << ", " << hi << ")";
    throw DomainError(os.str());
  }
  CompensatedSum s;
  for (double x : a) s += 1.0 / (x + z);
  for (double y : b) s += 1.0 / (y - z);
  return s.value();
}

inline double stationary_mean(const ParamPair& pp, std::size_t m, std::size_t n, double z) {
  pp.check_positivity(m, n);
  const auto a = pp.a().row(m);
  const auto b = pp.b().row(n);
  return stationary_mean(a, b, z);
}

// Minimizes the stationary mean over the open interval by solving
// Σ 1/(a_i+z)^2 = Σ 1/(b_j-z)^2. Bisection to width 1e-14 |I| (or until the
// bracket stops splitting) followed by a single guarded Newton step.
inline CenteringResult solve_centering(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw RangeError("solve_centering: need m, n >= 1");
  const detail::ShiftedSums s(a, b);
  const double L = s.length;
  if (!(L > 0.0)) throw InvalidParameters("solve_centering: min a + min b must be > 0");
  auto f = [&](double u) { return s.var_a(u) - s.var_b(u); };

  double inset = 1e-12 * L;
  double lo = inset;
  double hi = L - inset;
  while (!std::isfinite(f(lo)) && inset < 0.25 * L) {
    inset *= 2.0;
    lo = inset;
  }
  inset = 1e-12 * L;
  while (!std::isfinite(f(hi)) && inset < 0.25 * L) {
    inset *= 2.0;
    hi = L - inset;
  }
  if (!(f(lo) > 0.0) || !(f(hi) < 0.0)) {
    throw NumericalError("solve_centering: no sign change across the bracket");
  }
  auto [blo, bhi] = bisect_sign(lo, hi, [&](double u) { return f(u) > 0.0; }, 1e-14 * L);
  double u = 0.5 * (blo + bhi);
  double fu = f(u);
  const double du = s.slope(u);
  if (du < 0.0 && fu != 0.0) {
    const double cand = u - fu / du;
    if (cand > lo && cand < hi) {
      const double fc = f(cand);
      if (std::abs(fc) < std::abs(fu)) {
        u = cand;
        fu = fc;
      }
    }
  }
  CenteringResult r;
  r.zeta = u - s.amin;
  r.M = s.mean(u);
  r.C = s.var_a(u);
  r.C_b = s.var_b(u);
  r.residual = fu;
  r.Delta = std::min(u, L - u);
  return r;
}

inline CenteringResult solve_centering(const ParamPair& pp, std::size_t m, std::size_t n) {
  if (m < 1 || n < 1) throw RangeError("solve_centering: need m, n >= 1");
  pp.check_positivity(m, n);
  const auto a = pp.a().row(m);
  const auto b = pp.b().row(n);
  return solve_centering(a, b);
}

// Inf over z of the infinite-series stationary mean, approximated by the
// first K terms of each sequence. The true value lies in [lower, upper]
// with upper - lower = tail_bound; `value` is the midpoint.
struct RainsLimit {
  double value;
  double lower;
  double upper;
  double zeta;
  double half_width;
};

using Sequence = std::function<double(std::size_t)>;

inline double rains_objective(const Sequence& a, const Sequence& b, std::size_t K, double z) {
  CompensatedSum s;
  for (std::size_t i = 1; i <= K; ++i) s += 1.0 / (a(i) + z);
  for (std::size_t j = 1; j <= K; ++j) s += 1.0 / (b(j) - z);
  return s.value();
}

// The caller certifies that Σ_{i>K} 1/(a_i+z) + Σ_{j>K} 1/(b_j-z) <= tail_bound
// for every z in the optimization interval. The tail is also extrapolated
// from the last two dyadic blocks of terms; if that estimate exceeds ten
// times the certified bound (or the blocks do not shrink), the series is
// declared non-summable.
inline RainsLimit rains_limit(const Sequence& a_seq, const Sequence& b_seq, std::size_t K,
                              double tail_bound) {
  if (K < 8) throw DomainError("rains_limit: need K >= 8 terms");
  if (!(tail_bound >= 0.0)) throw DomainError("rains_limit: tail_bound must be >= 0");
  std::vector<double> a(K);
  std::vector<double> b(K);
  for (std::size_t i = 0; i < K; ++i) {
    a[i] = a_seq(i + 1);
    b[i] = b_seq(i + 1);
  }
  const double inf_a = *std::min_element(a.begin(), a.end());
  const double inf_b = *std::min_element(b.begin(), b.end());
  if (!(inf_a + inf_b > 0.0)) throw InvalidParameters("rains_limit: inf a + inf b must be > 0");

  const double zmid = 0.5 * (inf_b - inf_a);
  auto block = [&](std::size_t from, std::size_t to) {  // terms (from, to], 1-based
    CompensatedSum s;
    for (std::size_t i = from; i < to; ++i) s += 1.0 / (a[i] + zmid) + 1.0 / (b[i] - zmid);
    return s.value();
  };
  const double late = block(K / 2, K);
  const double early = block(K / 4, K / 2);
  const double ratio = early > 0.0 ? late / early : 1.0;
  const double extrapolated = ratio < 0.999 ? late * ratio / (1.0 - ratio) : kInf;
  if (!(extrapolated <= 10.0 * tail_bound + 1e-300)) {
    std::ostringstream os;
    os << "rains_limit: partial sums are not Cauchy within the budget (block ratio " << ratio
       << ", extrapolated tail " << extrapolated << " vs certified " << tail_bound << ")";
    throw DivergenceError(os.str());
  }

  const detail::ShiftedSums s(a, b);
  const double L = s.length;
  auto obj = [&](double u) { return s.mean(u); };
  const double eps = 1e-12 * L;
  const auto g = golden_section_min(obj, eps, L - eps, 1e-15);
  RainsLimit r;
  r.lower = g.value;
  r.upper = g.value + tail_bound;
  r.value = g.value + 0.5 * tail_bound;
  r.half_width = 0.5 * tail_bound;
  r.zeta = g.x - s.amin;
  return r;
}

}  // namespace cgm
