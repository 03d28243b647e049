#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <sstream>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "cgm/error.hpp"
#include "cgm/measures.hpp"
#include "cgm/numeric.hpp"

namespace cgm {

// a_m(i) = values[i-1], independent of m.
struct RowConstant {
  std::vector<double> values;
};

// a_m(i) = base[ceil(i / block) - 1], independent of m.
struct BlockConstant {
  std::vector<double> base;
  std::size_t block = 1;
};

// Genuinely m-dependent parameters. Rows m in [m_lo, m_hi] all read their
// prefix from the same stored row, so a handful of regimes describes arrays
// such as "a_m(50) = -0.25 only while m < 100" without O(cap^2) storage.
struct Triangular {
  struct Regime {
    std::size_t m_lo;
    std::size_t m_hi;
    std::vector<double> row;  // length >= m_hi
  };
  std::vector<Regime> regimes;  // sorted, contiguous, covering [1, cap]
};

// a_m(i) = f(i/m) for a piecewise-linear f on [0, 1].
struct MacroProfile {
  std::vector<std::pair<double, double>> breakpoints;  // (u, f(u)), u increasing

  double operator()(double u) const {
    if (u <= breakpoints.front().first) return breakpoints.front().second;
    if (u >= breakpoints.back().first) return breakpoints.back().second;
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), u,
                               [](double x, const auto& bp) { return x < bp.first; });
    const auto& [u1, f1] = *it;
    const auto& [u0, f0] = *(it - 1);
    return f0 + (f1 - f0) * (u - u0) / (u1 - u0);
  }
};

// A contiguous range of row indices whose rows agree on every shared prefix.
struct RowRegime {
  std::size_t lo;
  std::size_t hi;
};

// One of the doubly-indexed parameter collections {a_m(i): 1 <= i <= m <= cap}.
// Immutable; all values and running minima are validated at construction.
class ParamFamily {
 public:
  using Kind = std::variant<RowConstant, BlockConstant, Triangular, MacroProfile>;

  ParamFamily(Kind kind, std::size_t cap) : kind_(std::move(kind)), cap_(cap) {
    if (cap_ == 0) throw InvalidParameters("ParamFamily: cap must be positive");
    check_shape();
    compute_row_minima();
  }

  static ParamFamily row_constant(std::vector<double> values, std::size_t cap) {
    return ParamFamily(RowConstant{std::move(values)}, cap);
  }

  static ParamFamily constant(double value, std::size_t cap) {
    return row_constant(std::vector<double>(cap, value), cap);
  }

  // Constant `base` with 1-based (index, value) overrides.
  static ParamFamily with_defects(double base, const std::vector<std::pair<std::size_t, double>>& defects,
                                  std::size_t cap) {
    std::vector<double> v(cap, base);
    for (auto [i, x] : defects) {
      if (i >= 1 && i <= cap) v[i - 1] = x;
    }
    return row_constant(std::move(v), cap);
  }

  static ParamFamily block_constant(std::vector<double> base, std::size_t block, std::size_t cap) {
    return ParamFamily(BlockConstant{std::move(base), block}, cap);
  }

  static ParamFamily triangular(std::vector<Triangular::Regime> regimes, std::size_t cap) {
    return ParamFamily(Triangular{std::move(regimes)}, cap);
  }

  static ParamFamily macro_profile(std::vector<std::pair<double, double>> breakpoints, std::size_t cap) {
    return ParamFamily(MacroProfile{std::move(breakpoints)}, cap);
  }

  std::size_t cap() const noexcept { return cap_; }
  const Kind& kind() const noexcept { return kind_; }

  // True when value(m, i) does not depend on m.
  bool m_independent() const noexcept {
    return std::holds_alternative<RowConstant>(kind_) || std::holds_alternative<BlockConstant>(kind_);
  }

  double value(std::size_t m, std::size_t i) const {
    if (i < 1 || i > m || m > cap_) {
      std::ostringstream os;
      os << "ParamFamily::value: need 1 <= i <= m <= cap, got m=" << m << " i=" << i
         << " cap=" << cap_;
      throw RangeError(os.str());
    }
    return raw(m, i);
  }

  // Writes a_m(1..out.size()) into out; out.size() <= m.
  template <class Out>
  void fill_row(std::size_t m, Out& out, std::size_t count) const {
    if (count > m || m > cap_) throw RangeError("ParamFamily::fill_row: out of range");
    for (std::size_t i = 1; i <= count; ++i) out[i - 1] = raw(m, i);
  }

  std::vector<double> row(std::size_t m) const {
    std::vector<double> r(m);
    fill_row(m, r, m);
    return r;
  }

  double row_min(std::size_t m) const {
    if (m < 1 || m > cap_) throw RangeError("ParamFamily::row_min: m out of range");
    return row_min_[m - 1];
  }

  // Argmin index in row m (smallest i attaining min a_m).
  std::size_t row_argmin(std::size_t m) const {
    const double target = row_min(m);
    for (std::size_t i = 1; i <= m; ++i) {
      if (raw(m, i) == target) return i;
    }
    return 1;
  }

  // Ranges of m sharing one stored row. m-independent families are a single
  // regime; macroscopic profiles put every m in its own regime.
  std::vector<RowRegime> regimes() const {
    if (m_independent()) return {{1, cap_}};
    if (const auto* t = std::get_if<Triangular>(&kind_)) {
      std::vector<RowRegime> out;
      for (const auto& r : t->regimes) out.push_back({r.m_lo, r.m_hi});
      return out;
    }
    std::vector<RowRegime> out;
    out.reserve(cap_);
    for (std::size_t m = 1; m <= cap_; ++m) out.push_back({m, m});
    return out;
  }

  // sup_m min a_m over materialized rows. Exact for m-independent families,
  // whose running minimum is nonincreasing in m.
  double sup_row_min() const noexcept { return *std::max_element(row_min_.begin(), row_min_.end()); }
  bool sup_row_min_truncated() const noexcept { return !m_independent(); }

  double global_min() const noexcept { return *std::min_element(row_min_.begin(), row_min_.end()); }

 private:
  double raw(std::size_t m, std::size_t i) const {
    return std::visit(
        [&](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, RowConstant>) {
            return k.values[i - 1];
          } else if constexpr (std::is_same_v<K, BlockConstant>) {
            return k.base[(i - 1) / k.block];
          } else if constexpr (std::is_same_v<K, Triangular>) {
            return regime_for(k, m).row[i - 1];
          } else {
            return k(static_cast<double>(i) / static_cast<double>(m));
          }
        },
        kind_);
  }

  static const Triangular::Regime& regime_for(const Triangular& t, std::size_t m) {
    auto it = std::upper_bound(t.regimes.begin(), t.regimes.end(), m,
                               [](std::size_t x, const Triangular::Regime& r) { return x < r.m_lo; });
    return *(it - 1);
  }

  void check_shape() const {
    auto finite_all = [](const std::vector<double>& v) {
      return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    };
    std::visit(
        [&](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, RowConstant>) {
            if (k.values.size() < cap_) throw InvalidParameters("RowConstant: fewer values than cap");
            if (!finite_all(k.values)) throw InvalidParameters("RowConstant: non-finite value");
          } else if constexpr (std::is_same_v<K, BlockConstant>) {
            if (k.block == 0) throw InvalidParameters("BlockConstant: block must be >= 1");
            if (k.base.size() * k.block < cap_) throw InvalidParameters("BlockConstant: base too short for cap");
            if (!finite_all(k.base)) throw InvalidParameters("BlockConstant: non-finite value");
          } else if constexpr (std::is_same_v<K, Triangular>) {
            if (k.regimes.empty() || k.regimes.front().m_lo != 1) {
              throw InvalidParameters("Triangular: regimes must start at m = 1");
            }
            std::size_t next = 1;
            for (const auto& r : k.regimes) {
              if (r.m_lo != next || r.m_hi < r.m_lo) throw InvalidParameters("Triangular: regimes must be contiguous");
              if (r.row.size() < std::min(r.m_hi, cap_)) throw InvalidParameters("Triangular: regime row too short");
              if (!finite_all(r.row)) throw InvalidParameters("Triangular: non-finite value");
              next = r.m_hi + 1;
            }
            if (next <= cap_) throw InvalidParameters("Triangular: regimes do not cover cap");
          } else {
            if (k.breakpoints.size() < 1) throw InvalidParameters("MacroProfile: need breakpoints");
            for (std::size_t q = 1; q < k.breakpoints.size(); ++q) {
              if (!(k.breakpoints[q].first > k.breakpoints[q - 1].first)) {
                throw InvalidParameters("MacroProfile: breakpoints must increase");
              }
            }
            for (const auto& [u, f] : k.breakpoints) {
              if (!std::isfinite(u) || !std::isfinite(f)) throw InvalidParameters("MacroProfile: non-finite breakpoint");
            }
          }
        },
        kind_);
  }

  void compute_row_minima() {
    row_min_.assign(cap_, kInf);
    if (const auto* t = std::get_if<Triangular>(&kind_)) {
      for (const auto& r : t->regimes) {
        double run = kInf;
        const std::size_t hi = std::min(r.m_hi, cap_);
        for (std::size_t i = 1; i <= hi; ++i) {
          run = std::min(run, r.row[i - 1]);
          if (i >= r.m_lo) row_min_[i - 1] = run;
        }
      }
      return;
    }
    if (m_independent()) {
      double run = kInf;
      for (std::size_t m = 1; m <= cap_; ++m) {
        run = std::min(run, raw(m, m));
        row_min_[m - 1] = run;
      }
      return;
    }
    for (std::size_t m = 1; m <= cap_; ++m) {
      double run = kInf;
      for (std::size_t i = 1; i <= m; ++i) run = std::min(run, raw(m, i));
      row_min_[m - 1] = run;
    }
  }

  Kind kind_;
  std::size_t cap_;
  std::vector<double> row_min_;
};

// (1/m) Σ_{i<=m} δ_{a_m(i)}, with masses count/m.
inline Measure1D empirical_measure(const ParamFamily& p, std::size_t m) {
  if (m < 1 || m > p.cap()) throw RangeError("empirical_measure: m out of range");
  std::map<double, std::size_t> counts;
  for (std::size_t i = 1; i <= m; ++i) ++counts[p.value(m, i)];
  std::vector<Atom> atoms;
  atoms.reserve(counts.size());
  for (auto [loc, c] : counts) atoms.push_back({loc, static_cast<double>(c) / static_cast<double>(m)});
  return Measure1D(std::move(atoms));
}

// The pair (a, b); construction enforces a_m(i) + b_n(j) > 0 on [cap_a] x [cap_b].
class ParamPair {
 public:
  ParamPair(ParamFamily a, ParamFamily b) : a_(std::move(a)), b_(std::move(b)) {
    std::size_t m_star = 1;
    std::size_t n_star = 1;
    for (std::size_t m = 1; m <= a_.cap(); ++m) {
      if (a_.row_min(m) < a_.row_min(m_star)) m_star = m;
    }
    for (std::size_t n = 1; n <= b_.cap(); ++n) {
      if (b_.row_min(n) < b_.row_min(n_star)) n_star = n;
    }
    check_positivity(m_star, n_star);
  }

  const ParamFamily& a() const noexcept { return a_; }
  const ParamFamily& b() const noexcept { return b_; }

  // Throws InvalidParameters naming the offending (m, n, i, j).
  void check_positivity(std::size_t m, std::size_t n) const {
    const double s = a_.row_min(m) + b_.row_min(n);
    if (!(s > 0.0)) {
      std::ostringstream os;
      os << "positivity a_m(i) + b_n(j) > 0 violated at (m, n, i, j) = (" << m << ", " << n << ", "
         << a_.row_argmin(m) << ", " << b_.row_argmin(n) << "): " << a_.row_min(m) << " + "
         << b_.row_min(n) << " = " << s;
      throw InvalidParameters(os.str());
    }
  }

  bool m_independent() const noexcept { return a_.m_independent() && b_.m_independent(); }

 private:
  ParamFamily a_;
  ParamFamily b_;
};

struct ParamSummary {
  double min_a;
  double min_b;
  double lo;      // -min a_m
  double hi;      // min b_n
  double length;  // min a_m + min b_n
  double frakA;   // sup_m min a_m over m <= cap
  double frakB;
  bool frakA_truncated;
  bool frakB_truncated;
};

inline ParamSummary summary(const ParamPair& pp, std::size_t m, std::size_t n) {
  pp.check_positivity(m, n);
  const double ma = pp.a().row_min(m);
  const double mb = pp.b().row_min(n);
  return ParamSummary{ma,
                      mb,
                      -ma,
                      mb,
                      ma + mb,
                      pp.a().sup_row_min(),
                      pp.b().sup_row_min(),
                      pp.a().sup_row_min_truncated(),
                      pp.b().sup_row_min_truncated()};
}

}  // namespace cgm
