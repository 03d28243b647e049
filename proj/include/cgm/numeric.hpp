#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>

namespace cgm {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Neumaier's variant of Kahan summation. Exact enough for 10^6+ terms of
// mixed magnitude, which is what the transform and centering sums see.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }

  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Smallest x in [lo, hi] with pred(x) false, for pred true-then-false.
// Runs until the bracket cannot be split in double precision.
template <class Pred>
std::pair<double, double> bisect_sign(double lo, double hi, Pred&& positive,
                                      double width = 0.0) {
  for (int it = 0; it < 2000; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (!(mid > lo && mid < hi) || hi - lo <= width) break;
    if (positive(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo, hi};
}

struct GoldenResult {
  double x;
  double value;
};

// Golden-section search for the maximum of a unimodal f on [lo, hi].
// The endpoints themselves are also compared so that a monotone f returns
// its boundary supremum.
template <class F>
GoldenResult golden_section_max(F&& f, double lo, double hi, double tol = 1e-13) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 400 && (b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  GoldenResult best{c, fc};
  if (fd > best.value) best = {d, fd};
  const double flo = f(lo);
  if (flo > best.value) best = {lo, flo};
  const double fhi = f(hi);
  if (fhi > best.value) best = {hi, fhi};
  return best;
}

template <class F>
GoldenResult golden_section_min(F&& f, double lo, double hi, double tol = 1e-13) {
  auto r = golden_section_max([&](double x) { return -f(x); }, lo, hi, tol);
  return {r.x, -r.value};
}

}  // namespace cgm
