#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "cgm/error.hpp"
#include "cgm/measures.hpp"
#include "cgm/numeric.hpp"

namespace cgm {

// Limit data of a parameter pair: the transform pair (alpha, beta, frak_a,
// frak_b) plus the suprema of the running minima, which control spikes.
struct ShapeSpec {
  TransformPair tp;
  double frakA = kInf;
  double frakB = kInf;

  ShapeSpec() = default;
  ShapeSpec(TransformPair pair, double sup_min_a, double sup_min_b)
      : tp(std::move(pair)), frakA(sup_min_a), frakB(sup_min_b) {
    if (tp.mfa > frakA || tp.mfb > frakB) {
      throw InvalidParameters("ShapeSpec: running-minimum limits cannot exceed their suprema");
    }
  }

  // alpha = beta = δ_{c/2}, frak_a = frak_b = frak_A = frak_B = c/2: i.i.d. Exp(c).
  static ShapeSpec homogeneous(double rate) {
    const double h = 0.5 * rate;
    return ShapeSpec(TransformPair(Measure1D::dirac(h), Measure1D::dirac(h), h, h), h, h);
  }

  bool degenerate() const noexcept { return tp.alpha.is_zero() || tp.beta.is_zero(); }
};

enum class Region { FlatV, FlatH, Curved };

inline const char* region_name(Region r) {
  switch (r) {
    case Region::FlatV: return "flat_v";
    case Region::FlatH: return "flat_h";
    case Region::Curved: return "curved";
  }
  return "?";
}

namespace detail {

// ∫ alpha(da)/(a+z)^2 and ∫ beta(db)/(b-z)^2 as extended reals.
inline double second_a(const ShapeSpec& s, double z) { return s.tp.alpha.shifted_moment(2, z); }
inline double second_b(const ShapeSpec& s, double z) { return s.tp.beta.shifted_moment(2, -z); }

// x * v with 0 * inf treated as 0 (x > 0 in every caller, v may be inf).
inline double scaled(double x, double v) { return x == 0.0 ? 0.0 : x * v; }

inline void require_positive(double x, double y, const char* who) {
  if (!(x > 0.0) || !(y > 0.0)) {
    std::ostringstream os;
    os << who << ": need x, y > 0, got (" << x << ", " << y << ")";
    throw DomainError(os.str());
  }
}

}  // namespace detail

// argmin over z in [-frak_a, frak_b] of x A(z) + y B(z): clip at -frak_a when
// x ∫alpha/(a-frak_a)^2 <= y ∫beta/(b+frak_a)^2, clip at frak_b when
// x ∫alpha/(a+frak_b)^2 >= y ∫beta/(b-frak_b)^2, otherwise the interior
// root of x ∫alpha/(a+z)^2 = y ∫beta/(b-z)^2.
inline double gamma_argmin(const ShapeSpec& s, double x, double y) {
  detail::require_positive(x, y, "gamma_argmin");
  const auto& tp = s.tp;
  if (tp.beta.is_zero()) return tp.mfb;
  if (tp.alpha.is_zero()) return -tp.mfa;
  if (tp.mfa == kInf || tp.mfb == kInf) {
    throw DomainError("gamma_argmin: unbounded parameter interval has no minimizer");
  }
  const double lo = -tp.mfa;
  const double hi = tp.mfb;
  if (detail::scaled(x, detail::second_a(s, lo)) <= y * detail::second_b(s, lo)) return lo;
  if (x * detail::second_a(s, hi) >= detail::scaled(y, detail::second_b(s, hi))) return hi;

  // Interior: g(u) = x S2a - y S2b is decreasing in u = z + frak_a over (0, L).
  const double L = tp.mfa + tp.mfb;
  auto g = [&](double u) {
    const double z = lo + u;
    return x * detail::second_a(s, z) - y * detail::second_b(s, z);
  };
  auto [ulo, uhi] = bisect_sign(0.0, L, [&](double u) {
    if (u <= 0.0) return true;
    if (u >= L) return false;
    return g(u) > 0.0;
  });
  return lo + 0.5 * (ulo + uhi);
}

// gamma(x, y) = inf over z in (-frak_a, frak_b) of x A(z) + y B(z).
inline double gamma(const ShapeSpec& s, double x, double y) {
  detail::require_positive(x, y, "gamma");
  const auto& tp = s.tp;
  if (tp.mfa == kInf || tp.mfb == kInf) return 0.0;
  if (tp.alpha.is_zero() && tp.beta.is_zero()) return 0.0;
  if (tp.beta.is_zero()) return x * tp.A(tp.mfb);
  if (tp.alpha.is_zero()) return y * tp.B(-tp.mfa);
  const double z = gamma_argmin(s, x, y);
  return x * tp.A(z) + y * tp.B(z);
}

inline Region classify_region(const ShapeSpec& s, double x, double y) {
  detail::require_positive(x, y, "classify_region");
  const double lo = -s.tp.mfa;
  const double hi = s.tp.mfb;
  if (detail::scaled(x, detail::second_a(s, lo)) <= y * detail::second_b(s, lo)) return Region::FlatV;
  if (x * detail::second_a(s, hi) >= detail::scaled(y, detail::second_b(s, hi))) return Region::FlatH;
  return Region::Curved;
}

struct Point {
  double x;
  double y;
};

struct Segment {
  Point from;
  Point to;
};

struct BoundaryGeometry {
  std::vector<Point> curved;  // ordered from the y-axis side (z = -frak_a) to the x-axis side
  std::optional<Segment> flat_v;
  std::optional<Segment> flat_h;
  std::optional<Segment> spike_v;
  std::optional<Segment> spike_h;
  double intercept_v = 0.0;  // 1 / B(-frak_a)
  double intercept_h = 0.0;  // 1 / A(frak_b)
  bool degenerate = false;
};

// Phi(z) = (B'(z), -A'(z)) / (A(z) B'(z) - B(z) A'(z)).
inline Point boundary_point(const ShapeSpec& s, double z) {
  const double A = s.tp.A(z);
  const double B = s.tp.B(z);
  const double dA = s.tp.dA(z);
  const double dB = s.tp.dB(z);
  const double den = A * dB - B * dA;
  return {dB / den, -dA / den};
}

// Boundary of {gamma <= 1}: the curved part sampled at cosine-spaced z, the
// flat segments next to the axes when the edge second moments are finite,
// and the axis spikes when frak_A > frak_a (resp. frak_B > frak_b).
// `truncation` bounds the half-line boundary of degenerate specs.
inline BoundaryGeometry boundary(const ShapeSpec& s, std::size_t samples, double truncation = 1.0) {
  if (samples < 2) throw DomainError("boundary: need at least 2 samples");
  const auto& tp = s.tp;
  BoundaryGeometry g;
  if (s.degenerate()) {
    if (tp.alpha.is_zero() && tp.beta.is_zero()) {
      throw DomainError("boundary: both measures are zero, the region is the whole quadrant");
    }
    g.degenerate = true;
    if (tp.beta.is_zero()) {
      const double x0 = 1.0 / tp.A(tp.mfb);
      g.intercept_h = x0;
      g.curved = {{x0, 0.0}, {x0, truncation}};
    } else {
      const double y0 = 1.0 / tp.B(-tp.mfa);
      g.intercept_v = y0;
      g.curved = {{0.0, y0}, {truncation, y0}};
    }
    return g;
  }
  if (tp.mfa == kInf || tp.mfb == kInf) {
    throw DomainError("boundary: gamma vanishes identically, no finite boundary");
  }
  const double lo = -tp.mfa;
  const double hi = tp.mfb;
  g.intercept_v = 1.0 / tp.B(lo);
  g.intercept_h = 1.0 / tp.A(hi);
  const bool left_finite = std::isfinite(detail::second_a(s, lo));
  const bool right_finite = std::isfinite(detail::second_b(s, hi));

  g.curved.reserve(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    if (k == 0) {
      g.curved.push_back(left_finite ? boundary_point(s, lo) : Point{0.0, g.intercept_v});
      continue;
    }
    if (k + 1 == samples) {
      g.curved.push_back(right_finite ? boundary_point(s, hi) : Point{g.intercept_h, 0.0});
      continue;
    }
    const double w = 0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(k) /
                                            static_cast<double>(samples - 1)));
    g.curved.push_back(boundary_point(s, lo + w * (hi - lo)));
  }
  if (left_finite) g.flat_v = Segment{{0.0, g.intercept_v}, g.curved.front()};
  if (right_finite) g.flat_h = Segment{{g.intercept_h, 0.0}, g.curved.back()};
  if (s.frakA > tp.mfa) g.spike_v = Segment{{0.0, g.intercept_v}, {0.0, 1.0 / tp.B(-s.frakA)}};
  if (s.frakB > tp.mfb) g.spike_h = Segment{{g.intercept_h, 0.0}, {1.0 / tp.A(s.frakB), 0.0}};
  return g;
}

// Membership in {gamma <= 1} together with the axis segments
// {x A(frak_B) <= 1} and {y B(-frak_A) <= 1}.
inline bool in_limit_shape(const ShapeSpec& s, double x, double y) {
  if (x < 0.0 || y < 0.0) return false;
  if (x == 0.0 && y == 0.0) return true;
  if (y == 0.0) return detail::scaled(x, s.tp.A(s.frakB)) <= 1.0;
  if (x == 0.0) return detail::scaled(y, s.tp.B(-s.frakA)) <= 1.0;
  return gamma(s, x, y) <= 1.0;
}

enum class Axis { Vertical, Horizontal };

struct SpikeCrevice {
  enum class Kind { None, Spike, Crevice } kind = Kind::None;
  double from = 0.0;  // coordinate along the axis
  double to = 0.0;
};

// Persistent spike or crevice next to the axis of a column (vertical) whose
// running minimum is min_a_m, or of a row (horizontal) with min b_n.
inline SpikeCrevice spike_crevice_segment(const ShapeSpec& s, double running_min, Axis axis) {
  const auto& tp = s.tp;
  double limit = 0.0;
  double at_limit = 0.0;
  double at_min = 0.0;
  if (axis == Axis::Vertical) {
    if (tp.beta.is_zero()) throw DomainError("spike_crevice_segment: beta must be nonzero");
    if (!(running_min + tp.mfb > 0.0)) throw DomainError("spike_crevice_segment: min a_m + frak_b must be > 0");
    limit = tp.mfa;
    at_limit = 1.0 / tp.B(-tp.mfa);
    at_min = 1.0 / tp.B(-running_min);
  } else {
    if (tp.alpha.is_zero()) throw DomainError("spike_crevice_segment: alpha must be nonzero");
    if (!(running_min + tp.mfa > 0.0)) throw DomainError("spike_crevice_segment: min b_n + frak_a must be > 0");
    limit = tp.mfb;
    at_limit = 1.0 / tp.A(tp.mfb);
    at_min = 1.0 / tp.A(running_min);
  }
  SpikeCrevice r;
  if (running_min > limit) {
    r = {SpikeCrevice::Kind::Spike, at_limit, at_min};
  } else if (running_min < limit) {
    r = {SpikeCrevice::Kind::Crevice, at_min, at_limit};
  }
  return r;
}

namespace detail {

// sup over z in (-frak_a, frak_b) of num(z)/den(z) where the endpoint values
// are the one-sided limits. Golden section on the unit parameter.
template <class Obj>
double sup_over_interval(const ShapeSpec& s, Obj&& obj) {
  const double lo = -s.tp.mfa;
  const double L = s.tp.mfa + s.tp.mfb;
  auto f = [&](double w) {
    const double z = w <= 0.0 ? lo : (w >= 1.0 ? s.tp.mfb : lo + w * L);
    return obj(z);
  };
  return golden_section_max(f, 0.0, 1.0, 1e-14).value;
}

template <class Obj>
double sup_dense_scan(const ShapeSpec& s, Obj&& obj, std::size_t points) {
  const double lo = -s.tp.mfa;
  const double L = s.tp.mfa + s.tp.mfb;
  double best = -kInf;
  for (std::size_t k = 0; k <= points; ++k) {
    const double w = static_cast<double>(k) / static_cast<double>(points);
    const double z = k == 0 ? lo : (k == points ? s.tp.mfb : lo + w * L);
    best = std::max(best, obj(z));
  }
  return best;
}

// (t - y B(z)) / A(z) with extended-real endpoint conventions.
inline double height_objective(const ShapeSpec& s, double y, double t, double z) {
  const double A = s.tp.A(z);
  const double B = s.tp.B(z);
  const double num = t - scaled(y, B);
  if (num == -kInf) return -kInf;
  if (A == kInf) return 0.0;
  return num / A;
}

// (t - x A(z)) / (A(z) + B(z)).
inline double flux_objective(const ShapeSpec& s, double x, double t, double z) {
  const double A = s.tp.A(z);
  const double B = s.tp.B(z);
  const double num = t - scaled(x, A);
  if (num == -kInf) return -kInf;
  if (A + B == kInf) return 0.0;
  return num / (A + B);
}

inline void require_nondegenerate(const ShapeSpec& s, const char* who) {
  if (s.degenerate()) {
    std::ostringstream os;
    os << who << ": alpha and beta must both be nonzero";
    throw DomainError(os.str());
  }
}

}  // namespace detail

inline double limit_height(const ShapeSpec& s, double y, double t) {
  detail::require_nondegenerate(s, "limit_height");
  if (y < 0.0 || t < 0.0) throw DomainError("limit_height: need y, t >= 0");
  const double v = detail::sup_over_interval(s, [&](double z) { return detail::height_objective(s, y, t, z); });
  return std::max(v, 0.0);
}

inline double limit_flux(const ShapeSpec& s, double x, double t) {
  detail::require_nondegenerate(s, "limit_flux");
  if (x < 0.0 || t < 0.0) throw DomainError("limit_flux: need x, t >= 0");
  const double v = detail::sup_over_interval(s, [&](double z) { return detail::flux_objective(s, x, t, z); });
  return std::max(v, 0.0);
}

// Dense-grid versions of the two suprema; used to cross-check the
// golden-section answers, whose unimodality assumption is not proved.
inline double limit_height_scan(const ShapeSpec& s, double y, double t, std::size_t points = 4000) {
  detail::require_nondegenerate(s, "limit_height_scan");
  return std::max(0.0, detail::sup_dense_scan(s, [&](double z) { return detail::height_objective(s, y, t, z); }, points));
}

inline double limit_flux_scan(const ShapeSpec& s, double x, double t, std::size_t points = 4000) {
  detail::require_nondegenerate(s, "limit_flux_scan");
  return std::max(0.0, detail::sup_dense_scan(s, [&](double z) { return detail::flux_objective(s, x, t, z); }, points));
}

enum class NarrowSide { Column, Row };

// Growth rate along a fixed column (A(min b_n); the fixed row's height
// grows at speed 1 / A(min b_n)) or a fixed row (B(-min a_m)).
inline double narrow_rate(const TransformPair& tp, double fixed_min, NarrowSide side) {
  if (side == NarrowSide::Column) {
    if (!(fixed_min + tp.alpha.inf_supp() > 0.0)) {
      throw DomainError("narrow_rate: need inf supp alpha + min b_n > 0");
    }
    return tp.A(fixed_min);
  }
  if (!(fixed_min + tp.beta.inf_supp() > 0.0)) {
    throw DomainError("narrow_rate: need inf supp beta + min a_m > 0");
  }
  return tp.B(-fixed_min);
}

}  // namespace cgm
