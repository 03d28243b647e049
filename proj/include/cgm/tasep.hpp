#pragma once

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <vector>

#include "cgm/error.hpp"
#include "cgm/lpp.hpp"
#include "cgm/params.hpp"

namespace cgm {

// Height H(n, t) = max{m : G(m, n) <= t}, 0 if none. Scans every m since
// G(., n) need not be monotone for m-dependent parameters.
inline std::size_t height(const LppField& f, std::size_t n, double t) {
  if (n < 1 || n > f.N()) throw RangeError("height: n outside the field");
  if (t < 0.0) throw DomainError("height: t must be >= 0");
  if (f(f.M(), n) <= t) {
    std::ostringstream os;
    os << "height: G(" << f.M() << ", " << n << ") <= t = " << t << ", the field is too narrow";
    throw InsufficientExtent(os.str());
  }
  std::size_t h = 0;
  for (std::size_t m = 1; m <= f.M(); ++m) {
    if (f(m, n) <= t) h = m;
  }
  return h;
}

// Flux F(m, t) = max{j : G(m + j - 1, j) <= t}, 0 if none.
inline std::size_t flux(const LppField& f, std::size_t m, double t) {
  if (m < 1 || m > f.M()) throw RangeError("flux: m outside the field");
  if (t < 0.0) throw DomainError("flux: t must be >= 0");
  const std::size_t jmax = std::min(f.N(), f.M() - m + 1);
  if (f(m + jmax - 1, jmax) <= t) {
    std::ostringstream os;
    os << "flux: diagonal from site " << m << " leaves the field before G exceeds t = " << t;
    throw InsufficientExtent(os.str());
  }
  std::size_t F = 0;
  for (std::size_t j = 1; j <= jmax; ++j) {
    if (f(m + j - 1, j) <= t) F = j;
  }
  return F;
}

struct TasepFrame {
  double t = 0.0;
  std::vector<std::size_t> H;       // H[n-1]
  std::vector<long long> sigma;     // H(n) - n + 1
  std::vector<std::size_t> F;       // F[m-1]
};

// Heights for n = 1..n_max and fluxes for m = 1..m_max from one field.
inline TasepFrame tasep_frame(const LppField& f, double t, std::size_t n_max, std::size_t m_max) {
  TasepFrame fr;
  fr.t = t;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const std::size_t h = height(f, n, t);
    fr.H.push_back(h);
    fr.sigma.push_back(static_cast<long long>(h) - static_cast<long long>(n) + 1);
  }
  for (std::size_t m = 1; m <= m_max; ++m) fr.F.push_back(flux(f, m, t));
  return fr;
}

namespace detail {

inline void require_m_independent(const ParamPair& pp, const char* who) {
  if (!pp.m_independent()) {
    std::ostringstream os;
    os << who << ": the particle picture needs parameters that do not depend on (m, n)";
    throw InvalidParameters(os.str());
  }
}

}  // namespace detail

// Height from a rolling grid of width M, doubling M until G(M, n) > t.
// The weights of cell (i, j) do not depend on M for m-independent
// parameters, so wider grids extend the same realization.
inline std::size_t height_auto(const ParamPair& pp, std::size_t n, double t, std::uint64_t seed,
                               std::uint64_t grid_id, std::size_t start = 64) {
  detail::require_m_independent(pp, "height_auto");
  const std::size_t cap = std::min(pp.a().cap(), pp.b().cap());
  if (n > cap) throw RangeError("height_auto: n exceeds the parameter cap");
  std::size_t M = std::min(std::max<std::size_t>(start, 1), pp.a().cap());
  for (;;) {
    const LppGrid g = lpp_grid(pp, M, n, seed, grid_id, Storage::Rolling, 1);
    const auto row = g.last_row();
    if (row.back() > t) {
      return static_cast<std::size_t>(std::upper_bound(row.begin(), row.end(), t) - row.begin());
    }
    if (M == pp.a().cap()) throw InsufficientExtent("height_auto: parameter cap reached before G exceeds t");
    M = std::min(2 * M, pp.a().cap());
  }
}

// Flux along the diagonal i = m + j - 1, on a full grid doubled as needed.
inline std::size_t flux_auto(const ParamPair& pp, std::size_t m, double t, std::uint64_t seed,
                             std::uint64_t grid_id, std::size_t start = 64, int threads = 0) {
  detail::require_m_independent(pp, "flux_auto");
  std::size_t J = std::max<std::size_t>(start, 1);
  for (;;) {
    const std::size_t M = m + J - 1;
    if (M > pp.a().cap() || J > pp.b().cap()) {
      throw InsufficientExtent("flux_auto: parameter cap reached before G exceeds t");
    }
    const LppGrid g = lpp_grid(pp, M, J, seed, grid_id, Storage::Full, threads);
    if (g(M, J) > t) {
      std::size_t F = 0;
      for (std::size_t j = 1; j <= J; ++j) {
        if (g(m + j - 1, j) <= t) F = j;
      }
      return F;
    }
    J *= 2;
  }
}

struct TrajectoryPoint {
  double t;
  std::size_t H;
  long long sigma;
};

// Particle n along t_grid, all from one realization.
inline std::vector<TrajectoryPoint> trajectory(const ParamPair& pp, std::size_t n, const std::vector<double>& t_grid,
                                               std::uint64_t seed, std::uint64_t grid_id) {
  detail::require_m_independent(pp, "trajectory");
  if (t_grid.empty()) return {};
  const double tmax = *std::max_element(t_grid.begin(), t_grid.end());
  std::size_t M = std::min<std::size_t>(64, pp.a().cap());
  std::vector<double> row;
  for (;;) {
    row = lpp_grid(pp, M, n, seed, grid_id, Storage::Rolling, 1).last_row();
    if (row.back() > tmax) break;
    if (M == pp.a().cap()) throw InsufficientExtent("trajectory: parameter cap reached before G exceeds t");
    M = std::min(2 * M, pp.a().cap());
  }
  std::vector<TrajectoryPoint> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    if (t < 0.0) throw DomainError("trajectory: t must be >= 0");
    const auto H = static_cast<std::size_t>(std::upper_bound(row.begin(), row.end(), t) - row.begin());
    out.push_back({t, H, static_cast<long long>(H) - static_cast<long long>(n) + 1});
  }
  return out;
}

}  // namespace cgm
