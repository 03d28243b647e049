#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cgm/error.hpp"
#include "cgm/params.hpp"
#include "cgm/rng.hpp"

namespace cgm {

inline int resolve_threads(int threads) {
#ifdef _OPENMP
  return threads > 0 ? threads : omp_get_max_threads();
#else
  (void)threads;
  return 1;
#endif
}

struct Budget {
  std::uint64_t max_cells = 100'000'000;  // full-storage cells per grid
  std::uint64_t max_work = 2'000'000'000;  // cell updates for per-point evaluation
};

inline void check_cells(std::size_t m, std::size_t n, const Budget& budget, const char* who) {
  const long double cells = static_cast<long double>(m) * static_cast<long double>(n);
  if (cells > static_cast<long double>(budget.max_cells)) {
    std::ostringstream os;
    os << who << ": " << m << "x" << n << " grid exceeds the memory budget of " << budget.max_cells
       << " cells; use rolling storage or a smaller extent";
    throw ResourceError(os.str());
  }
}

// Weights w(i, j) for 1 <= i <= m, 1 <= j <= n, stored row by row (j outer).
struct WeightGrid {
  std::size_t m = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::uint64_t grid_id = 0;
  std::vector<double> w;

  double operator()(std::size_t i, std::size_t j) const { return w[(j - 1) * m + (i - 1)]; }
  double& operator()(std::size_t i, std::size_t j) { return w[(j - 1) * m + (i - 1)]; }

  static WeightGrid from_values(std::size_t m, std::size_t n, std::vector<double> values) {
    if (m == 0 || n == 0 || values.size() != m * n) throw DomainError("WeightGrid: size mismatch");
    WeightGrid g;
    g.m = m;
    g.n = n;
    g.w = std::move(values);
    return g;
  }
};

// Rates a_m(i) + b_n(j) of the (m, n) collection, split into the two rows.
struct RateRows {
  std::vector<double> a;
  std::vector<double> b;

  static RateRows of(const ParamPair& pp, std::size_t m, std::size_t n) {
    pp.check_positivity(m, n);
    return {pp.a().row(m), pp.b().row(n)};
  }
};

inline WeightGrid sample_weights(const ParamPair& pp, std::size_t m, std::size_t n, std::uint64_t seed,
                                 std::uint64_t grid_id, const Budget& budget = {}) {
  if (m == 0 || n == 0) throw RangeError("sample_weights: need m, n >= 1");
  check_cells(m, n, budget, "sample_weights");
  const RateRows r = RateRows::of(pp, m, n);
  const CellRng rng(seed, grid_id);
  WeightGrid g;
  g.m = m;
  g.n = n;
  g.seed = seed;
  g.grid_id = grid_id;
  g.w.resize(m * n);
  for (std::size_t j = 1; j <= n; ++j) {
    for (std::size_t i = 1; i <= m; ++i) {
      g(i, j) = rng.exp1(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)) / (r.a[i - 1] + r.b[j - 1]);
    }
  }
  return g;
}

enum class Storage { Full, Rolling };

// G(i, j) of the recursion. Full storage keeps everything; rolling keeps
// the last row G(., n) and the last column G(m, .).
class LppGrid {
 public:
  LppGrid() = default;
  LppGrid(std::size_t m, std::size_t n, Storage mode) : m_(m), n_(n), mode_(mode) {
    if (mode == Storage::Full) {
      g_.assign(m * n, 0.0);
    } else {
      last_row_.assign(m, 0.0);
      last_col_.assign(n, 0.0);
    }
  }

  std::size_t m() const noexcept { return m_; }
  std::size_t n() const noexcept { return n_; }
  Storage mode() const noexcept { return mode_; }

  // G(i, j) with G = 0 when i = 0 or j = 0. Full storage only.
  double operator()(std::size_t i, std::size_t j) const {
    if (i == 0 || j == 0) return 0.0;
    if (mode_ != Storage::Full) throw DomainError("LppGrid: interior access needs full storage");
    return g_[(j - 1) * m_ + (i - 1)];
  }

  double corner() const { return mode_ == Storage::Full ? g_.back() : last_row_.back(); }

  // G(i, n) for i = 1..m.
  std::vector<double> last_row() const {
    if (mode_ == Storage::Rolling) return last_row_;
    return {g_.end() - static_cast<std::ptrdiff_t>(m_), g_.end()};
  }

  // G(m, j) for j = 1..n.
  std::vector<double> last_col() const {
    if (mode_ == Storage::Rolling) return last_col_;
    std::vector<double> c(n_);
    for (std::size_t j = 1; j <= n_; ++j) c[j - 1] = g_[(j - 1) * m_ + (m_ - 1)];
    return c;
  }

  std::uint64_t checksum() const {
    Fnv1a h;
    h.add(m_);
    h.add(n_);
    if (mode_ == Storage::Full) {
      h.add_bytes(g_.data(), g_.size() * sizeof(double));
    } else {
      h.add_bytes(last_row_.data(), last_row_.size() * sizeof(double));
      h.add_bytes(last_col_.data(), last_col_.size() * sizeof(double));
    }
    return h.value();
  }

  std::vector<double>& raw() noexcept { return g_; }
  const std::vector<double>& raw() const noexcept { return g_; }
  std::vector<double>& raw_last_row() noexcept { return last_row_; }
  std::vector<double>& raw_last_col() noexcept { return last_col_; }

 private:
  std::size_t m_ = 0;
  std::size_t n_ = 0;
  Storage mode_ = Storage::Full;
  std::vector<double> g_;
  std::vector<double> last_row_;
  std::vector<double> last_col_;
};

namespace detail {

inline constexpr std::size_t kBlock = 256;

// Blocked anti-diagonal wavefront. Blocks on one block-diagonal are
// independent; each cell is written exactly once from values that are
// already final, so the result does not depend on the schedule.
template <class W>
void wavefront(std::size_t m, std::size_t n, std::vector<double>& g, W&& weight, int threads) {
  const std::size_t bm = (m + kBlock - 1) / kBlock;
  const std::size_t bn = (n + kBlock - 1) / kBlock;
  auto run_block = [&](std::size_t bi, std::size_t bj) {
    const std::size_t i0 = bi * kBlock + 1;
    const std::size_t i1 = std::min(m, i0 + kBlock - 1);
    const std::size_t j0 = bj * kBlock + 1;
    const std::size_t j1 = std::min(n, j0 + kBlock - 1);
    for (std::size_t j = j0; j <= j1; ++j) {
      double* row = g.data() + (j - 1) * m;
      const double* below = j > 1 ? g.data() + (j - 2) * m : nullptr;
      for (std::size_t i = i0; i <= i1; ++i) {
        const double down = below ? below[i - 1] : 0.0;
        const double left = i > 1 ? row[i - 2] : 0.0;
        row[i - 1] = std::max(down, left) + weight(i, j);
      }
    }
  };
  const int nt = resolve_threads(threads);
  for (std::size_t d = 0; d + 1 < bm + bn; ++d) {
    const std::size_t lo = d >= bn ? d - bn + 1 : 0;
    const std::size_t hi = std::min(d, bm - 1);
    const auto count = static_cast<std::ptrdiff_t>(hi - lo + 1);
    if (nt <= 1 || count == 1) {
      for (std::size_t bi = lo; bi <= hi; ++bi) run_block(bi, d - bi);
    } else {
#ifdef _OPENMP
#pragma omp parallel for num_threads(nt) schedule(static)
#endif
      for (std::ptrdiff_t k = 0; k < count; ++k) {
        const std::size_t bi = lo + static_cast<std::size_t>(k);
        run_block(bi, d - bi);
      }
    }
  }
}

template <class W>
LppGrid forward(std::size_t m, std::size_t n, W&& weight, Storage mode, int threads) {
  LppGrid out(m, n, mode);
  if (mode == Storage::Full) {
    wavefront(m, n, out.raw(), weight, threads);
    return out;
  }
  std::vector<double>& row = out.raw_last_row();
  std::vector<double>& col = out.raw_last_col();
  for (std::size_t j = 1; j <= n; ++j) {
    double left = 0.0;
    for (std::size_t i = 1; i <= m; ++i) {
      left = std::max(row[i - 1], left) + weight(i, j);
      row[i - 1] = left;
    }
    col[j - 1] = left;
  }
  return out;
}

}  // namespace detail

inline LppGrid lpp_forward(const WeightGrid& wg, Storage mode = Storage::Full, int threads = 0) {
  if (wg.m == 0 || wg.n == 0) throw RangeError("lpp_forward: empty grid");
  return detail::forward(wg.m, wg.n, [&](std::size_t i, std::size_t j) { return wg(i, j); }, mode, threads);
}

// Weights generated on the fly, identical to sample_weights followed by
// lpp_forward but without materializing w.
inline LppGrid lpp_grid(const ParamPair& pp, std::size_t m, std::size_t n, std::uint64_t seed,
                        std::uint64_t grid_id, Storage mode = Storage::Full, int threads = 0,
                        const Budget& budget = {}) {
  if (m == 0 || n == 0) throw RangeError("lpp_grid: need m, n >= 1");
  if (mode == Storage::Full) check_cells(m, n, budget, "lpp_grid");
  const RateRows r = RateRows::of(pp, m, n);
  const CellRng rng(seed, grid_id);
  auto weight = [&](std::size_t i, std::size_t j) {
    return rng.exp1(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)) / (r.a[i - 1] + r.b[j - 1]);
  };
  return detail::forward(m, n, weight, mode, threads);
}

// G(m, n) from its own weight collection, grid_id = (m << 32) | n.
inline double lpp_point(const ParamPair& pp, std::size_t m, std::size_t n, std::uint64_t seed) {
  return lpp_grid(pp, m, n, seed, point_grid_id(m, n), Storage::Rolling, 1).corner();
}

// G(m, n) for all 1 <= m <= M, 1 <= n <= N, stored row by row.
class LppField {
 public:
  LppField() = default;
  LppField(std::size_t M, std::size_t N) : M_(M), N_(N), g_(M * N, 0.0) {}

  std::size_t M() const noexcept { return M_; }
  std::size_t N() const noexcept { return N_; }
  double operator()(std::size_t m, std::size_t n) const { return g_[(n - 1) * M_ + (m - 1)]; }
  double& operator()(std::size_t m, std::size_t n) { return g_[(n - 1) * M_ + (m - 1)]; }
  const std::vector<double>& raw() const noexcept { return g_; }

  std::uint64_t checksum() const {
    Fnv1a h;
    h.add(M_);
    h.add(N_);
    h.add_bytes(g_.data(), g_.size() * sizeof(double));
    return h.value();
  }

 private:
  std::size_t M_ = 0;
  std::size_t N_ = 0;
  std::vector<double> g_;
};

// Shared-sample evaluation: one Exp(1) sample E(i, j) for the whole field,
// rescaled per (m, n) by the rates of that collection. Rows m in one regime
// share the parameter prefix, so one DP per (a-regime, b-regime) pair
// yields G(m, n) for every (m, n) in the pair.
inline LppField lpp_field(const ParamPair& pp, std::size_t M, std::size_t N, std::uint64_t seed,
                          std::uint64_t grid_id, int threads = 0, const Budget& budget = {}) {
  if (M == 0 || N == 0) throw RangeError("lpp_field: need M, N >= 1");
  check_cells(M, N, budget, "lpp_field");
  pp.check_positivity(M, N);
  std::vector<RowRegime> ra;
  std::vector<RowRegime> rb;
  for (const auto& r : pp.a().regimes()) {
    if (r.lo <= M) ra.push_back({r.lo, std::min(r.hi, M)});
  }
  for (const auto& r : pp.b().regimes()) {
    if (r.lo <= N) rb.push_back({r.lo, std::min(r.hi, N)});
  }
  long double work = 0.0L;
  for (const auto& x : ra) {
    for (const auto& y : rb) work += static_cast<long double>(x.hi) * static_cast<long double>(y.hi);
  }
  if (work > static_cast<long double>(budget.max_work)) {
    throw ResourceError("lpp_field: too many parameter regimes for the work budget; reduce the extent");
  }
  LppField field(M, N);
  for (const auto& x : ra) {
    for (const auto& y : rb) {
      const LppGrid g = lpp_grid(pp, x.hi, y.hi, seed, grid_id, Storage::Full, threads, budget);
      for (std::size_t n = y.lo; n <= y.hi; ++n) {
        for (std::size_t m = x.lo; m <= x.hi; ++m) field(m, n) = g(m, n);
      }
    }
  }
  return field;
}

// Every G(m, n) from its own independent collection (lpp_point).
inline LppField lpp_field_independent(const ParamPair& pp, std::size_t M, std::size_t N, std::uint64_t seed,
                                      const Budget& budget = {}) {
  if (M == 0 || N == 0) throw RangeError("lpp_field_independent: need M, N >= 1");
  const long double work = static_cast<long double>(M) * (M + 1) / 2 * static_cast<long double>(N) * (N + 1) / 2;
  if (work > static_cast<long double>(budget.max_work)) {
    throw ResourceError("lpp_field_independent: extent too large for per-point evaluation");
  }
  check_cells(M, N, budget, "lpp_field_independent");
  LppField field(M, N);
  for (std::size_t n = 1; n <= N; ++n) {
    for (std::size_t m = 1; m <= M; ++m) field(m, n) = lpp_point(pp, m, n, seed);
  }
  return field;
}

// Increment-stationary process on {0..m} x {0..n}.
class StationaryGrid {
 public:
  // hor[i-1] = w(i, 0), ver[j-1] = w(0, j).
  StationaryGrid(double z, const std::vector<double>& hor, const std::vector<double>& ver, const WeightGrid& bulk)
      : z_(z), m_(bulk.m), n_(bulk.n), g_((bulk.m + 1) * (bulk.n + 1), 0.0) {
    if (hor.size() != m_ || ver.size() != n_) throw DomainError("StationaryGrid: boundary size mismatch");
    for (std::size_t i = 1; i <= m_; ++i) at(i, 0) = at(i - 1, 0) + hor[i - 1];
    for (std::size_t j = 1; j <= n_; ++j) at(0, j) = at(0, j - 1) + ver[j - 1];
    for (std::size_t j = 1; j <= n_; ++j) {
      for (std::size_t i = 1; i <= m_; ++i) at(i, j) = std::max(at(i - 1, j), at(i, j - 1)) + bulk(i, j);
    }
  }

  double z() const noexcept { return z_; }
  std::size_t m() const noexcept { return m_; }
  std::size_t n() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return g_[j * (m_ + 1) + i]; }

  // I(i, j) = G(i, j) - G(i-1, j), J(i, j) = G(i, j) - G(i, j-1).
  double I(std::size_t i, std::size_t j) const { return (*this)(i, j) - (*this)(i - 1, j); }
  double J(std::size_t i, std::size_t j) const { return (*this)(i, j) - (*this)(i, j - 1); }

 private:
  double& at(std::size_t i, std::size_t j) { return g_[j * (m_ + 1) + i]; }

  double z_;
  std::size_t m_;
  std::size_t n_;
  std::vector<double> g_;
};

inline void require_stationary_z(const ParamPair& pp, std::size_t m, std::size_t n, double z) {
  if (m == 0 || n == 0) throw RangeError("stationary_grid: need m, n >= 1");
  pp.check_positivity(m, n);
  const double lo = -pp.a().row_min(m);
  const double hi = pp.b().row_min(n);
  if (!(z > lo && z < hi)) {
    std::ostringstream os;
    os << "stationary_grid: z = " << z << " outside (" << lo << ", " << hi << ")";
    throw DomainError(os.str());
  }
}

// Boundary weights w(i, 0) ~ Exp(a_m(i) + z) and w(0, j) ~ Exp(b_n(j) - z)
// drawn from cells (i, 0), (0, j) of the same counter space as the bulk,
// so the bulk coincides with lpp_grid(..., grid_id).
inline StationaryGrid stationary_grid(const ParamPair& pp, std::size_t m, std::size_t n, double z,
                                      std::uint64_t seed, std::uint64_t grid_id, const Budget& budget = {}) {
  require_stationary_z(pp, m, n, z);
  const WeightGrid bulk = sample_weights(pp, m, n, seed, grid_id, budget);
  const CellRng rng(seed, grid_id);
  std::vector<double> hor(m);
  std::vector<double> ver(n);
  for (std::size_t i = 1; i <= m; ++i) hor[i - 1] = rng.exp1(static_cast<std::uint32_t>(i), 0) / (pp.a().value(m, i) + z);
  for (std::size_t j = 1; j <= n; ++j) ver[j - 1] = rng.exp1(0, static_cast<std::uint32_t>(j)) / (pp.b().value(n, j) - z);
  return StationaryGrid(z, hor, ver, bulk);
}

struct ExitPoints {
  std::size_t hor = 0;
  std::size_t ver = 0;
};

// Exit points by backtracking through the computed values, which compares
// exactly the floating-point numbers the recursion produced. Preferring the
// step down on ties follows the lowest geodesic, which leaves the x-axis
// furthest out; preferring left gives the vertical analog.
inline ExitPoints exit_points(const StationaryGrid& sg, std::size_t m, std::size_t n) {
  if (m < 1 || n < 1 || m > sg.m() || n > sg.n()) throw RangeError("exit_points: (m, n) outside the grid");
  auto walk = [&](bool prefer_down) {
    std::size_t i = m;
    std::size_t j = n;
    while (i > 0 && j > 0) {
      const double down = sg(i, j - 1);
      const double left = sg(i - 1, j);
      const bool go_down = prefer_down ? down >= left : down > left;
      if (go_down) {
        --j;
      } else {
        --i;
      }
    }
    return std::pair{i, j};
  };
  ExitPoints e;
  const auto [hi, hj] = walk(true);
  if (hj == 0) e.hor = hi;
  const auto [vi, vj] = walk(false);
  if (vi == 0) e.ver = vj;
  return e;
}

// Cells (i, j) of [M] x [N] with G(i, j) <= t.
class ClusterRaster {
 public:
  ClusterRaster(const LppField& f, double t) : M_(f.M()), N_(f.N()), t_(t), cells_(f.M() * f.N()) {
    for (std::size_t k = 0; k < cells_.size(); ++k) cells_[k] = f.raw()[k] <= t ? 1 : 0;
    for (std::size_t n = 1; n <= N_ && !touches_edge_; ++n) touches_edge_ = (*this)(M_, n);
    for (std::size_t m = 1; m <= M_ && !touches_edge_; ++m) touches_edge_ = (*this)(m, N_);
  }

  std::size_t M() const noexcept { return M_; }
  std::size_t N() const noexcept { return N_; }
  double t() const noexcept { return t_; }
  bool operator()(std::size_t i, std::size_t j) const { return cells_[(j - 1) * M_ + (i - 1)] != 0; }
  // The cluster reaches the last row or column, so it may extend further.
  bool touches_edge() const noexcept { return touches_edge_; }

  std::size_t count() const {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), 1));
  }

  // Binary PGM with maxval 1, 1 = in the cluster, top image row is j = N.
  std::string pgm() const {
    std::ostringstream os;
    os << "P5\n" << M_ << " " << N_ << "\n1\n";
    std::string body(M_ * N_, '\0');
    for (std::size_t r = 0; r < N_; ++r) {
      const std::size_t j = N_ - r;
      for (std::size_t i = 1; i <= M_; ++i) body[r * M_ + (i - 1)] = (*this)(i, j) ? '\1' : '\0';
    }
    os << body;
    return os.str();
  }

  // Runs of in-cluster cells: j, first i, length.
  std::string run_length_csv() const {
    std::ostringstream os;
    os << "j,i_start,length\n";
    for (std::size_t j = 1; j <= N_; ++j) {
      std::size_t i = 1;
      while (i <= M_) {
        if (!(*this)(i, j)) {
          ++i;
          continue;
        }
        const std::size_t s = i;
        while (i <= M_ && (*this)(i, j)) ++i;
        os << j << "," << s << "," << (i - s) << "\n";
      }
    }
    return os.str();
  }

 private:
  std::size_t M_;
  std::size_t N_;
  double t_;
  std::vector<unsigned char> cells_;
  bool touches_edge_ = false;
};

inline ClusterRaster cluster(const LppField& f, double t) {
  if (t < 0.0) throw DomainError("cluster: t must be >= 0");
  return ClusterRaster(f, t);
}

}  // namespace cgm
