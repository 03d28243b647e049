#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace cgm {

// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
// Counter-based, so every cell's variate is a pure function of
// (key, counter) and generation order never matters.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter apply(Counter ctr, Key key) noexcept {
    for (int r = 0; r < 10; ++r) {
      if (r > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      ctr = round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;

  static Counter round(const Counter& c, const Key& k) noexcept {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

// Per-cell variates keyed on (seed, grid_id, i, j).
class CellRng {
 public:
  CellRng(std::uint64_t seed, std::uint64_t grid_id) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        gid_lo_(static_cast<std::uint32_t>(grid_id)),
        gid_hi_(static_cast<std::uint32_t>(grid_id >> 32)) {}

  Philox4x32::Counter raw(std::uint32_t i, std::uint32_t j) const noexcept {
    return Philox4x32::apply({i, j, gid_lo_, gid_hi_}, key_);
  }

  // U in [0, 1) with 53 random bits.
  double uniform(std::uint32_t i, std::uint32_t j) const noexcept {
    const auto r = raw(i, j);
    const std::uint64_t bits = (static_cast<std::uint64_t>(r[0]) << 32 | r[1]) >> 11;
    return static_cast<double>(bits) * 0x1.0p-53;
  }

  // Unit-rate exponential by inversion, -log(1 - U).
  double exp1(std::uint32_t i, std::uint32_t j) const noexcept { return -std::log1p(-uniform(i, j)); }

 private:
  Philox4x32::Key key_;
  std::uint32_t gid_lo_;
  std::uint32_t gid_hi_;
};

// Grid identifiers. lpp_point uses (m << 32) | n directly; replica streams
// set the top bit so the two spaces never overlap.
inline std::uint64_t point_grid_id(std::uint64_t m, std::uint64_t n) noexcept { return (m << 32) | n; }

inline std::uint64_t stream_grid_id(std::uint64_t stream, std::uint64_t index) noexcept {
  return (std::uint64_t{1} << 63) | ((stream & 0x7FFFFFu) << 40) | (index & ((std::uint64_t{1} << 40) - 1));
}

// 64-bit FNV-1a, used for grid and artifact checksums.
class Fnv1a {
 public:
  void add_bytes(const void* data, std::size_t len) noexcept {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < len; ++k) {
      h_ ^= p[k];
      h_ *= 0x100000001b3ull;
    }
  }
  template <class T>
  void add(const T& v) noexcept {
    add_bytes(&v, sizeof(T));
  }
  std::uint64_t value() const noexcept { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ull;
};

}  // namespace cgm
