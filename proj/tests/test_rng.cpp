#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "cgm/lpp.hpp"
#include "cgm/rng.hpp"

using namespace cgm;

TEST(Rng, PhiloxKnownAnswers) {
  using C = Philox4x32::Counter;
  using K = Philox4x32::Key;
  EXPECT_EQ(Philox4x32::apply(C{0, 0, 0, 0}, K{0, 0}), (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::apply(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}),
            (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::apply(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}),
            (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Rng, ExponentialMean) {
  const CellRng rng(42, 7);
  double s = 0.0;
  const std::uint32_t side = 1000;
  for (std::uint32_t j = 1; j <= side; ++j) {
    for (std::uint32_t i = 1; i <= side; ++i) s += rng.exp1(i, j);
  }
  EXPECT_NEAR(s / (side * side), 1.0, 0.004);
}

TEST(Rng, RateTwoWeights) {
  const ParamPair pp(ParamFamily::constant(1.0, 400), ParamFamily::constant(1.0, 400));
  const auto g = sample_weights(pp, 400, 400, 9, 1);
  double s = 0.0;
  for (double w : g.w) s += w;
  const double n = static_cast<double>(g.w.size());
  EXPECT_NEAR(s / n, 0.5, 4 * 0.5 / std::sqrt(n));
}

TEST(Rng, Deterministic) {
  const ParamPair pp(ParamFamily::constant(0.5, 50), ParamFamily::constant(0.5, 50));
  const auto a = sample_weights(pp, 30, 20, 123, 5);
  const auto b = sample_weights(pp, 30, 20, 123, 5);
  const auto c = sample_weights(pp, 30, 20, 124, 5);
  const auto d = sample_weights(pp, 30, 20, 123, 6);
  EXPECT_EQ(a.w, b.w);
  EXPECT_NE(a.w, c.w);
  EXPECT_NE(a.w, d.w);
}

TEST(Rng, UniformRange) {
  const CellRng rng(0, 0);
  for (std::uint32_t i = 0; i < 10000; ++i) {
    const double u = rng.uniform(i, 3);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Rng, GridIdsDoNotCollide) {
  std::set<std::uint64_t> ids;
  for (std::uint64_t m = 1; m <= 20; ++m) {
    for (std::uint64_t n = 1; n <= 20; ++n) ids.insert(point_grid_id(m, n));
  }
  for (std::uint64_t s = 1; s <= 10; ++s) {
    for (std::uint64_t k = 0; k < 40; ++k) ids.insert(stream_grid_id(s, k));
  }
  EXPECT_EQ(ids.size(), 400u + 400u);
}

TEST(Rng, Fnv1aReference) {
  Fnv1a h;
  h.add_bytes("a", 1);
  EXPECT_EQ(h.value(), 0xaf63dc4c8601ec8cull);
}
