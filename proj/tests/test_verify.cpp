#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cgm/verify.hpp"

using namespace cgm;

namespace {

ParamPair unit_rate(std::size_t cap) {
  return ParamPair(ParamFamily::constant(0.5, cap), ParamFamily::constant(0.5, cap));
}

std::vector<double> exp_sample(double rate, std::size_t n, std::uint64_t seed) {
  const CellRng rng(seed, 0);
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = rng.exp1(static_cast<std::uint32_t>(k + 1), 1) / rate;
  return v;
}

}  // namespace

TEST(Verify, KsExponential) {
  const auto good = ks_exponential(exp_sample(1.5, 10000, 1), 1.5);
  EXPECT_TRUE(good.pass);
  EXPECT_NEAR(good.threshold, 1.95 / 100, 0.001);
  EXPECT_FALSE(ks_exponential(exp_sample(3.0, 10000, 2), 1.5).pass);
  const auto flat = ks_exponential(std::vector<double>(500, 0.7), 1.0);
  EXPECT_GT(flat.statistic, 0.4);
  EXPECT_FALSE(flat.pass);
  EXPECT_THROW(ks_exponential(std::vector<double>(10, 1.0), 1.0), DomainError);
  std::vector<double> bad(200, 1.0);
  bad[3] = -1.0;
  EXPECT_THROW(ks_exponential(bad, 1.0), DataError);
}

TEST(Verify, KsTwoSample) {
  const auto same = ks_two_sample(exp_sample(1.0, 5000, 3), exp_sample(1.0, 5000, 4));
  EXPECT_TRUE(same.pass);
  const auto diff = ks_two_sample(exp_sample(1.0, 5000, 3), exp_sample(1.3, 5000, 4));
  EXPECT_FALSE(diff.pass);
  const auto x = exp_sample(1.0, 1000, 9);
  EXPECT_EQ(ks_two_sample(x, x).statistic, 0.0);
}

TEST(Verify, Wilson) {
  const auto w = wilson_interval(0, 1000);
  EXPECT_EQ(w.lo, 0.0);
  EXPECT_GT(w.hi, 0.0);
  EXPECT_LT(w.hi, 0.02);
  const auto h = wilson_interval(500, 1000);
  EXPECT_LT(h.lo, 0.5);
  EXPECT_GT(h.hi, 0.5);
}

TEST(Verify, HausdorffSegments) {
  const double C = 2.0;
  const std::size_t K = 200;
  auto seg = [&](double len) {
    return RegionRaster::rasterize(K, C, [&](std::size_t k, std::size_t, double, double y) {
      return k == 0 && y <= len + 1e-12;
    });
  };
  const auto a = seg(1.0);
  const auto b = seg(2.0);
  EXPECT_EQ(hausdorff(a, a), 0.0);
  EXPECT_NEAR(hausdorff(a, b), 1.0, a.h());
}

TEST(Verify, HausdorffFattening) {
  const double C = 1.5;
  const std::size_t K = 150;
  const auto sq = RegionRaster::rasterize(K, C, [](std::size_t, std::size_t, double x, double y) {
    return x <= 1.0 + 1e-12 && y <= 1.0 + 1e-12;
  });
  const auto fat = RegionRaster::rasterize(K, C, [](std::size_t, std::size_t, double x, double y) {
    const double dx = std::max(0.0, x - 1.0);
    const double dy = std::max(0.0, y - 1.0);
    return std::hypot(dx, dy) <= 0.1 + 1e-12;
  });
  EXPECT_NEAR(hausdorff(sq, fat), 0.1, 2 * sq.h());
}

TEST(Verify, HausdorffMetric) {
  std::mt19937_64 gen(12);
  std::bernoulli_distribution coin(0.02);
  const std::size_t K = 40;
  auto random_raster = [&]() {
    RegionRaster r(K, 1.0);
    for (std::size_t l = 0; l <= K; ++l) {
      for (std::size_t k = 0; k <= K; ++k) r.set(k, l, coin(gen));
    }
    r.set(K / 2, K / 2, true);
    return r;
  };
  for (int rep = 0; rep < 30; ++rep) {
    const auto a = random_raster();
    const auto b = random_raster();
    const auto c = random_raster();
    EXPECT_EQ(hausdorff(a, b), hausdorff(b, a));
    EXPECT_LE(hausdorff(a, c), hausdorff(a, b) + hausdorff(b, c) + 1e-12);
  }
  EXPECT_THROW(hausdorff(RegionRaster(K, 1.0), random_raster()), DomainError);
  EXPECT_THROW(hausdorff(RegionRaster(K, 1.0), RegionRaster(K + 1, 1.0)), DomainError);
}

TEST(Verify, EdtMatchesBruteForce) {
  std::mt19937_64 gen(2);
  std::bernoulli_distribution coin(0.05);
  RegionRaster r(30, 1.0);
  for (std::size_t l = 0; l <= 30; ++l) {
    for (std::size_t k = 0; k <= 30; ++k) r.set(k, l, coin(gen));
  }
  r.set(0, 0, true);
  const auto d = detail::squared_distance_to(r);
  for (std::size_t l = 0; l <= 30; ++l) {
    for (std::size_t k = 0; k <= 30; ++k) {
      double best = 1e300;
      for (std::size_t q = 0; q <= 30; ++q) {
        for (std::size_t p = 0; p <= 30; ++p) {
          if (!r(p, q)) continue;
          const double dx = static_cast<double>(p) - static_cast<double>(k);
          const double dy = static_cast<double>(q) - static_cast<double>(l);
          best = std::min(best, dx * dx + dy * dy);
        }
      }
      EXPECT_EQ(d[l * 31 + k], best);
    }
  }
}

TEST(Verify, BurkeOneCell) {
  const auto pp = unit_rate(1);
  const auto r = burke_check(pp, 1, 1, 0.2, 5, {1}, {1}, 10000, std::nullopt, 1);
  ASSERT_EQ(r.streams.size(), 2u);
  EXPECT_DOUBLE_EQ(r.streams[0].rate, 0.7);
  EXPECT_DOUBLE_EQ(r.streams[1].rate, 0.3);
  EXPECT_TRUE(r.pass);
}

TEST(Verify, BurkeGridAndWrongReference) {
  const auto pp = unit_rate(20);
  const auto ok = burke_check(pp, 20, 20, 0.0, 6, {1, 10}, {1, 20}, 10000, std::nullopt, 1);
  EXPECT_TRUE(ok.pass);
  for (const auto& s : ok.streams) EXPECT_TRUE(s.lag1_pass);
  const auto bad = burke_check(pp, 20, 20, 0.0, 6, {1, 10}, {1, 20}, 10000, 0.3, 1);
  EXPECT_FALSE(bad.pass);
  EXPECT_THROW(burke_check(pp, 20, 20, 0.0, 6, {21}, {}, 1000), RangeError);
  EXPECT_THROW(burke_check(pp, 20, 20, 0.6, 6, {1}, {}, 1000), DomainError);
}

TEST(Verify, Permutation) {
  const ParamPair base(ParamFamily::row_constant({0.3, 0.7, 0.5}, 3), ParamFamily::row_constant({0.2, 0.4, 0.6}, 3));
  const ParamPair perm(ParamFamily::row_constant({0.5, 0.3, 0.7}, 3), ParamFamily::row_constant({0.6, 0.2, 0.4}, 3));
  const ParamPair changed(ParamFamily::row_constant({0.3, 0.7, 0.2}, 3), ParamFamily::row_constant({0.2, 0.4, 0.6}, 3));
  EXPECT_TRUE(permutation_check(base, perm, 3, 3, 1, 20000, false, 1).pass);
  EXPECT_EQ(permutation_check(base, base, 3, 3, 1, 2000, true, 1).statistic, 0.0);
  EXPECT_THROW(permutation_check(base, changed, 3, 3, 1, 2000), ValidationError);
  const auto neg = compare_point_laws(base, changed, 3, 3, 1, 20000, false, 1);
  EXPECT_FALSE(neg.pass);
}

TEST(Verify, Tails) {
  const auto pp = unit_rate(200);
  const auto r = tail_profile(pp, 200, 200, {0, 1, 2, 3}, 1000, TailSide::Right, 3, 0.0, 1);
  EXPECT_TRUE(r.monotone);
  // G(n, n) sits about 1.77 n^{1/3} 2^{4/3} below M = 4n, so P{G >= M} is small but positive.
  EXPECT_GT(r.rows[0].freq, 0.0);
  EXPECT_LT(r.rows[0].freq, 0.2);
  const auto l = tail_profile(pp, 200, 200, {0}, 1000, TailSide::Left, 3, -400.0, 1);
  EXPECT_EQ(l.rows[0].count, 0u);
  EXPECT_THROW(tail_profile(pp, 5, 5, {0}, 10, TailSide::Right, 3), DomainError);
}

TEST(Verify, Exits) {
  const auto pp = unit_rate(200);
  const auto e = exit_profile(pp, 200, 200, 4, 300, std::nullopt, 1);
  EXPECT_NEAR(e.z, 0.0, 1e-12);
  EXPECT_LE(e.median_max_exit, e.scale);
  EXPECT_EQ(e.both_positive, 0u);
  const auto one = exit_profile(unit_rate(1), 1, 1, 4, 200, std::nullopt, 1);
  for (const auto& [v, c] : one.hor) EXPECT_LE(v, 1u);
  EXPECT_EQ(one.hor.count(1) ? one.hor.at(1) : 0, one.ver.count(0) ? one.ver.at(0) : 0);
  // z near min b makes w(0, j) ~ Exp(b - z) huge, so geodesics leave through the y-axis.
  const auto up = exit_profile(unit_rate(60), 60, 60, 4, 200, 0.49, 1);
  std::size_t large = 0;
  for (const auto& [v, c] : up.ver) large += v >= 10 ? c : 0;
  EXPECT_GE(large, 150u);
  const auto right = exit_profile(unit_rate(60), 60, 60, 4, 200, -0.49, 1);
  large = 0;
  for (const auto& [v, c] : right.hor) large += v >= 10 ? c : 0;
  EXPECT_GE(large, 150u);
}

TEST(Verify, ExpSum) {
  const std::vector<double> unit(100, 1.0);
  const auto u = expsum_concentration(unit, 20000, {0.0, 3.0}, 7, 1);
  EXPECT_EQ(u.rows[0].freq, 1.0);
  EXPECT_LE(u.rows[1].freq, 0.02);
  std::vector<double> het;
  for (int k = 1; k <= 100; ++k) het.push_back(k);
  const auto h = expsum_concentration(het, 20000, {1.0, 2.0, 4.0}, 7, 1);
  EXPECT_TRUE(h.monotone);
  EXPECT_LE(h.rows[2].freq, 0.01);
}

TEST(Verify, ScaledClusterAndSmallLimitShape) {
  const auto pp = unit_rate(400);
  const auto r = limit_shape_check(pp, ShapeSpec::homogeneous(1.0), 100.0, 400, 3, 1.1, 1, 200);
  EXPECT_LT(r.distance, 0.2);
  EXPECT_EQ(hausdorff(r.predicted, r.predicted), 0.0);
  EXPECT_THROW(limit_shape_check(pp, ShapeSpec::homogeneous(1.0), 1000.0, 400, 3, 1.1, 1, 200), InsufficientExtent);
}

TEST(Verify, RainsSmall) {
  const Sequence sq = [](std::size_t i) { return static_cast<double>(i * i); };
  const auto r = rains_check(sq, sq, 25, 20, 1, 3.2898681336964524);
  EXPECT_LT(r.rel_error, 0.3);
}
