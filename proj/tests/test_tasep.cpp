#include <gtest/gtest.h>

#include <cmath>

#include "cgm/rng.hpp"
#include "cgm/shape.hpp"
#include "cgm/tasep.hpp"

using namespace cgm;

namespace {

ParamPair unit_rate(std::size_t cap) {
  return ParamPair(ParamFamily::constant(0.5, cap), ParamFamily::constant(0.5, cap));
}

}  // namespace

TEST(Tasep, Duality) {
  const auto pp = unit_rate(40);
  const auto f = lpp_field(pp, 40, 40, 5, 1, 1);
  for (double t : {0.0, 3.0, 7.5, 12.0}) {
    for (std::size_t n = 1; n <= 10; ++n) {
      const std::size_t H = height(f, n, t);
      for (std::size_t m = 1; m <= 40; ++m) EXPECT_EQ(H >= m, f(m, n) <= t);
    }
  }
  EXPECT_EQ(height(f, 3, 0.0), 0u);
  EXPECT_EQ(flux(f, 3, 0.0), 0u);
}

TEST(Tasep, SingleRowIsRunningSum) {
  const auto pp = unit_rate(50);
  const auto w = sample_weights(pp, 50, 1, 3, 3);
  LppField f(50, 1);
  const auto g = lpp_grid(pp, 50, 1, 3, 3, Storage::Full, 1);
  for (std::size_t m = 1; m <= 50; ++m) f(m, 1) = g(m, 1);
  const double t = 10.0;
  std::size_t expect = 0;
  double s = 0.0;
  for (std::size_t m = 1; m <= 50; ++m) {
    s += w(m, 1);
    if (s <= t) expect = m;
  }
  EXPECT_EQ(height(f, 1, t), expect);
}

TEST(Tasep, FluxHeightIdentityAndExclusion) {
  const auto pp = unit_rate(120);
  const auto f = lpp_field(pp, 120, 120, 17, 1, 1);
  for (double t : {5.0, 15.0, 30.0}) {
    const auto fr = tasep_frame(f, t, 60, 40);
    for (std::size_t n = 1; n < fr.sigma.size(); ++n) EXPECT_GT(fr.sigma[n - 1], fr.sigma[n]);
    for (std::size_t i = 1; i <= 40; ++i) {
      std::size_t cnt = 0;
      for (std::size_t j = 1; j <= 60; ++j) cnt += fr.H[j - 1] >= j + i - 1 ? 1 : 0;
      EXPECT_EQ(fr.F[i - 1], cnt) << "t=" << t << " i=" << i;
      if (i > 1) {
        EXPECT_LE(fr.F[i - 1], fr.F[i - 2]);
      }
    }
  }
}

TEST(Tasep, InsufficientExtent) {
  const auto pp = unit_rate(10);
  const auto f = lpp_field(pp, 10, 10, 1, 1, 1);
  EXPECT_THROW(height(f, 1, 1e6), InsufficientExtent);
  EXPECT_THROW(flux(f, 1, 1e6), InsufficientExtent);
  EXPECT_THROW(height(f, 11, 1.0), RangeError);
}

TEST(Tasep, HeightAndFluxLimits) {
  const auto pp = unit_rate(4096);
  const double h = static_cast<double>(height_auto(pp, 100, 400, 11, stream_grid_id(10, 0))) / 400;
  EXPECT_GE(h, 0.18);
  EXPECT_LE(h, 0.32);
  // (t - m)^2 / (4t) = 50 at (m, t) = (400, 800); mean of 20 runs.
  double F = 0.0;
  for (std::uint64_t r = 0; r < 20; ++r) F += static_cast<double>(flux_auto(pp, 400, 800, 11, stream_grid_id(10, 1 + r)));
  F /= 20.0 * 800.0;
  EXPECT_NEAR(F, 0.0625, 0.15 * 0.0625);
  EXPECT_NEAR(limit_flux(ShapeSpec::homogeneous(1.0), 400.0 / 800, 1.0), 0.0625, 1e-10);
  EXPECT_NEAR(limit_height(ShapeSpec::homogeneous(1.0), 100.0 / 400, 1.0), 0.25, 1e-10);
}

TEST(Tasep, AutoMatchesField) {
  const auto pp = unit_rate(512);
  const auto f = lpp_field(pp, 512, 512, 4, 9, 1);
  EXPECT_EQ(height_auto(pp, 20, 40.0, 4, 9), height(f, 20, 40.0));
  EXPECT_EQ(flux_auto(pp, 30, 60.0, 4, 9), flux(f, 30, 60.0));
}

TEST(Tasep, Trajectory) {
  const ParamPair pp(ParamFamily::constant(0.5, 4096), ParamFamily::constant(0.5, 4096));
  const auto tr = trajectory(pp, 3, {0.0, 100.0, 500.0, 1000.0, 2000.0}, 2, 1);
  ASSERT_EQ(tr.size(), 5u);
  EXPECT_EQ(tr[0].sigma, -2);
  for (std::size_t k = 1; k < tr.size(); ++k) EXPECT_GE(tr[k].H, tr[k - 1].H);
  EXPECT_NEAR(static_cast<double>(tr.back().H) / 2000.0, 1.0, 0.1);
}

TEST(Tasep, RejectsMDependentFamilies) {
  std::vector<double> r1(4, 0.5);
  std::vector<double> r2(10, 0.5);
  const ParamPair pp(ParamFamily::triangular({{1, 4, r1}, {5, 10, r2}}, 10), ParamFamily::constant(0.5, 10));
  EXPECT_THROW(height_auto(pp, 2, 1.0, 1, 1), InvalidParameters);
}
