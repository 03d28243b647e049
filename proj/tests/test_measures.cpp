#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cgm/measures.hpp"
#include "cgm/params.hpp"

using namespace cgm;

TEST(Measures, CauchyA) {
  EXPECT_DOUBLE_EQ(cauchy_A(Measure1D::dirac(0.5), 0.5), 1.0);
  EXPECT_DOUBLE_EQ(cauchy_A(Measure1D({{1.0, 0.5}, {2.0, 0.5}}), 0.0), 0.75);
  EXPECT_NEAR(cauchy_A(Measure1D::uniform(1.0, 2.0), 0.0), std::log(2.0), 1e-15);
}

TEST(Measures, CauchyB) {
  EXPECT_DOUBLE_EQ(cauchy_B(Measure1D::dirac(0.5), -0.5), 1.0);
  EXPECT_DOUBLE_EQ(cauchy_B(Measure1D::dirac(0.5), 0.0), 2.0);
  EXPECT_NEAR(cauchy_B(Measure1D({{1.0, 0.5}, {2.0, 0.5}}), 0.5), 4.0 / 3.0, 1e-15);
}

TEST(Measures, Derivatives) {
  EXPECT_DOUBLE_EQ(cauchy_deriv(Measure1D::dirac(0.5), 0.0, 1, TransformSide::A), -4.0);
  EXPECT_DOUBLE_EQ(cauchy_deriv(Measure1D::dirac(0.5), 0.0, 1, TransformSide::B), 4.0);
  EXPECT_EQ(cauchy_deriv(Measure1D(), 0.3, 1, TransformSide::A), 0.0);
  EXPECT_EQ(cauchy_deriv(Measure1D(), 0.3, 2, TransformSide::B), 0.0);
}

TEST(Measures, DomainAndBoundary) {
  const auto d = Measure1D::dirac(0.5);
  EXPECT_THROW(cauchy_A(d, -0.6), DomainError);
  EXPECT_THROW(cauchy_B(d, 0.6), DomainError);
  // Atom at the edge: divergent, reported as +inf.
  EXPECT_EQ(cauchy_A(d, -0.5), kInf);
  EXPECT_EQ(cauchy_B(d, 0.5), kInf);
  // Uniform density starting at the edge: ∫ dt / t diverges too.
  EXPECT_EQ(cauchy_A(Measure1D::uniform(0.0, 1.0), 0.0), kInf);
  // Second moment at an atom-free edge with a gap is finite.
  const Measure1D gap({{1.0, 1.0}});
  EXPECT_DOUBLE_EQ(gap.shifted_moment(2, -0.5), 4.0);
}

TEST(Measures, FiniteDifferences) {
  const Measure1D mu({{0.3, 0.2}, {0.8, 0.5}, {1.7, 0.1}}, {{0.4, 1.2, 0.2}});
  const double h = 1e-5;
  for (double z : {-0.2, 0.0, 0.15, 0.25}) {
    const double fdA = (cauchy_A(mu, z + h) - cauchy_A(mu, z - h)) / (2 * h);
    const double exA = cauchy_deriv(mu, z, 1, TransformSide::A);
    EXPECT_NEAR(fdA, exA, 1e-6 * std::abs(exA)) << z;
    const double fdB = (cauchy_B(mu, z + h) - cauchy_B(mu, z - h)) / (2 * h);
    const double exB = cauchy_deriv(mu, z, 1, TransformSide::B);
    EXPECT_NEAR(fdB, exB, 1e-6 * std::abs(exB)) << z;
    const double fd2 = (cauchy_deriv(mu, z + h, 1, TransformSide::A) - cauchy_deriv(mu, z - h, 1, TransformSide::A)) / (2 * h);
    const double ex2 = cauchy_deriv(mu, z, 2, TransformSide::A);
    EXPECT_NEAR(fd2, ex2, 1e-6 * std::abs(ex2)) << z;
  }
}

TEST(Measures, PieceMomentsMatchQuadrature) {
  // Midpoint rule with many cells as an independent check of the closed forms.
  const Measure1D u = Measure1D::uniform(0.5, 2.0, 0.7);
  for (int k = 1; k <= 4; ++k) {
    const int cells = 200000;
    double s = 0.0;
    for (int c = 0; c < cells; ++c) {
      const double t = 0.5 + 1.5 * (c + 0.5) / cells;
      s += std::pow(t + 0.1, -k);
    }
    s *= 0.7 / cells;
    EXPECT_NEAR(u.shifted_moment(k, 0.1), s, 1e-9 * s) << k;
  }
}

TEST(Measures, MonotoneAndConvex) {
  const Measure1D a({{0.2, 0.3}, {0.6, 0.7}});
  const Measure1D b({{0.4, 0.5}, {0.9, 0.5}}, {{0.5, 1.0, 0.2}});
  double prevA = kInf;
  double prevB = -kInf;
  const double x = 1.3;
  const double y = 0.6;
  std::vector<double> f;
  for (int k = 1; k < 200; ++k) {
    const double z = -0.2 + 0.6 * k / 200.0;
    const double A = cauchy_A(a, z);
    const double B = cauchy_B(b, z);
    EXPECT_LT(A, prevA);
    EXPECT_GT(B, prevB);
    prevA = A;
    prevB = B;
    f.push_back(x * A + y * B);
  }
  for (std::size_t k = 1; k + 1 < f.size(); ++k) EXPECT_GE(f[k - 1] - 2 * f[k] + f[k + 1], -1e-12);
}

TEST(Measures, VagueLimitOfFig1bEmpirical) {
  const std::size_t m = 10000;
  const auto p = ParamFamily::with_defects(0.5, {{100, 0.0}}, m);
  const auto emp = empirical_measure(p, m);
  for (double z : {0.1, 0.3, 1.0}) {
    const double err = std::abs(cauchy_A(emp, z) - cauchy_A(Measure1D::dirac(0.5), z));
    EXPECT_LE(err, 2.0 / m / z);
  }
}

TEST(Measures, MergesAndValidates) {
  const Measure1D m({{1.0, 0.25}, {0.5, 0.5}, {1.0, 0.25}, {2.0, 0.0}});
  ASSERT_EQ(m.atoms().size(), 2u);
  EXPECT_EQ(m.mass_at(1.0), 0.5);
  EXPECT_EQ(m.inf_supp(), 0.5);
  EXPECT_TRUE(m.is_subprobability());
  EXPECT_EQ(Measure1D().inf_supp(), kInf);
  EXPECT_THROW(Measure1D({{0.0, -1.0}}), DomainError);
  EXPECT_THROW(Measure1D({}, {{1.0, 1.0, 0.5}}), DomainError);
}

TEST(Measures, TransformPairInvariants) {
  const auto d = Measure1D::dirac(0.5);
  EXPECT_NO_THROW(TransformPair(d, d, 0.5, 0.5));
  EXPECT_NO_THROW(TransformPair(d, d, 0.0, 0.5));
  EXPECT_THROW(TransformPair(d, d, 0.6, 0.5), InvalidParameters);
  EXPECT_THROW(TransformPair(d, d, -0.5, 0.5), InvalidParameters);
  EXPECT_NO_THROW(TransformPair(Measure1D(), d, kInf, 0.5));
}
