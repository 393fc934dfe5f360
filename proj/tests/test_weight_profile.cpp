#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "phimin/weight_profile.hpp"

using namespace phimin;

TEST(WeightProfile, LinearUnitSlope) {
  const auto p = make_builtin(ProfileKind::Linear, {1.0});
  EXPECT_DOUBLE_EQ(p.phi(2.5), 2.5);
  EXPECT_DOUBLE_EQ(p.dphi(-7.0), 1.0);
  EXPECT_DOUBLE_EQ(p.ddphi(3.0), 0.0);
  EXPECT_FALSE(std::isfinite(p.domain().lo));
  EXPECT_FALSE(std::isfinite(p.domain().hi));
  EXPECT_TRUE(p.increasing());
}

TEST(WeightProfile, LogFamilyMember) {
  const double k = 3.0;
  const auto p = make_builtin(ProfileKind::Log, {2.0 / (k - 1.0)});
  for (double z : {0.1, 1.0, 4.0}) {
    EXPECT_NEAR(p.phi(z), std::log(z), 1e-15);
    EXPECT_NEAR(p.dphi(z), 1.0 / z, 1e-15);
  }
  EXPECT_EQ(p.domain().lo, 0.0);
  EXPECT_TRUE(std::isinf(p.domain().hi));
}

TEST(WeightProfile, RejectsZeroSlope) {
  try {
    make_builtin(ProfileKind::Linear, {0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidParameter);
  }
}

TEST(WeightProfile, RejectsSignChangingDerivative) {
  // phi' = z - 1 changes sign on (0, inf)
  EXPECT_THROW(make_builtin(ProfileKind::Series, {1.0, -1.0}), Error);
}

TEST(WeightProfile, ExpInverseAcceptedDespiteUnderflow) {
  const auto p = make_builtin(ProfileKind::ExpInverse, {});
  EXPECT_TRUE(p.increasing());
  EXPECT_NEAR(p.dphi(1.0), std::exp(-1.0), 1e-15);
}

TEST(WeightProfile, MissingParameters) {
  EXPECT_THROW(make_builtin(ProfileKind::Log, {}), Error);
  EXPECT_THROW(make_builtin(ProfileKind::Power, {}), Error);
}

TEST(Lambda, ConstantForLinear) {
  const auto p = make_builtin(ProfileKind::Linear, {1.0});
  EXPECT_NEAR(lambda_of_z(p, 5.0), 1.0, 1e-14);
}

TEST(Lambda, LogTwoAtZero) {
  const auto p = make_builtin(ProfileKind::Log, {2.0});
  // phi = 2 log u: phi^{-1}(0) = 1, lambda = 2 / 1
  EXPECT_NEAR(inverse_phi(p, 0.0), 1.0, 1e-12);
  EXPECT_NEAR(lambda_of_z(p, 0.0), 2.0, 1e-12);
  // closed form inverse e^{z/2}
  for (double z : {-3.0, 0.7, 5.0}) EXPECT_NEAR(inverse_phi(p, z), std::exp(z / 2.0), 1e-12 * std::exp(z / 2.0));
}

TEST(Lambda, CustomMatchesBuiltinByRootSolve) {
  const auto c = make_custom([](double z) { return z; }, [](double) { return 1.0; }, Interval{});
  EXPECT_FALSE(c.closed_inverse().has_value());
  EXPECT_NEAR(lambda_of_z(c, 5.0), 1.0, 1e-10);
  EXPECT_NEAR(inverse_phi(c, 5.0), 5.0, 1e-10);
}

TEST(Lambda, OutsideRange) {
  const auto p = make_builtin(ProfileKind::Power, {-2.0});  // phi bounded above at infinity
  EXPECT_THROW(inverse_phi(p, 1e6), Error);
}

TEST(CurlyG, LinearIsShift) {
  const auto p = make_builtin(ProfileKind::Linear, {1.0});
  EXPECT_NEAR(curly_g(p, 0.3, 2.1), 1.8, 1e-13);
  EXPECT_EQ(curly_g(p, 0.3, 0.3), 0.0);
}

TEST(CurlyG, DerivativeTwoXi) {
  // phi' = 2 xi: int_1^e d xi / (2 xi) = 1/2
  const auto p = make_builtin(ProfileKind::Series, {2.0, 0.0});
  EXPECT_NEAR(curly_g(p, 1.0, std::exp(1.0)), 0.5, 1e-12);
}

TEST(CurlyG, IncreasingOnRandomTriples) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(0.1, 6.0);
  const WeightProfile ps[] = {make_builtin(ProfileKind::Log, {1.5}), make_builtin(ProfileKind::Power, {2.0}),
                              make_builtin(ProfileKind::ExpInverse, {})};
  for (const auto& p : ps)
    for (int k = 0; k < 30; ++k) {
      double a = U(rng), b = U(rng), c = U(rng);
      if (a > b) std::swap(a, b);
      if (b > c) std::swap(b, c);
      if (a > b) std::swap(a, b);
      if (c - a < 1e-6) continue;
      EXPECT_LE(curly_g(p, a, b), curly_g(p, a, c) + 1e-12);
      EXPECT_GT(curly_g(p, a, c), 0.0);
    }
}

TEST(WeightProfile, DerivativeConsistency) {
  const WeightProfile ps[] = {make_builtin(ProfileKind::Log, {2.0}), make_builtin(ProfileKind::Power, {3.0}),
                              make_builtin(ProfileKind::ExpInverse, {}),
                              make_builtin(ProfileKind::Series, {1.0, 0.5, 0.25})};
  for (const auto& p : ps)
    for (double z : {0.5, 1.0, 2.0, 3.5}) {
      double e1 = 0, e2 = 0;
      for (double h : {1e-2, 5e-3}) {
        const double fd = (p.phi(z + h) - p.phi(z - h)) / (2 * h);
        (h == 1e-2 ? e1 : e2) = std::abs(fd - p.dphi(z));
      }
      EXPECT_LT(e2, 0.3 * e1 + 1e-10) << to_string(p.kind()) << " z=" << z;
      const double fd2 = (p.dphi(z + 1e-4) - p.dphi(z - 1e-4)) / 2e-4;
      EXPECT_NEAR(fd2, p.ddphi(z), 1e-5 * std::max(1.0, std::abs(fd2)));
    }
}

TEST(WeightProfile, LambdaComposedWithPhi) {
  const WeightProfile ps[] = {make_builtin(ProfileKind::Log, {2.0}), make_builtin(ProfileKind::Power, {3.0}),
                              make_builtin(ProfileKind::ExpInverse, {})};
  for (const auto& p : ps)
    for (double u : {0.4, 1.0, 2.5}) EXPECT_NEAR(lambda_of_z(p, p.phi(u)), p.dphi(u), 1e-9 * std::max(1.0, p.dphi(u)));
}

TEST(WeightProfile, TabulatedReproducesSmoothProfile) {
  std::vector<double> z, f, d;
  for (int i = 0; i <= 400; ++i) {
    const double t = 0.5 + 3.0 * i / 400.0;
    z.push_back(t);
    f.push_back(t * t * t / 3.0);
    d.push_back(t * t);
  }
  const auto p = make_tabulated(z, f, d);
  EXPECT_NEAR(p.phi(1.7), 1.7 * 1.7 * 1.7 / 3.0, 1e-8);
  EXPECT_NEAR(p.dphi(1.7), 1.7 * 1.7, 1e-6);
  EXPECT_NEAR(inverse_phi(p, 1.0), std::cbrt(3.0), 1e-9);
}

TEST(WeightProfile, DecreasingProfile) {
  const auto p = make_builtin(ProfileKind::Log, {-1.0});
  EXPECT_FALSE(p.increasing());
  EXPECT_NEAR(inverse_phi(p, -std::log(2.0)), 2.0, 1e-12);
}
