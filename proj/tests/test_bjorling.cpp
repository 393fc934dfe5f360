#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "phimin/bjorling.hpp"
#include "phimin/profile_solvers.hpp"

using namespace phimin;

namespace {

struct BowlRing {
  ProfileCurve bowl;
  double z0, theta;
};

const BowlRing& ring() {
  static const BowlRing r = [] {
    const auto lin = make_builtin(ProfileKind::Linear, {1.0});
    auto b = solve_bowl(lin, 0.0, 4.0);
    const double th = std::atan(b.slope_at(1.0)), z = b.height_at(1.0);
    return BowlRing{std::move(b), z, th};
  }();
  return r;
}

BjorlingOptions loose() {
  BjorlingOptions o;
  o.tol = 1.0;
  return o;
}

}  // namespace

TEST(Series, TaylorDerivatives) {
  RealSeries s{SeriesBasis::Taylor, 1.0, {1.0, 2.0, 3.0}, {}};
  EXPECT_DOUBLE_EQ(s(2.0), 6.0);
  EXPECT_DOUBLE_EQ(s.eval(2.0, 1), 8.0);
  EXPECT_DOUBLE_EQ(s.eval(2.0, 2), 6.0);
  EXPECT_DOUBLE_EQ(s.eval(2.0, 3), 0.0);
}

TEST(Series, FourierDerivative) {
  RealSeries s{SeriesBasis::Fourier, 2 * std::numbers::pi, {0.5, 1.0}, {0.0, 2.0}};
  EXPECT_NEAR(s(0.3), 0.5 + std::cos(0.3) + 2 * std::sin(0.3), 1e-15);
  EXPECT_NEAR(s.eval(0.3, 1), -std::sin(0.3) + 2 * std::cos(0.3), 1e-15);
}

TEST(Data, ValidationRejectsNonOrthogonalNormal) {
  const double a = 0.3;
  auto d = line_data(0.0, a);
  // V = (0, sin a, cos a) has <beta', V> = sin a
  d.V[0].a = {0.0};
  d.V[1].a = {std::sin(a)};
  try {
    solve_bjorling(d, 1.0, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidData);
  }
}

TEST(Data, ValidationRejectsMixedBases) {
  auto d = line_data(0.0, 0.3);
  d.V[2].basis = SeriesBasis::Fourier;
  d.V[2].param = 1.0;
  EXPECT_THROW(solve_bjorling(d, 1.0, 0.1), Error);
}

TEST(Data, LowerHalfSpaceForSingularWeight) {
  EXPECT_THROW(solve_bjorling(line_data(-1.0, 0.2), 3.0, 0.1), Error);
}

TEST(Solve, LineIsTranslationInvariant) {
  const auto sol = solve_bjorling(line_data(0.0, 0.3, 12), 1.0, 0.2, loose());
  double var = 0.0;
  for (int i = 0; i < sol.field.nu(); ++i)
    for (int j = 0; j < sol.field.nv(); ++j) var = std::max(var, std::abs(sol.field.G(i, j) - sol.field.G(0, j)));
  EXPECT_LT(var, 1e-12);
  EXPECT_LT(sol.pde_residual, 1e-4);
}

TEST(Solve, InitialValueMatchesData) {
  const auto sol = solve_bjorling(circle_data(1.0, ring().z0, ring().theta), 1.0, 0.1);
  EXPECT_LT(sol.initial_gap, 1e-12);
  const int j0 = sol.field.nv() / 2;
  for (int i = 0; i < sol.field.nu(); i += 25) {
    const Vec3 n = normal_from_gauss(sol.field.G(i, j0));
    EXPECT_NEAR((n - sol.data.V_at(sol.field.u[i])).norm(), 0.0, 1e-10);
  }
}

TEST(Solve, CircleReproducesBowl) {
  const auto sol = solve_bjorling(circle_data(1.0, ring().z0, ring().theta, 12), 1.0, 0.1);
  EXPECT_LT(sol.pde_residual, 1e-4);
  const auto rep = bjorling_surface(sol);
  double err = 0.0;
  for (const auto& p : rep.mesh.vertices)
    err = std::max(err, std::abs(p.z() - ring().bowl.height_at(std::hypot(p.x(), p.y()))));
  EXPECT_LT(err, 1e-3);
}

TEST(Solve, TruncationOrdersAgree) {
  const auto d = circle_data(1.0, ring().z0, ring().theta, 8);
  auto d2 = d;
  d2.degree = 14;
  const auto a = solve_bjorling(d, 1.0, 0.05), b = solve_bjorling(d2, 1.0, 0.05);
  EXPECT_LT((a.field.G - b.field.G).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Solve, DivergenceReported) {
  try {
    solve_bjorling(circle_data(1.0, ring().z0, ring().theta, 6), 1.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SeriesDivergence);
    EXPECT_GT(e.estimate(), 1e-4);
  }
}

TEST(Solve, HangingRoofCircle) {
  const auto lg = make_builtin(ProfileKind::Log, {1.0});
  const auto roof = solve_bowl(lg, 1.0, 3.0);
  const double th = std::atan(roof.slope_at(1.0)), z = roof.height_at(1.0);
  const auto sol = solve_bjorling(circle_data(1.0, z, th, 12), 3.0, 0.1);
  const auto rep = bjorling_surface(sol);
  double err = 0.0;
  for (const auto& p : rep.mesh.vertices) err = std::max(err, std::abs(p.z() - roof.height_at(std::hypot(p.x(), p.y()))));
  EXPECT_LT(err, 1e-3);
}
