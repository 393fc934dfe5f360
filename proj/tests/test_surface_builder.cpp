#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "phimin/profile_solvers.hpp"
#include "phimin/surface_builder.hpp"

using namespace phimin;

namespace {

WeightProfile linear(double m = 1.0) { return make_builtin(ProfileKind::Linear, {m}); }

ProfileCurve reaper() {
  static const ProfileCurve c = solve_catenary(linear(), 0.0, 1.3, 1e-12, 0.01);
  return c;
}

}  // namespace

TEST(Mesh, ExtrudeMinimalRows) {
  const auto g = resample_graph(reaper(), -1.0, 1.0, 11);
  const auto m = extrude_cylinder(g, {-0.5, 0.5}, 2);
  EXPECT_EQ(m.size(), 22u);
  EXPECT_EQ(m.faces.size(), 20u);
  EXPECT_NO_THROW(m.validate());
  EXPECT_EQ(m.euler_characteristic(), 1);
}

TEST(Mesh, RevolveThreeSectors) {
  const auto b = solve_bowl(linear(), 0.0, 1.0);
  const auto m = revolve(resample_arclength(b, 0.0, 0.9, 5), 3);
  EXPECT_EQ(m.size(), 1u + 4 * 3);
  EXPECT_NO_THROW(m.validate());
  EXPECT_EQ(m.euler_characteristic(), 1);
}

TEST(Mesh, RejectsDegenerateCounts) {
  const auto g = resample_graph(reaper(), -1.0, 1.0, 11);
  EXPECT_THROW(extrude_cylinder(g, {-0.5, 0.5}, 1), Error);
  EXPECT_THROW(revolve(g, 2), Error);
  EXPECT_THROW(extrude_cylinder(g, {0.5, -0.5}, 4), Error);
}

TEST(Mesh, CatenoidIsAnnulus) {
  auto [right, left] = solve_catenoid(linear(), 1.0, 0.0, 3.0);
  const auto m = revolve(resample_arclength(right, 0.0, 2.0, 41), 48);
  EXPECT_EQ(m.euler_characteristic(), 0);
  EXPECT_NO_THROW(m.boundary_vertices());
}

TEST(Mesh, NormalsAreUnitAndDownward) {
  const auto g = resample_graph(reaper(), -1.0, 1.0, 21);
  const auto m = extrude_cylinder(g, {-0.5, 0.5}, 5);
  for (const auto& n : m.normals) {
    EXPECT_NEAR(n.norm(), 1.0, 1e-12);
    EXPECT_LT(n.z(), 0.0);
  }
}

TEST(Residual, PlaneHasConstantResidual) {
  const auto p = linear(2.0);
  const auto plane = sample_graph([](double, double) { return 0.0; }, -1, 1, 21, -1, 1, 21);
  const auto r = fe_residual(plane, p);
  for (int i = 1; i < 20; ++i)
    for (int j = 1; j < 20; ++j) EXPECT_DOUBLE_EQ(r(i, j), -2.0);
  EXPECT_TRUE(std::isnan(r(0, 0)));
  // H = 0 and <N, e3> = -1
  const auto h = mean_curvature_residual(patch_mesh(plane), p);
  for (double v : h)
    if (!std::isnan(v)) EXPECT_NEAR(v, 2.0, 1e-12);
}

TEST(Residual, LorentzianConstantCase) {
  // u = 0 with phi' = -1: (0) + phi' * 1 = -1 everywhere
  const auto p = make_builtin(ProfileKind::Linear, {-1.0});
  const auto flat = sample_graph([](double, double) { return 0.0; }, -1, 1, 11, -1, 1, 11, Signature::Lorentzian);
  EXPECT_NEAR(max_abs(lfe_residual(flat, p)), 1.0, 1e-14);
}

TEST(Residual, LorentzianRejectsTimelike) {
  const auto steep = sample_graph([](double x, double) { return 2.0 * x; }, -1, 1, 11, -1, 1, 11, Signature::Lorentzian);
  try {
    lfe_residual(steep, linear());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SpacelikeViolation);
  }
}

TEST(Residual, GrimReaperPatch) {
  const auto gp = cylinder_patch(reaper(), -1.2, 1.2, 241, -0.5, 0.5, 101);
  EXPECT_LT(max_abs(fe_residual(gp, linear())), 1e-3);
}

TEST(Residual, ExtrudedGrimReaperConverges) {
  double prev = 0.0;
  for (double h : {2e-2, 1e-2}) {
    const int n = static_cast<int>(std::lround(2.4 / h)) + 1;
    const auto m = extrude_cylinder(resample_graph(reaper(), -1.2, 1.2, n), {-0.5, 0.5},
                                    static_cast<int>(std::lround(1.0 / h)) + 1);
    const double r = max_abs(mean_curvature_residual(m, linear()));
    if (prev > 0) EXPECT_LT(r, 0.5 * prev);
    prev = r;
  }
  EXPECT_LT(prev, 5e-3);
}

TEST(Residual, BowlAwayFromAxis) {
  const auto b = solve_bowl(linear(), 0.0, 3.0, 1e-11, {1e-3, 0.01});
  double prev = 0.0;
  for (int n : {100, 200}) {
    const auto m = revolve(resample_arclength(b, 0, 2.0, n + 1), 2 * n);
    const auto r = mean_curvature_residual(m, linear());
    double worst = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i)
      if (!std::isnan(r[i]) && m.params[i].x() >= 0.5) worst = std::max(worst, std::abs(r[i]));
    if (prev > 0) EXPECT_LT(worst, 0.6 * prev);
    prev = worst;
  }
  EXPECT_LT(prev, 1e-2);
}

TEST(Residual, RoundCylinderFails) {
  const auto cyl = sample_graph([](double x, double) { return std::sqrt(1 - x * x); }, -0.8, 0.8, 81, -0.5, 0.5, 51);
  EXPECT_GT(max_abs(mean_curvature_residual(patch_mesh(cyl), linear())), 1.0);
}

TEST(Tilt, MeanCurvatureScalesWithCosine) {
  const auto g = resample_graph(reaper(), -1.2, 1.2, 121);
  const double a = std::numbers::pi / 4;
  const auto m = extrude_cylinder(g, {-0.5, 0.5}, 51);
  const auto t = tilt_cylinder(g, a, {-0.5, 0.5}, 51);
  const auto H = mean_curvature(m), Ht = mean_curvature(t);
  for (std::size_t i = 0; i < H.size(); ++i)
    if (!std::isnan(H[i])) EXPECT_NEAR(Ht[i], std::cos(a) * H[i], 1e-9);
  EXPECT_LT(max_abs(mean_curvature_residual(t, linear())), 2e-3);
}

TEST(Tilt, NormalsStayUnit) {
  const auto t = tilt_cylinder(resample_graph(reaper(), -1.0, 1.0, 21), 0.3, {-0.5, 0.5}, 7);
  EXPECT_NO_THROW(t.validate());
  EXPECT_THROW(tilt_cylinder(reaper(), 2.0), Error);
}

TEST(Shape, GrimReaperCurvatureBound) {
  const auto m = extrude_cylinder(resample_graph(reaper(), -1.2, 1.2, 121), {-0.5, 0.5}, 51);
  // |S| = u'' / W^3 = cos x, phi' = 1
  const auto s = second_fundamental_norm(m, linear());
  EXPECT_LE(s.max_ratio, 1.0 + 1e-2);
  EXPECT_GT(s.max_ratio, 0.9);
}
