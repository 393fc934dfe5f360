#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include "phimin/profile_solvers.hpp"
#include "phimin/weierstrass.hpp"

using namespace phimin;

namespace {

GaussField constant_field(cplx g, int n = 21, double k = 1.0) {
  GaussField f;
  f.u = linspace(-1, 1, n);
  f.v = linspace(-1, 1, n);
  f.G = Eigen::MatrixXcd::Constant(n, n, g);
  f.k = k;
  return f;
}

}  // namespace

TEST(GaussMap, NormalRoundTrip) {
  for (cplx g : {cplx(0, 0), cplx(0.3, -0.2), cplx(-0.9, 0.1)}) {
    const Vec3 n = normal_from_gauss(g);
    EXPECT_NEAR(n.norm(), 1.0, 1e-14);
    EXPECT_GT(n.z(), 0.0);
    EXPECT_NEAR(std::abs(gauss_from_normal(n) - g), 0.0, 1e-14);
  }
  EXPECT_THROW(gauss_from_normal(Vec3(0, 0, -1)), Error);
}

TEST(GaussMap, ConstantFieldSolvesEquation) {
  EXPECT_LT(max_abs(gauss_pde_residual(constant_field({0.2, 0.1}))), 1e-12);
}

TEST(GaussMap, UnitModulusRejected) {
  try {
    gauss_pde_residual(constant_field({0.6, 0.8}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularLocus);
  }
}

TEST(GaussMap, FieldNeedsFiveNodes) {
  EXPECT_THROW(gauss_pde_residual(constant_field({0, 0}, 4)), Error);
  EXPECT_THROW(gauss_pde_residual(constant_field({0, 0}, 9, 0.0)), Error);
}

TEST(GaussMap, NonSolutionHasResidual) {
  auto f = constant_field({0, 0}, 41);
  for (int i = 0; i < 41; ++i)
    for (int j = 0; j < 41; ++j) f.G(i, j) = 0.3 * f.u[i] * f.u[i];
  EXPECT_GT(max_abs(gauss_pde_residual(f)), 0.1);
}

TEST(Family, Profiles) {
  EXPECT_EQ(family_profile(1.0).kind(), ProfileKind::Linear);
  const auto p = family_profile(3.0);
  EXPECT_NEAR(p.phi(std::exp(1.0)), 1.0, 1e-14);
  EXPECT_THROW(family_profile(0.0), Error);
}

TEST(Representation, GrimReaper) {
  const auto lin = make_builtin(ProfileKind::Linear, {1.0});
  const auto cat = solve_catenary(lin, 0.0, 1.5);
  const auto cs = cylinder_gauss_field(cat, {-1, 1}, 101, {-1, 1}, 101);
  EXPECT_LT(max_abs(gauss_pde_residual(cs.field)), 1e-4);
  const auto rep = integrate_representation(cs.field);
  EXPECT_LT(translated_distance(rep.mesh.vertices, cs.positions), 10 * cs.field.hu());
  EXPECT_LT(translated_distance(rep.mesh.vertices, cs.positions), 1e-6);
  EXPECT_LT(rep.report.path_discrepancy, 1e-6);
  EXPECT_LT(rep.report.conformal_error, 1e-4);
  EXPECT_LT(rep.report.mean_curvature_residual, 1e-2);
}

TEST(Representation, BowlPatch) {
  const auto lin = make_builtin(ProfileKind::Linear, {1.0});
  const auto bowl = solve_bowl(lin, 0.0, 4.0);
  const auto cs = rotational_gauss_field(bowl, {0.5, 2.5}, 101, {-0.7, 0.7}, 101);
  EXPECT_LT(max_abs(gauss_pde_residual(cs.field)), 1e-4);
  const auto rep = integrate_representation(cs.field);
  EXPECT_LT(translated_distance(rep.mesh.vertices, cs.positions), 1e-6);
}

TEST(Representation, HangingRoofPinned) {
  const auto lg = make_builtin(ProfileKind::Log, {1.0});
  const auto roof = solve_bowl(lg, 1.0, 3.0);
  const int n = 101;
  const auto cs = rotational_gauss_field(roof, {0.5, 2.0}, n, {-0.7, 0.7}, n, 3.0);
  EXPECT_LT(max_abs(gauss_pde_residual(cs.field)), 1e-4);
  RepresentationOptions o;
  o.pin = cs.positions[(n / 2) * n + n / 2];
  const auto rep = integrate_representation(cs.field, o);
  double d = 0.0;
  for (std::size_t i = 0; i < cs.positions.size(); ++i) d = std::max(d, (rep.mesh.vertices[i] - cs.positions[i]).norm());
  EXPECT_LT(d, 1e-6);
}

TEST(Representation, WrongWeightIsDetected) {
  // a k = 1 field integrated as k = 3 is not a solution of the k = 3 equation
  const auto lin = make_builtin(ProfileKind::Linear, {1.0});
  const auto bowl = solve_bowl(lin, 0.0, 4.0);
  auto cs = rotational_gauss_field(bowl, {0.5, 2.5}, 61, {-0.7, 0.7}, 61);
  cs.field.k = 3.0;
  EXPECT_GT(max_abs(gauss_pde_residual(cs.field)), 1e-2);
}
