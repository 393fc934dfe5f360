#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "phimin/predicates.hpp"
#include "phimin/profile_solvers.hpp"

using namespace phimin;

namespace {

const double kPi = std::numbers::pi;

WeightProfile linear(double m = 1.0) { return make_builtin(ProfileKind::Linear, {m}); }

}  // namespace

TEST(Catenary, GrimReaperClosedForm) {
  const auto c = solve_catenary(linear(), 0.0, kInf, 1e-12);
  double err = 0.0;
  for (const auto& s : c.samples)
    if (std::abs(s.x) <= 1.45) err = std::max(err, std::abs(s.z + std::log(std::cos(s.x))));
  EXPECT_LT(err, 1e-8);
  EXPECT_EQ(c.termination, Termination::BlowUp);
  EXPECT_NEAR(c.end_estimate, kPi / 2, 1e-3);
}

TEST(Catenary, EvenSymmetry) {
  const auto p = make_builtin(ProfileKind::Power, {2.0});
  const auto c = solve_catenary(p, 1.0, 0.8);
  ASSERT_TRUE(c.is_graph());
  for (double x : {0.1, 0.37, 0.75}) {
    EXPECT_NEAR(c.height_at(x), c.height_at(-x), 1e-12);
    EXPECT_NEAR(c.slope_at(x), -c.slope_at(-x), 1e-12);
  }
}

TEST(Catenary, ConvexWhenIncreasing) {
  const auto p = make_builtin(ProfileKind::Log, {2.0});
  const auto c = solve_catenary(p, 1.0, 1.0);
  for (const auto& s : c.samples) EXPECT_GT(s.dtheta, 0.0);
}

TEST(Catenary, QuadratureAgreesWithOde) {
  const auto p = make_builtin(ProfileKind::ExpInverse, {});
  const auto c = solve_catenary(p, 1.5, 1.0, 1e-11);
  EXPECT_LT(c.diagnostics.at("quadrature_mismatch"), 1e-7);
  const double u = c.height_at(0.6);
  EXPECT_NEAR(catenary_abscissa(p, 1.5, u), 0.6, 1e-7);
}

TEST(Catenary, FirstIntegralConserved) {
  for (double tol : {1e-8, 1e-10}) {
    const auto p = make_builtin(ProfileKind::Power, {1.0});
    const auto c = solve_catenary(p, 0.5, 1.0, tol);
    EXPECT_LT(first_integral_drift(c, p), 100 * tol);
  }
}

TEST(Catenary, RejectsOutsideDomain) {
  EXPECT_THROW(solve_catenary(make_builtin(ProfileKind::Log, {1.0}), -1.0), Error);
  EXPECT_THROW(solve_catenary(linear(), 0.0, -1.0), Error);
}

TEST(Lambda, GrimReaperHalfWidth) {
  const auto r = compute_lambda(linear(), 0.0);
  EXPECT_TRUE(r.finite);
  EXPECT_NEAR(r.lambda_u0, kPi / 2, 1e-6);
}

TEST(Lambda, ScalesWithSlope) {
  // u'' = m (1 + u'^2): half-width pi / (2m)
  EXPECT_NEAR(compute_lambda(linear(2.0), 0.0).lambda_u0, kPi / 4, 1e-6);
}

TEST(Lambda, LogFiniteness) {
  EXPECT_FALSE(compute_lambda(make_builtin(ProfileKind::Log, {1.0}), 1.0).finite);
  const auto r = compute_lambda(make_builtin(ProfileKind::Log, {2.0}), 1.0);
  EXPECT_TRUE(r.finite);
  EXPECT_NEAR(r.lambda_u0, 1.31103, 1e-4);
}

TEST(Lambda, ScalingInStartHeight) {
  // u -> c u(x / c) maps solutions of the alpha log z family to solutions
  const auto p = make_builtin(ProfileKind::Log, {2.0});
  const double l1 = compute_lambda(p, 1.0).lambda_u0;
  for (double c : {0.5, 2.0, 3.0}) EXPECT_NEAR(compute_lambda(p, c).lambda_u0, c * l1, 1e-6 * c);
  EXPECT_GT(compute_lambda(p, 2.0).lambda_u0, l1);
}

TEST(Lambda, MatchesNumericalBlowUp) {
  const auto p = make_builtin(ProfileKind::Log, {2.0});
  const auto c = solve_catenary(p, 1.0);
  EXPECT_NEAR(c.end_estimate, compute_lambda(p, 1.0).lambda_u0, 1e-3);
}

TEST(Bowl, LaunchCurvature) {
  const auto b = solve_bowl(linear(), 0.0, 3.0, 1e-11);
  EXPECT_NEAR(b.diagnostics.at("dtheta0_fit"), 0.5, 1e-4);
  for (const auto& s : b.samples) EXPECT_GT(s.dtheta, 0.0);
}

TEST(Bowl, LaunchCurvatureGeneralWeight) {
  const auto p = make_builtin(ProfileKind::Power, {2.0});
  const auto b = solve_bowl(p, 1.5, 1.0, 1e-11);
  EXPECT_NEAR(b.diagnostics.at("dtheta0_fit"), p.dphi(1.5) / 2, 1e-4);
}

TEST(Bowl, ContinuousInStartHeight) {
  const auto p = make_builtin(ProfileKind::Log, {1.0});
  const auto a = solve_bowl(p, 1.0, 2.0), b = solve_bowl(p, 1.0 + 1e-6, 2.0);
  double d = 0.0;
  for (double r : {0.3, 0.9, 1.5}) d = std::max(d, std::abs(a.height_at(r) - b.height_at(r)));
  EXPECT_LT(d, 1e-4);
  EXPECT_GT(d, 0.0);
}

TEST(Bowl, RequiresPositiveSlope) {
  EXPECT_THROW(solve_bowl(make_builtin(ProfileKind::Log, {-1.0}), 1.0, 1.0), Error);
}

TEST(Bowl, AsymptoticRemainderDecay) {
  const auto b = solve_bowl(linear(), 0.0, 60.0, 1e-11);
  const auto rep = fit_asymptotics(b, linear(), {5, 10}, 1e-11);
  EXPECT_GE(rep.residual_decay_rate, -2.6);
  EXPECT_LE(rep.residual_decay_rate, -1.4);
  EXPECT_FALSE(rep.observed_omega_finite);
}

TEST(Bowl, LinearGrowthReachesFarRadius) {
  const auto p = make_builtin(ProfileKind::Series, {1.0, 0.0});
  const auto b = solve_bowl(p, 1.0, 0.5);
  const auto e = extend_to_radius(b, p, 50.0);
  EXPECT_FALSE(e.omega_finite);
  EXPECT_GE(e.r_reached, 50.0);
}

TEST(Bowl, SuperlinearGrowthBlowsUp) {
  const auto p = make_builtin(ProfileKind::Power, {3.0});
  double w[2];
  int k = 0;
  for (double tol : {1e-8, 1e-10}) {
    const auto e = extend_to_radius(solve_bowl(p, 1.0, 0.5, tol), p, 50.0, tol);
    ASSERT_TRUE(e.omega_finite);
    w[k++] = e.omega_plus;
  }
  EXPECT_LT(std::abs(w[0] - w[1]) / w[1], 0.05);
}

TEST(Catenoid, AxisDistance) {
  for (double x0 : {0.5, 1.0, 2.0}) {
    auto [right, left] = solve_catenoid(linear(), x0, 0.0, 10.0, 1e-11);
    double min_x = kInf;
    for (const auto& s : left.samples) min_x = std::min(min_x, s.x);
    EXPECT_NEAR(min_x, x0, 1e-6);
    EXPECT_NEAR(left.diagnostics.at("min_axis_distance"), x0, 1e-6);
    std::vector<geom::Point2> poly;
    for (std::size_t i = left.samples.size(); i-- > 1;) poly.push_back({left.samples[i].x, left.samples[i].z});
    for (const auto& s : right.samples) poly.push_back({s.x, s.z});
    EXPECT_EQ(geom::count_self_intersections(poly), 0u);
  }
}

TEST(Catenoid, RejectsBadInput) {
  EXPECT_THROW(solve_catenoid(linear(), -1.0, 0.0, 5.0), Error);
  EXPECT_THROW(solve_catenoid(linear(), 1.0, 0.0, 0.0), Error);
}

TEST(Predicates, Orientation) {
  EXPECT_EQ(geom::orient2d({0, 0}, {1, 0}, {0, 1}), 1);
  EXPECT_EQ(geom::orient2d({0, 0}, {1, 0}, {2, 0}), 0);
  EXPECT_EQ(geom::orient2d({0, 0}, {0, 1}, {1, 0}), -1);
  EXPECT_EQ(geom::count_self_intersections({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), 1u);
}
