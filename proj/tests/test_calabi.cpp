#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "phimin/calabi.hpp"
#include "phimin/profile_solvers.hpp"

using namespace phimin;

namespace {

WeightProfile linear() { return make_builtin(ProfileKind::Linear, {1.0}); }

GraphPatch reaper_patch(double h) {
  const int n = static_cast<int>(std::lround(2.4 / h)) + 1;
  return sample_graph([](double x, double) { return -std::log(std::cos(x)); }, -1.2, 1.2, n, -1.2, 1.2, n);
}

}  // namespace

TEST(Theta, LinearBasedAtZero) {
  const auto t = make_theta(linear(), 0.0);
  for (double z : {-2.0, 0.0, 0.5, 3.0}) EXPECT_NEAR(t(z), std::expm1(z), 1e-12 * std::exp(z));
  EXPECT_NEAR(t.inverse(std::expm1(1.3)), 1.3, 1e-12);
}

TEST(Theta, LogByQuadratureAndClosedForm) {
  const auto p = make_builtin(ProfileKind::Log, {1.0});
  const auto t = make_theta(p, 2.0);
  for (double z : {0.5, 2.0, 4.0}) EXPECT_NEAR(t(z), z * z / 2 - 2.0, 1e-10);
  EXPECT_NEAR(t.inverse(6.0), 4.0, 1e-9);
}

TEST(Theta, CustomProfileUsesQuadrature) {
  const auto p = make_custom([](double z) { return z; }, [](double) { return 1.0; }, Interval{});
  const auto t = make_theta(p, 0.0);
  EXPECT_FALSE(t.closed_form);
  EXPECT_NEAR(t(1.0), std::expm1(1.0), 1e-10);
  EXPECT_NEAR(t.inverse(std::expm1(-0.7)), -0.7, 1e-9);
}

TEST(Theta, BaseOutsideDomain) {
  EXPECT_THROW(make_theta(make_builtin(ProfileKind::Log, {1.0}), -1.0), Error);
}

TEST(Dual, LinearGivesNegativeLog) {
  const auto d = make_dual(linear(), natural_theta(linear(), 0.0));
  EXPECT_EQ(d.kind(), ProfileKind::Dual);
  for (double w : {0.3, 1.0, 2.0}) {
    EXPECT_NEAR(d.phi(w), -std::log(w), 1e-12);
    EXPECT_NEAR(d.dphi(w), -1.0 / w, 1e-12);
    EXPECT_NEAR(d.ddphi(w), 1.0 / (w * w), 1e-12);
  }
  EXPECT_EQ(d.domain().lo, 0.0);
}

TEST(Dual, TwiceIsIdentity) {
  const auto p = make_builtin(ProfileKind::Power, {2.0});
  const auto d = make_dual(p, make_theta(p, 1.0));
  const auto dd = make_dual(d, natural_theta(d, 0.5));
  for (double z : {0.7, 1.0, 1.8}) EXPECT_NEAR(dd.phi(z), p.phi(z), 1e-8);
}

TEST(Forward, GrimReaperBecomesHyperbola) {
  const auto r = to_lorentz(reaper_patch(0.01), linear());
  EXPECT_EQ(r.patch.signature, Signature::Lorentzian);
  EXPECT_LT(r.report.max_slope, 1.0);
  double e = 0.0;
  for (int a = 0; a < r.patch.nx(); ++a)
    for (int b = 0; b < r.patch.ny(); ++b) {
      const double X = r.patch.x[a];
      e = std::max(e, std::abs(r.patch.u(a, b) - std::sqrt(1 + X * X)));
    }
  EXPECT_LT(e, 1e-3);
  EXPECT_LT(r.report.equation_residual, 5e-3);
  EXPECT_LT(r.report.mean_curvature_error, 0.05);
}

TEST(Forward, ResidualConvergesSecondOrder) {
  const double a = to_lorentz(reaper_patch(0.02), linear()).report.equation_residual;
  const double b = to_lorentz(reaper_patch(0.01), linear()).report.equation_residual;
  EXPECT_GT(a / b, 3.0);
}

TEST(RoundTrip, GrimReaper) {
  const double h = 0.02;
  const auto fwd = to_lorentz(reaper_patch(h), linear());
  const auto back = from_lorentz(fwd.patch, fwd.profile);
  double e = 0.0;
  for (int a = 0; a < back.patch.nx(); ++a)
    for (int b = 0; b < back.patch.ny(); ++b)
      e = std::max(e, std::abs(back.patch.u(a, b) + std::log(std::cos(back.patch.x[a]))));
  EXPECT_LT(e, 10 * h);
  EXPECT_LT(e, 1e-3);
}

TEST(RoundTrip, Bowl) {
  const auto bowl = solve_bowl(linear(), 0.0, 3.0);
  const auto pb = rotational_patch(bowl, -1, 1, 101, -1, 1, 101);
  const auto fwd = to_lorentz(pb, linear());
  const auto back = from_lorentz(fwd.patch, fwd.profile);
  double e = 0.0;
  for (int a = 0; a < back.patch.nx(); ++a)
    for (int b = 0; b < back.patch.ny(); ++b)
      e = std::max(e, std::abs(back.patch.u(a, b) - bowl.height_at(std::hypot(back.patch.x[a], back.patch.y[b]))));
  EXPECT_LT(e, 10 * pb.hx());
}

TEST(Backward, LorentzSolitonGivesSemicircle) {
  const auto sol = sample_graph([](double X, double) { return -std::log(std::cosh(X)); }, -2, 2, 201, -1, 1, 101,
                                Signature::Lorentzian);
  const auto r = from_lorentz(sol, linear());
  double e = 0.0;
  for (int a = 0; a < r.patch.nx(); ++a)
    for (int b = 0; b < r.patch.ny(); ++b) e = std::max(e, std::abs(r.patch.u(a, b) - std::sqrt(1 - r.patch.x[a] * r.patch.x[a])));
  EXPECT_LT(e, 1e-3);
}

TEST(Backward, RejectsTimelikeInput) {
  const auto bad = sample_graph([](double x, double) { return 1.5 * x; }, -1, 1, 21, -1, 1, 21, Signature::Lorentzian);
  try {
    from_lorentz(bad, linear());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SpacelikeViolation);
  }
}

TEST(Forward, DetectsFoldOver) {
  const auto pg = sample_graph([](double x, double) { return -std::log(std::cos(x)); }, -(std::numbers::pi / 2 - 1e-8),
                               1.0, 101, -1, 1, 11);
  try {
    to_lorentz(pg, linear());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::FoldOver);
  }
}

TEST(Potential, NonSolutionIsNotIntegrable) {
  const auto pq = sample_graph([](double x, double y) { return x * x + 0.5 * y * y * x; }, -1, 1, 101, -1, 1, 101);
  try {
    integrate_potential(pq, linear());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IntegrabilityFailure);
  }
}

TEST(Potential, VanishesAtOrigin) {
  const auto pp = integrate_potential(reaper_patch(0.02), linear());
  const int c = static_cast<int>(pp.x.size()) / 2;
  EXPECT_NEAR(pp.px(c, c), 0.0, 1e-12);
  EXPECT_NEAR(pp.py(c, c), 0.0, 1e-12);
  // grad of the potential is (tan x, y) for the grim reaper with theta = e^z
  EXPECT_NEAR(pp.px(c + 30, c), std::tan(pp.x[c + 30]), 1e-4);
  EXPECT_NEAR(pp.py(c, c + 30), pp.y[c + 30], 1e-4);
}
