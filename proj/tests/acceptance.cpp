// One line per acceptance criterion; exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "phimin/phimin.hpp"

using namespace phimin;

namespace {

const double kPi = std::numbers::pi;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string f(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

WeightProfile linear() { return make_builtin(ProfileKind::Linear, {1.0}); }

GraphPatch reaper_patch(double h, double half = 1.2) {
  const int n = static_cast<int>(std::lround(2 * half / h)) + 1;
  return sample_graph([](double x, double) { return -std::log(std::cos(x)); }, -half, half, n, -half, half, n);
}

double interior_abs_max(const Eigen::MatrixXd& r, int margin) {
  double m = 0.0;
  for (int i = margin; i + margin < r.rows(); ++i)
    for (int j = margin; j + margin < r.cols(); ++j)
      if (!std::isnan(r(i, j))) m = std::max(m, std::abs(r(i, j)));
  return m;
}

Outcome c1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto c = solve_catenary(linear(), 0.0, kInf, 1e-12);
  const double dt = seconds_since(t0);
  double err = 0.0;
  int n = 0;
  for (const auto& s : c.samples)
    if (std::abs(s.x) <= 1.45) {
      err = std::max(err, std::abs(s.z + std::log(std::cos(s.x))));
      ++n;
    }
  return {err <= 1e-8 && dt < 1.0 && n > 100, f("sup error %.2e on |x|<=1.45 (%d samples), %.3f s", err, n, dt)};
}

Outcome c2() {
  const auto r = compute_lambda(linear(), 0.0);
  // exp(-phi) = z^-alpha for Log(alpha): integrable at infinity iff alpha > 1
  bool flags = true;
  std::string s;
  for (double alpha : {1.0, 2.0}) {
    const auto q = compute_lambda(make_builtin(ProfileKind::Log, {alpha}), 1.0);
    flags = flags && q.finite == (alpha > 1.0);
    s += f(", Log(%g) %s", alpha, q.finite ? "finite" : "infinite");
  }
  const double e = std::abs(r.lambda_u0 - kPi / 2);
  return {e <= 1e-6 && flags, f("|Lambda - pi/2| = %.2e", e) + s};
}

Outcome c3() {
  struct Case {
    const char* name;
    WeightProfile p;
    double u0, x_max;
  };
  const std::vector<Case> cases{
      {"linear full", linear(), 0.0, kInf},
      {"log2", make_builtin(ProfileKind::Log, {2.0}), 1.0, 1.2},
      {"power2", make_builtin(ProfileKind::Power, {2.0}), 1.0, 0.9},
      {"power-2", make_builtin(ProfileKind::Power, {-2.0}), 1.0, 2.0},
      {"exp-inverse", make_builtin(ProfileKind::ExpInverse, {}), 1.0, 1.5},
      {"series", make_builtin(ProfileKind::Series, {1.0, 0.5}), 0.5, 1.0},
  };
  bool ok = true;
  double worst_ratio = 0.0;
  for (double tol : {1e-8, 1e-10})
    for (const auto& c : cases) {
      const auto curve = solve_catenary(c.p, c.u0, c.x_max, tol);
      const double ratio = first_integral_drift(curve, c.p) / tol;
      worst_ratio = std::max(worst_ratio, ratio);
      ok = ok && ratio <= 100.0;
    }
  return {ok, f("worst drift / tol = %.1f over %zu catenaries at tol 1e-8 and 1e-10", worst_ratio, 2 * cases.size())};
}

Outcome c4() {
  const double s_max = 5.0;
  const auto b = solve_bowl(linear(), 0.0, s_max, 1e-11);
  const double fit = b.diagnostics.at("dtheta0_fit");
  double min_k = kInf;
  for (const auto& s : b.samples) min_k = std::min(min_k, s.dtheta);
  const bool reached = b.samples.back().s >= s_max - 1e-9;
  return {std::abs(fit - 0.5) <= 1e-4 && min_k > 0.0 && reached,
          f("theta'(0) fit %.8f, min theta' %.3e on [0, %g]", fit, min_k, s_max)};
}

Outcome c5() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto b = solve_bowl(linear(), 0.0, 60.0, 1e-11);
  const auto rep = fit_asymptotics(b, linear(), {5, 10}, 1e-11);
  // u(r) - r^2/2 + log r along the radius: increments must shrink (G(u) = u here)
  const auto ext = extend_to_radius(b, linear(), 40.0, 1e-11);
  auto rem = [&](double r) {
    const auto& v = ext.samples;
    std::size_t i = 1;
    while (i + 1 < v.size() && v[i].r < r) ++i;
    const double h = v[i].r - v[i - 1].r, t = (r - v[i - 1].r) / h;
    const double g = (1 + 2 * t) * (1 - t) * (1 - t) * v[i - 1].g + t * (1 - t) * (1 - t) * h * v[i - 1].dg +
                     t * t * (3 - 2 * t) * v[i].g + t * t * (t - 1) * h * v[i].dg;
    return g - r * r / 2 + std::log(r);
  };
  const double d1 = std::abs(rem(10) - rem(5)), d2 = std::abs(rem(20) - rem(10)), d3 = std::abs(rem(40) - rem(20));
  const double dt = seconds_since(t0);
  const double a = rep.residual_decay_rate;
  const bool ok = a >= -2.6 && a <= -1.4 && d2 < d1 && d3 < d2 && dt < 30.0;
  return {ok, f("decay exponent %.3f, remainder increments %.2e %.2e %.2e, %.2f s", a, d1, d2, d3, dt)};
}

Outcome c6() {
  const auto pu = make_builtin(ProfileKind::Series, {1.0, 0.0});
  const auto eu = extend_to_radius(solve_bowl(pu, 1.0, 0.5), pu, 50.0);
  const auto p3 = make_builtin(ProfileKind::Power, {3.0});
  double w[2];
  bool fin = true;
  int k = 0;
  for (double tol : {1e-8, 1e-10}) {
    const auto e = extend_to_radius(solve_bowl(p3, 1.0, 0.5, tol), p3, 50.0, tol);
    fin = fin && e.omega_finite;
    w[k++] = e.omega_plus;
  }
  const double spread = std::abs(w[0] - w[1]) / w[1];
  const bool ok = !eu.omega_finite && eu.r_reached >= 50.0 && fin && spread <= 0.05;
  return {ok, f("phi'=u reaches r=%.1f; phi'=u^3 omega %.5f / %.5f (spread %.1e)", eu.r_reached, w[0], w[1], spread)};
}

Outcome c7() {
  const auto c = solve_catenary(linear(), 0.0, 1.3, 1e-12, 0.01);
  std::vector<double> res;
  for (double h : {2e-2, 1e-2, 5e-3}) {
    const int n = static_cast<int>(std::lround(2.4 / h)) + 1;
    const auto t = tilt_cylinder(resample_graph(c, -1.2, 1.2, n), kPi / 4, {-0.5, 0.5},
                                 static_cast<int>(std::lround(1.0 / h)) + 1);
    res.push_back(max_abs(mean_curvature_residual(t, linear())));
  }
  const double rate1 = std::log2(res[0] / res[1]), rate2 = std::log2(res[1] / res[2]);
  return {res[1] <= 5e-3 && rate1 >= 1.0 && rate2 >= 1.0,
          f("residual %.2e / %.2e / %.2e at h = 2e-2, 1e-2, 5e-3; rates %.2f, %.2f", res[0], res[1], res[2], rate1, rate2)};
}

Outcome c8() {
  bool ok = true;
  std::string s;
  for (double x0 : {0.5, 1.0, 2.0}) {
    auto [right, left] = solve_catenoid(linear(), x0, 0.0, 10.0, 1e-11);
    std::vector<geom::Point2> poly;
    for (std::size_t i = left.samples.size(); i-- > 1;) poly.push_back({left.samples[i].x, left.samples[i].z});
    for (const auto& q : right.samples) poly.push_back({q.x, q.z});
    double min_x = kInf;
    for (const auto& q : left.samples) min_x = std::min(min_x, q.x);
    for (const auto& q : right.samples) min_x = std::min(min_x, q.x);
    const std::size_t cross = geom::count_self_intersections(poly);
    ok = ok && cross == 0 && std::abs(min_x - x0) <= 1e-6;
    s += f("%sx0=%g: %zu crossings, |d - x0| %.1e", s.empty() ? "" : "; ", x0, cross, std::abs(min_x - x0));
  }
  return {ok, s};
}

Outcome c9() {
  double lfe[2], hh = 0.0, slope = 0.0, exact = 0.0;
  int k = 0;
  for (double h : {2e-2, 1e-2}) {
    const auto r = to_lorentz(reaper_patch(h), linear());
    // transformed weight is -log w
    const auto dual = make_builtin(ProfileKind::Log, {-1.0});
    for (double w : {0.5, 2.0})
      if (std::abs(r.profile.phi(w) - dual.phi(w)) > 1e-12) return {false, "transformed weight is not -log w"};
    lfe[k++] = interior_abs_max(lfe_residual(r.patch, dual), 2);
    hh = r.report.mean_curvature_error;
    slope = max_slope(r.patch);
    exact = 0.0;
    for (int a = 0; a < r.patch.nx(); ++a)
      for (int b = 0; b < r.patch.ny(); ++b)
        exact = std::max(exact, std::abs(r.patch.u(a, b) - std::hypot(1.0, r.patch.x[a])));
  }
  const double order = std::log2(lfe[0] / lfe[1]);
  const bool ok = slope < 1.0 && lfe[1] <= 5e-3 && order >= 1.8 && hh <= 0.05;
  return {ok, f("max slope %.3f, lfe residual %.2e / %.2e (order %.2f), hh error %.2e, |u - sqrt(1+x^2)| %.1e", slope,
                lfe[0], lfe[1], order, hh, exact)};
}

Outcome c10() {
  const double h = 0.02;
  const auto fwd = to_lorentz(reaper_patch(h), linear());
  const auto back = from_lorentz(fwd.patch, fwd.profile);
  double e1 = 0.0;
  for (int a = 0; a < back.patch.nx(); ++a)
    for (int b = 0; b < back.patch.ny(); ++b)
      e1 = std::max(e1, std::abs(back.patch.u(a, b) + std::log(std::cos(back.patch.x[a]))));
  const auto bowl = solve_bowl(linear(), 0.0, 3.0);
  const auto pb = rotational_patch(bowl, -1, 1, 101, -1, 1, 101);
  const auto fb = to_lorentz(pb, linear());
  const auto bb = from_lorentz(fb.patch, fb.profile);
  double e2 = 0.0;
  for (int a = 0; a < bb.patch.nx(); ++a)
    for (int b = 0; b < bb.patch.ny(); ++b)
      e2 = std::max(e2, std::abs(bb.patch.u(a, b) - bowl.height_at(std::hypot(bb.patch.x[a], bb.patch.y[b]))));
  return {e1 <= 10 * h && e2 <= 10 * pb.hx(),
          f("grim reaper %.2e (bound %.2e), bowl %.2e (bound %.2e)", e1, 10 * h, e2, 10 * pb.hx())};
}

Outcome c11() {
  const auto cat = solve_catenary(linear(), 0.0, 1.5);
  const auto cs = cylinder_gauss_field(cat, {-1, 1}, 201, {-1, 1}, 201);
  const auto rep = integrate_representation(cs.field);
  const double d = translated_distance(rep.mesh.vertices, cs.positions), h = cs.field.hu();
  return {d <= 10 * h && rep.report.path_discrepancy <= 1e-6,
          f("distance %.2e (bound %.2e), path discrepancy %.2e", d, 10 * h, rep.report.path_discrepancy)};
}

Outcome c12() {
  const auto bowl = solve_bowl(linear(), 0.0, 4.0);
  const double r0 = 1.0, th = std::atan(bowl.slope_at(r0)), z0 = bowl.height_at(r0);
  const auto sol = solve_bjorling(circle_data(r0, z0, th, 12), 1.0, 0.1);
  const auto rep = bjorling_surface(sol);
  // distance to the surface of revolution of the generating curve
  double err = 0.0;
  for (const auto& p : rep.mesh.vertices) {
    const double r = std::hypot(p.x(), p.y());
    auto d2 = [&](double s) {
      const auto q = bowl.point_at(s);
      return (q.x - r) * (q.x - r) + (q.z - p.z()) * (q.z - p.z());
    };
    const auto m = boost::math::tools::brent_find_minima(d2, std::max(0.0, r - 0.5), r + 0.5, 40);
    err = std::max(err, std::sqrt(m.second));
  }
  const double pde = max_abs(gauss_pde_residual(sol.field));
  return {err <= 1e-3 && pde <= 1e-4,
          f("surface vs bowl %.2e, series PDE residual %.2e", err, pde)};
}

Outcome c13() {
  const double thr = 1e-2;
  const auto quad = sample_graph([](double x, double) { return x * x; }, -1, 1, 41, -1, 1, 41);
  const double r1 = max_abs(fe_residual(quad, linear()));
  const auto steep = sample_graph([](double x, double y) { return 1.5 * x + 0.1 * y; }, -1, 1, 41, -1, 1, 41,
                                  Signature::Lorentzian);
  bool rejected = false;
  try {
    lfe_residual(steep, linear());
  } catch (const Error& e) {
    rejected = e.kind() == ErrorKind::SpacelikeViolation;
  }
  const double r2 = max_abs(lfe_residual_unchecked(steep, linear()));
  const auto cyl = sample_graph([](double x, double) { return std::sqrt(1 - x * x); }, -0.8, 0.8, 81, -0.5, 0.5, 51);
  const double r3 = max_abs(mean_curvature_residual(patch_mesh(cyl), linear()));
  const bool ok = r1 > 10 * thr && rejected && r2 > 10 * thr && r3 > 10 * thr;
  return {ok, f("u=x^2 fe %.2f; non-spacelike lfe %s, %.2f; round cylinder %.2f (threshold %.0e)", r1,
                rejected ? "rejected" : "accepted", r2, r3, thr)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"grim reaper oracle", c1},     {"half-width quadrature", c2}, {"first integral", c3},
      {"bowl launch", c4},            {"asymptotic law", c5},        {"growth dichotomy", c6},
      {"tilt identity", c7},          {"catenoid embeddedness", c8}, {"Calabi forward", c9},
      {"Calabi round trip", c10},     {"Weierstrass reconstruction", c11}, {"Bjorling rotational check", c12},
      {"negative controls", c13},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o{false, ""};
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
