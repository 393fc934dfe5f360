#pragma once

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phimin/error.hpp"
#include "phimin/geometry.hpp"
#include "phimin/parallel.hpp"
#include "phimin/quadrature.hpp"
#include "phimin/surface_builder.hpp"
#include "phimin/weight_profile.hpp"

namespace phimin {

/// A primitive theta of exp(phi). `base_point` is where theta vanishes, NaN
/// for the closed-form primitive of the kind.
struct ThetaPrimitive {
  std::function<double(double)> value;
  std::function<double(double)> inverse;
  double base_point = std::numeric_limits<double>::quiet_NaN();
  bool closed_form = false;

  double operator()(double z) const { return value(z); }
};

namespace detail {

inline double theta_tail(const WeightProfile& p, double from, double to) {
  auto f = [&](double z) { return std::exp(p.phi(z)); };
  if (std::isfinite(to)) return to >= from ? quad::integrate(f, from, to) : -quad::integrate(f, to, from);
  const double sgn = to > 0 ? 1.0 : -1.0;
  auto r = quad::integrate_tail([&](double t) { return f(from + sgn * t); }, 0.0);
  return r.converged ? sgn * r.value : sgn * kInf;
}

}  // namespace detail

/// theta with theta(base) = 0. Uses the closed-form primitive of the kind
/// when there is one, quadrature otherwise.
inline ThetaPrimitive make_theta(const WeightProfile& p, double base) {
  if (!p.domain().contains(base)) throw Error(ErrorKind::OutOfRange, "theta base point outside the profile domain");
  ThetaPrimitive t;
  t.base_point = base;
  if (const auto& nat = p.natural_primitive()) {
    const double c = nat->value(base);
    auto v = nat->value;
    auto inv = nat->inverse;
    t.value = [v, c](double z) { return v(z) - c; };
    t.inverse = [inv, c](double w) { return inv(w + c); };
    t.closed_form = true;
    return t;
  }
  auto prof = std::make_shared<WeightProfile>(p);
  t.value = [prof, base](double z) { return detail::theta_tail(*prof, base, z); };
  t.inverse = [prof, base](double w) {
    const Interval& d = prof->domain();
    if (std::isinf(w)) return w > 0 ? d.hi : d.lo;
    // theta is increasing with derivative exp(phi) > 0: Newton inside a bracket.
    double lo = base, hi = base, step = 1.0;
    auto th = [&](double z) { return detail::theta_tail(*prof, base, z); };
    while (th(lo) > w) {
      lo = std::isfinite(d.lo) ? d.lo + 0.5 * (lo - d.lo) : lo - step;
      step *= 2.0;
      if (!std::isfinite(lo) || step > 1e300) throw Error(ErrorKind::OutOfRange, "theta inverse out of range");
      if (std::isfinite(d.lo) && lo - d.lo < 1e-300) throw Error(ErrorKind::OutOfRange, "theta inverse out of range");
    }
    step = 1.0;
    while (th(hi) < w) {
      hi = std::isfinite(d.hi) ? d.hi - 0.5 * (d.hi - hi) : hi + step;
      step *= 2.0;
      if (!std::isfinite(hi) || step > 1e300) throw Error(ErrorKind::OutOfRange, "theta inverse out of range");
      if (std::isfinite(d.hi) && d.hi - hi < 1e-300) throw Error(ErrorKind::OutOfRange, "theta inverse out of range");
    }
    double z = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      const double f = th(z) - w;
      if (f > 0) hi = z;
      else lo = z;
      double zn = z - f / std::exp(prof->phi(z));
      if (!(zn > lo && zn < hi)) zn = 0.5 * (lo + hi);
      if (std::abs(zn - z) <= 1e-14 * std::max(1.0, std::abs(z))) return zn;
      z = zn;
    }
    return z;
  };
  return t;
}

/// The closed-form primitive when available, otherwise theta based at
/// `fallback_base`.
inline ThetaPrimitive natural_theta(const WeightProfile& p, double fallback_base) {
  if (const auto& nat = p.natural_primitive()) {
    ThetaPrimitive t;
    t.value = nat->value;
    t.inverse = nat->inverse;
    t.closed_form = true;
    return t;
  }
  return make_theta(p, fallback_base);
}

/// The transformed weight w -> -phi(theta^{-1}(w)) on theta(domain).
inline WeightProfile make_dual(const WeightProfile& base, const ThetaPrimitive& th) {
  const Interval& d = base.domain();
  auto lim = [&](double z) {
    if (th.closed_form) return th.value(z);
    return detail::theta_tail(base, th.base_point, z);
  };
  Interval dom{lim(d.lo), lim(d.hi)};
  if (std::isnan(dom.lo) || std::isnan(dom.hi) || !(dom.lo < dom.hi))
    throw Error(ErrorKind::DegenerateRange, "theta does not map the domain onto an interval");
  auto b = std::make_shared<WeightProfile>(base);
  auto inv = th.inverse;
  auto fwd = th.value;
  ProfileSpec spec{ProfileKind::Dual, {th.base_point}, dom, std::make_shared<ProfileSpec>(base.spec())};
  WeightProfile out(
      spec, [b, inv](double w) { return -b->phi(inv(w)); },
      [b, inv](double w) {
        const double z = inv(w);
        return -b->dphi(z) * std::exp(-b->phi(z));
      },
      [b, inv](double w) {
        const double z = inv(w), f = b->dphi(z);
        return -(b->ddphi(z) - f * f) * std::exp(-2.0 * b->phi(z));
      },
      -base.phi_at_lo(), -base.phi_at_hi());
  out.with_inverse([b, fwd](double v) { return fwd(inverse_phi(*b, -v)); });
  out.with_primitive({inv, fwd});
  out.with_dual_base(b);
  return out;
}

/// Rebuilds a profile from its serializable description.
inline WeightProfile make_profile(const ProfileSpec& spec) {
  switch (spec.kind) {
    case ProfileKind::Custom:
      throw Error(ErrorKind::InvalidParameter, "custom profiles cannot be rebuilt from a description");
    case ProfileKind::Dual: {
      if (!spec.base) throw Error(ErrorKind::InvalidParameter, "dual profile without base");
      const WeightProfile base = make_profile(*spec.base);
      const double b = spec.params.empty() ? std::numeric_limits<double>::quiet_NaN() : spec.params[0];
      return make_dual(base, std::isnan(b) ? natural_theta(base, 0.0) : make_theta(base, b));
    }
    default:
      return make_builtin(spec.kind, std::span<const double>(spec.params), spec.domain);
  }
}

namespace detail {

struct GraphFields {
  Eigen::MatrixXd ux, uy, uxx, uxy, uyy, w;
};

/// Fourth-order derivative fields; w = sqrt(1 +/- |grad u|^2).
inline GraphFields graph_fields(const GraphPatch& patch) {
  GraphFields g;
  const double hx = patch.hx(), hy = patch.hy();
  g.ux = grid_diff(patch.u, hx, 0);
  g.uy = grid_diff(patch.u, hy, 1);
  g.uxx = grid_diff(g.ux, hx, 0);
  g.uyy = grid_diff(g.uy, hy, 1);
  g.uxy = 0.5 * (grid_diff(g.ux, hy, 1) + grid_diff(g.uy, hx, 0));
  const double s = patch.signature == Signature::Euclidean ? 1.0 : -1.0;
  g.w = (1.0 + s * (g.ux.array().square() + g.uy.array().square())).sqrt().matrix();
  return g;
}

/// Mean and Gauss curvature of a graph from its derivatives. Euclidean:
/// H = -div(grad u / W), K = det/W^4. Lorentzian: H = div(grad u / W),
/// K = -det/W^4.
inline std::pair<double, double> graph_curvatures(Signature sig, double ux, double uy, double uxx, double uxy,
                                                  double uyy) {
  const double det = uxx * uyy - uxy * uxy;
  if (sig == Signature::Euclidean) {
    const double w = std::sqrt(1 + ux * ux + uy * uy);
    const double div = ((1 + uy * uy) * uxx + (1 + ux * ux) * uyy - 2 * ux * uy * uxy) / (w * w * w);
    return {-div, det / std::pow(w, 4)};
  }
  const double w = std::sqrt(1 - ux * ux - uy * uy);
  const double div = ((1 - uy * uy) * uxx + (1 - ux * ux) * uyy + 2 * ux * uy * uxy) / (w * w * w);
  return {div, -det / std::pow(w, 4)};
}

}  // namespace detail

/// Gradient of the Calabi potential on the grid of a graph patch.
struct PotentialPatch {
  std::vector<double> x, y;
  Eigen::MatrixXd px, py;            ///< the gradient (phi_x, phi_y)
  Eigen::MatrixXd hxx, hxy, hyy;     ///< its prescribed Hessian
  double discrepancy = 0.0;          ///< max difference between the two integration paths
  Signature signature = Signature::Euclidean;
};

/// Integrates the Hessian system of the potential along x-then-y and
/// y-then-x paths, averages them and normalizes the gradient to vanish at
/// the coordinate origin (the nearest node when the origin is outside).
/// Throws IntegrabilityFailure when the paths disagree by more than
/// `tol` relative to the gradient scale.
inline PotentialPatch integrate_potential(const GraphPatch& patch, const WeightProfile& p, double tol = 1e-2) {
  patch.validate();
  const int nx = patch.nx(), ny = patch.ny();
  const bool euc = patch.signature == Signature::Euclidean;
  const auto g = detail::graph_fields(patch);
  PotentialPatch out;
  out.x = patch.x;
  out.y = patch.y;
  out.signature = patch.signature;
  out.hxx.resize(nx, ny);
  out.hxy.resize(nx, ny);
  out.hyy.resize(nx, ny);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const double u = patch.u(i, j);
      if (!p.domain().contains(u))
        throw Error(ErrorKind::OutOfRange, "patch height " + std::to_string(u) + " outside the profile domain");
      const double ux = g.ux(i, j), uy = g.uy(i, j), w = g.w(i, j);
      if (!euc && !(w > 0.0)) throw Error(ErrorKind::SpacelikeViolation, "patch is not spacelike");
      const double e = std::exp(p.phi(u)) / w;
      const double s = euc ? 1.0 : -1.0;
      out.hxx(i, j) = e * (1 + s * ux * ux);
      out.hxy(i, j) = s * e * ux * uy;
      out.hyy(i, j) = e * (1 + s * uy * uy);
    }
  const double hx = patch.hx(), hy = patch.hy();
  const Eigen::MatrixXd A = detail::cumulative(out.hxx, hx, 0), B = detail::cumulative(out.hxy, hy, 1);
  const Eigen::MatrixXd C = detail::cumulative(out.hxy, hx, 0), D = detail::cumulative(out.hyy, hy, 1);
  Eigen::MatrixXd p1(nx, ny), p2(nx, ny), q1(nx, ny), q2(nx, ny);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      p1(i, j) = A(i, 0) + B(i, j);
      p2(i, j) = B(0, j) + A(i, j);
      q1(i, j) = C(i, 0) + D(i, j);
      q2(i, j) = D(0, j) + C(i, j);
    }
  out.px = 0.5 * (p1 + p2);
  out.py = 0.5 * (q1 + q2);
  const double gx0 = std::clamp(0.0, patch.x.front(), patch.x.back());
  const double gy0 = std::clamp(0.0, patch.y.front(), patch.y.back());
  const double cx = interpolate(out.x, out.y, out.px, gx0, gy0), cy = interpolate(out.x, out.y, out.py, gx0, gy0);
  out.px.array() -= cx;
  out.py.array() -= cy;
  out.discrepancy = std::max((p1 - p2).cwiseAbs().maxCoeff(), (q1 - q2).cwiseAbs().maxCoeff());
  const double scale = std::max({1.0, out.px.cwiseAbs().maxCoeff(), out.py.cwiseAbs().maxCoeff()});
  if (!std::isfinite(out.discrepancy) || out.discrepancy > tol * scale)
    throw Error(ErrorKind::IntegrabilityFailure,
                "integration paths disagree by " + std::to_string(out.discrepancy), out.discrepancy);
  return out;
}

struct TransformOptions {
  int nx = 0, ny = 0;                  ///< output grid (0: same counts as the input)
  double fold_eps = 1e-6;              ///< threshold on 1/W (Euclidean) or W (Lorentzian)
  double integrability_tol = 1e-2;
  std::optional<double> theta_base;    ///< base point of theta; closed form when absent
  int check_margin = 2;                ///< boundary nodes left out of the checks
};

/// Consistency measures of a transformed patch.
struct TransformReport {
  double potential_discrepancy = 0.0;
  double equation_residual = 0.0;      ///< max |graph equation| of the output
  double gauss_map_error = 0.0;        ///< output gradient vs grad u / W
  double conformal_error = 0.0;        ///< relative, induced metric vs e^{2 phi} g / W^2
  double mean_curvature_error = 0.0;   ///< relative, H_out + W^2 e^{-phi} H_in
  double gauss_curvature_error = 0.0;  ///< relative, K_out + W^4 e^{-2 phi} K_in
  double min_w = 0.0;                  ///< smallest W of the input (Lorentzian) or 1/W (Euclidean)
  double max_slope = 0.0;              ///< largest |grad| of the output
};

struct TransformResult {
  GraphPatch patch;
  WeightProfile profile;
  ThetaPrimitive theta;
  PotentialPatch potential;
  Eigen::MatrixXd pre_x, pre_y;  ///< preimage of each output node
  TransformReport report;
};

namespace detail {

inline TransformResult calabi_transform(const GraphPatch& in, const WeightProfile& p, const TransformOptions& opt) {
  in.validate();
  const Signature src = in.signature;
  const Signature dst = src == Signature::Euclidean ? Signature::Lorentzian : Signature::Euclidean;
  const int nx = in.nx(), ny = in.ny();
  const auto g = graph_fields(in);
  if (src == Signature::Lorentzian && !(g.w.minCoeff() > 0.0))
    throw Error(ErrorKind::SpacelikeViolation, "input patch is not spacelike");

  // Fold-over: degenerate Hessian where W blows up (Euclidean) or vanishes
  // (Lorentzian).
  double min_w = kInf;
  int fi = 0, fj = 0;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const double q = src == Signature::Euclidean ? 1.0 / g.w(i, j) : g.w(i, j);
      if (q < min_w) {
        min_w = q;
        fi = i;
        fj = j;
      }
    }
  auto where = [&](int i, int j) { return "(" + std::to_string(in.x[i]) + ", " + std::to_string(in.y[j]) + ")"; };
  if (!(min_w > opt.fold_eps))
    throw Error(ErrorKind::FoldOver, "Hessian of the potential degenerates near " + where(fi, fj), min_w);

  PotentialPatch pot = integrate_potential(in, p, opt.integrability_tol);
  for (int i = 0; i + 1 < nx; ++i)
    for (int j = 0; j + 1 < ny; ++j) {
      auto area = [&](int a0, int b0, int a1, int b1, int a2, int b2) {
        const double ux = pot.px(a1, b1) - pot.px(a0, b0), uy = pot.py(a1, b1) - pot.py(a0, b0);
        const double vx = pot.px(a2, b2) - pot.px(a0, b0), vy = pot.py(a2, b2) - pot.py(a0, b0);
        return ux * vy - uy * vx;
      };
      if (!(area(i, j, i + 1, j, i + 1, j + 1) > 0.0) || !(area(i, j, i + 1, j + 1, i, j + 1) > 0.0))
        throw Error(ErrorKind::FoldOver, "gradient map folds over near " + where(i, j));
    }

  double ulo = kInf;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) ulo = std::min(ulo, in.u(i, j));
  const ThetaPrimitive th = opt.theta_base ? make_theta(p, *opt.theta_base) : natural_theta(p, ulo);
  const bool back_to_base = p.kind() == ProfileKind::Dual && p.dual_base() && !opt.theta_base &&
                            p.natural_primitive().has_value();
  WeightProfile out_profile = back_to_base ? *p.dual_base() : make_dual(p, th);

  // Largest axis-aligned rectangle inside the image of the grid.
  double X0 = -kInf, X1 = kInf, Y0 = -kInf, Y1 = kInf;
  for (int j = 0; j < ny; ++j) {
    X0 = std::max(X0, pot.px(0, j));
    X1 = std::min(X1, pot.px(nx - 1, j));
  }
  for (int i = 0; i < nx; ++i) {
    Y0 = std::max(Y0, pot.py(i, 0));
    Y1 = std::min(Y1, pot.py(i, ny - 1));
  }
  if (!(X1 > X0) || !(Y1 > Y0)) throw Error(ErrorKind::DegenerateRange, "image of the grid contains no rectangle");
  const double shrink = 1e-12 * std::max({1.0, std::abs(X0), std::abs(X1), std::abs(Y0), std::abs(Y1)});
  const int mx = opt.nx > 0 ? opt.nx : nx, my = opt.ny > 0 ? opt.ny : ny;

  GraphPatch outp;
  outp.signature = dst;
  outp.x = linspace(X0 + shrink, X1 - shrink, mx);
  outp.y = linspace(Y0 + shrink, Y1 - shrink, my);
  outp.u.resize(mx, my);
  Eigen::MatrixXd pre_x(mx, my), pre_y(mx, my);

  auto ip = [&](const Eigen::MatrixXd& f, double x, double y) { return interpolate(in.x, in.y, f, x, y); };
  // The rectangle edges come from node values; between nodes the preimage
  // may sit a hair outside the grid.
  const double slack_x = 0.5 * in.hx(), slack_y = 0.5 * in.hy();
  std::mutex err_mu;
  std::exception_ptr err;
  parallel_for(static_cast<std::size_t>(my), [&](std::size_t jj) {
    const int b = static_cast<int>(jj);
    try {
      const double Y = outp.y[b];
      double x = 0, y = 0;
      {
        double best = kInf;
        const double X = outp.x[0];
        for (int i = 0; i < nx; ++i)
          for (int j = 0; j < ny; ++j) {
            const double d = std::hypot(pot.px(i, j) - X, pot.py(i, j) - Y);
            if (d < best) {
              best = d;
              x = in.x[i];
              y = in.y[j];
            }
          }
      }
      for (int a = 0; a < mx; ++a) {
        const double X = outp.x[a];
        const double scale = std::max({1.0, std::abs(X), std::abs(Y)});
        bool ok = false;
        for (int it = 0; it < 60; ++it) {
          const double fx = ip(pot.px, x, y) - X, fy = ip(pot.py, x, y) - Y;
          const double r = std::hypot(fx, fy);
          if (r <= 1e-14 * scale) {
            ok = true;
            break;
          }
          const double a11 = ip(pot.hxx, x, y), a12 = ip(pot.hxy, x, y), a22 = ip(pot.hyy, x, y);
          const double det = a11 * a22 - a12 * a12;
          double dx = -(a22 * fx - a12 * fy) / det, dy = -(-a12 * fx + a11 * fy) / det;
          double t = 1.0;
          for (int k = 0; k < 30; ++k) {
            const double xn = std::clamp(x + t * dx, in.x.front() - slack_x, in.x.back() + slack_x);
            const double yn = std::clamp(y + t * dy, in.y.front() - slack_y, in.y.back() + slack_y);
            if (std::hypot(ip(pot.px, xn, yn) - X, ip(pot.py, xn, yn) - Y) < r || k == 29) {
              x = xn;
              y = yn;
              break;
            }
            t *= 0.5;
          }
          if (it > 3 && r <= 1e-11 * scale && std::hypot(t * dx, t * dy) < 1e-15 * scale) {
            ok = true;
            break;
          }
        }
        if (!ok) throw Error(ErrorKind::FoldOver, "gradient map could not be inverted at (" + std::to_string(X) + ", " +
                                                      std::to_string(Y) + ")");
        pre_x(a, b) = x;
        pre_y(a, b) = y;
        outp.u(a, b) = th(ip(in.u, x, y));
      }
    } catch (...) {
      std::lock_guard lk(err_mu);
      if (!err) err = std::current_exception();
    }
  });
  if (err) std::rethrow_exception(err);
  outp.validate();

  TransformReport rep;
  rep.potential_discrepancy = pot.discrepancy;
  rep.min_w = min_w;
  rep.max_slope = max_slope(outp);
  if (dst == Signature::Lorentzian && !(rep.max_slope < 1.0))
    throw Error(ErrorKind::SpacelikeViolation, "transformed patch is not spacelike", rep.max_slope);
  rep.equation_residual = max_abs(dst == Signature::Euclidean ? fe_residual(outp, out_profile)
                                                              : lfe_residual(outp, out_profile));

  // Curvatures of the input on its grid.
  Eigen::MatrixXd Hin(nx, ny), Kin(nx, ny);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      auto [h, k] = graph_curvatures(src, g.ux(i, j), g.uy(i, j), g.uxx(i, j), g.uxy(i, j), g.uyy(i, j));
      Hin(i, j) = h;
      Kin(i, j) = k;
    }
  const int mg = std::max(1, opt.check_margin);
  for (int a = mg; a + mg < mx; ++a)
    for (int b = mg; b + mg < my; ++b) {
      const Jet2 d = central_jet(outp, a, b);
      const double x = pre_x(a, b), y = pre_y(a, b);
      const double ux = ip(g.ux, x, y), uy = ip(g.uy, x, y), w = ip(g.w, x, y);
      rep.gauss_map_error = std::max({rep.gauss_map_error, std::abs(d.ux - ux / w), std::abs(d.uy - uy / w)});
      auto [ho, ko] = graph_curvatures(dst, d.ux, d.uy, d.uxx, d.uxy, d.uyy);
      const double e = std::exp(-p.phi(ip(in.u, x, y)));
      const double hm = w * w * e * ip(Hin, x, y), km = std::pow(w, 4) * e * e * ip(Kin, x, y);
      rep.mean_curvature_error =
          std::max(rep.mean_curvature_error, std::abs(ho + hm) / std::max({std::abs(ho), std::abs(hm), 1e-6}));
      rep.gauss_curvature_error =
          std::max(rep.gauss_curvature_error, std::abs(ko + km) / std::max({std::abs(ko), std::abs(km), 1e-6}));
    }

  // Conformality on the input grid: pull back the target metric through
  // the numerically integrated map.
  {
    Eigen::MatrixXd tu(nx, ny);
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j) tu(i, j) = th(in.u(i, j));
    const double hx = in.hx(), hy = in.hy();
    const Eigen::MatrixXd Px = grid_diff(pot.px, hx, 0), Py = grid_diff(pot.px, hy, 1);
    const Eigen::MatrixXd Qx = grid_diff(pot.py, hx, 0), Qy = grid_diff(pot.py, hy, 1);
    const Eigen::MatrixXd Tx = grid_diff(tu, hx, 0), Ty = grid_diff(tu, hy, 1);
    const double s_in = src == Signature::Euclidean ? 1.0 : -1.0;
    for (int i = mg; i + mg < nx; ++i)
      for (int j = mg; j + mg < ny; ++j) {
        Eigen::Matrix2d J;
        J << Px(i, j), Py(i, j), Qx(i, j), Qy(i, j);
        const Eigen::Vector2d bt(Tx(i, j), Ty(i, j)), a(g.ux(i, j), g.uy(i, j));
        const Eigen::Matrix2d gt = J.transpose() * J - s_in * bt * bt.transpose();
        const double f = std::exp(2 * p.phi(in.u(i, j))) / (g.w(i, j) * g.w(i, j));
        const Eigen::Matrix2d gw = f * (Eigen::Matrix2d::Identity() + s_in * a * a.transpose());
        rep.conformal_error = std::max(rep.conformal_error, (gt - gw).norm() / gw.norm());
      }
  }

  return TransformResult{std::move(outp), std::move(out_profile), th, std::move(pot), std::move(pre_x),
                         std::move(pre_y), rep};
}

}  // namespace detail

/// Euclidean graph patch of a phi-minimal surface to a spacelike graph in
/// Lorentz space with weight -phi o theta^{-1}.
inline TransformResult to_lorentz(const GraphPatch& patch, const WeightProfile& p, const TransformOptions& opt = {}) {
  if (patch.signature != Signature::Euclidean) throw Error(ErrorKind::InvalidData, "to_lorentz needs a Euclidean patch");
  return detail::calabi_transform(patch, p, opt);
}

/// Spacelike Lorentzian graph patch back to a Euclidean graph.
inline TransformResult from_lorentz(const GraphPatch& patch, const WeightProfile& p, const TransformOptions& opt = {}) {
  if (patch.signature != Signature::Lorentzian)
    throw Error(ErrorKind::InvalidData, "from_lorentz needs a Lorentzian patch");
  return detail::calabi_transform(patch, p, opt);
}

}  // namespace phimin
