#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phimin/error.hpp"
#include "phimin/geometry.hpp"
#include "phimin/parallel.hpp"
#include "phimin/profile_curve.hpp"
#include "phimin/quadrature.hpp"
#include "phimin/surface_builder.hpp"
#include "phimin/weight_profile.hpp"

namespace phimin {

using cplx = std::complex<double>;

/// Gauss map G(u + iv) on a uniform grid of the conformal parameter; G(i, j)
/// with i along u. k selects the weight: phi = z (k = 1) or 2/(k-1) log z.
struct GaussField {
  std::vector<double> u, v;
  Eigen::MatrixXcd G;
  double k = 1.0;

  int nu() const { return static_cast<int>(u.size()); }
  int nv() const { return static_cast<int>(v.size()); }
  double hu() const { return u[1] - u[0]; }
  double hv() const { return v[1] - v[0]; }

  void validate() const {
    if (u.size() < 5 || v.size() < 5) throw Error(ErrorKind::DegenerateRange, "Gauss field needs at least 5 nodes per axis");
    if (G.rows() != nu() || G.cols() != nv()) throw Error(ErrorKind::InvalidData, "G does not match the grid");
    if (!(hu() > 0) || !(hv() > 0)) throw Error(ErrorKind::DegenerateRange, "grid spacing must be positive");
    if (k == 0.0) throw Error(ErrorKind::InvalidParameter, "k = 0 is not supported");
  }
};

/// The weight of the family: Linear(1) for k = 1, Log(2/(k-1)) otherwise.
inline WeightProfile family_profile(double k) {
  if (k == 0.0) throw Error(ErrorKind::InvalidParameter, "k = 0 is not supported");
  if (k == 1.0) return make_builtin(ProfileKind::Linear, {1.0});
  return make_builtin(ProfileKind::Log, {2.0 / (k - 1.0)});
}

/// Unit normal of G and back. With psi_zeta proportional to
/// ((1 - G^2)/2, i(1 + G^2)/2, G) the normal -psi_u x psi_v / |.| is
/// (-2G, 1 - |G|^2) / (1 + |G|^2), i.e. G = -Pi(N) with Pi the stereographic
/// projection from the south pole.
inline Vec3 normal_from_gauss(cplx g) {
  const double a = std::norm(g);
  return Vec3(-2 * g.real(), -2 * g.imag(), 1 - a) / (1 + a);
}
inline cplx gauss_from_normal(const Vec3& n) {
  if (!(1 + n.z() > 1e-14)) throw Error(ErrorKind::SingularLocus, "normal at the south pole");
  return -cplx(n.x(), n.y()) / (1 + n.z());
}

namespace detail {

struct Wirtinger {
  Eigen::MatrixXcd gz, gzb;
};

inline Wirtinger wirtinger(const GaussField& f) {
  const Eigen::MatrixXcd gu = grid_diff(f.G, f.hu(), 0), gv = grid_diff(f.G, f.hv(), 1);
  const cplx I(0, 1);
  return {0.5 * (gu - I * gv), 0.5 * (gu + I * gv)};
}

inline double singular_guard(cplx g) { return 1.0 - std::norm(g) * std::norm(g); }

}  // namespace detail

/// Residual of G_zz* + 2|G|^2/(1-|G|^4) conj(G) G_z G_z* + 2k |G_z*|^2/(1-|G|^4) G
/// with fourth-order central differences; NaN on the two outer rings.
inline Eigen::MatrixXcd gauss_pde_residual(const GaussField& f) {
  f.validate();
  const int nu = f.nu(), nv = f.nv();
  const double hu = f.hu(), hv = f.hv();
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Constant(nu, nv, cplx(kNaN, kNaN));
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j)
      if (detail::singular_guard(f.G(i, j)) < 1e-8)
        throw Error(ErrorKind::SingularLocus,
                    "|G| = 1 at (" + std::to_string(f.u[i]) + ", " + std::to_string(f.v[j]) + ")");
  const cplx I(0, 1);
  parallel_for(static_cast<std::size_t>(nu - 4), [&](std::size_t ii) {
    const int i = static_cast<int>(ii) + 2;
    const auto& G = f.G;
    for (int j = 2; j + 2 < nv; ++j) {
      const cplx gu = (G(i - 2, j) - 8.0 * G(i - 1, j) + 8.0 * G(i + 1, j) - G(i + 2, j)) / (12.0 * hu);
      const cplx gv = (G(i, j - 2) - 8.0 * G(i, j - 1) + 8.0 * G(i, j + 1) - G(i, j + 2)) / (12.0 * hv);
      const cplx guu =
          (-G(i - 2, j) + 16.0 * G(i - 1, j) - 30.0 * G(i, j) + 16.0 * G(i + 1, j) - G(i + 2, j)) / (12.0 * hu * hu);
      const cplx gvv =
          (-G(i, j - 2) + 16.0 * G(i, j - 1) - 30.0 * G(i, j) + 16.0 * G(i, j + 1) - G(i, j + 2)) / (12.0 * hv * hv);
      const cplx g = G(i, j), gz = 0.5 * (gu - I * gv), gzb = 0.5 * (gu + I * gv);
      const double d = detail::singular_guard(g);
      r(i, j) = 0.25 * (guu + gvv) + 2.0 * std::norm(g) / d * std::conj(g) * gz * gzb + 2.0 * f.k * std::norm(gzb) / d * g;
    }
  });
  return r;
}

inline double max_abs(const Eigen::MatrixXcd& m) {
  double out = 0.0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (!std::isnan(m(i, j).real())) out = std::max(out, std::abs(m(i, j)));
  return out;
}

struct RepresentationOptions {
  std::optional<cplx> base;      ///< base point (snapped to a node); grid center when absent
  std::optional<Vec3> pin;       ///< position of the base point; the origin (k = 1) when absent
  double path_tol = 1e-6;        ///< allowed path discrepancy relative to the patch size
  int check_margin = 2;
};

struct RepresentationReport {
  double path_discrepancy = 0.0;
  double conformal_error = 0.0;     ///< max(| |psi_u|^2 - |psi_v|^2 |, 2|<psi_u, psi_v>|) / lambda^2
  double gauss_map_error = 0.0;     ///< mesh normal vs the normal of G
  double decomposition_error = 0.0; ///< h / F recovered from psi_zeta vs G
  double isotropy_error = 0.0;      ///< |f^2 + g^2 + h^2| / (|f|^2 + |g|^2 + |h|^2)
  double mean_curvature_residual = 0.0;
  double min_guard = 0.0;           ///< min 1 - |G|^4
};

struct Representation {
  SurfaceMesh mesh;
  RepresentationReport report;
};

namespace detail {

/// Integrates the exact real 1-form P du + Q dv over the grid from node
/// (bi, bj) along u-then-v and v-then-u; returns the average and the
/// discrepancy.
inline std::pair<Eigen::MatrixXd, double> integrate_form(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q, double hu,
                                                         double hv, int bi, int bj) {
  const int nu = static_cast<int>(P.rows()), nv = static_cast<int>(P.cols());
  const Eigen::MatrixXd A = cumulative(P, hu, 0), B = cumulative(Q, hv, 1);
  Eigen::MatrixXd p1(nu, nv), p2(nu, nv);
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      p1(i, j) = (A(i, bj) - A(bi, bj)) + (B(i, j) - B(i, bj));
      p2(i, j) = (B(bi, j) - B(bi, bj)) + (A(i, j) - A(bi, j));
    }
  return {0.5 * (p1 + p2), (p1 - p2).cwiseAbs().maxCoeff()};
}

}  // namespace detail

/// Surface of the family k with Gauss map G, by path integration of the
/// representation integrands. For k != 1 the exponential factor Gamma is
/// integrated first; its constant is fixed by the pinned height.
inline Representation integrate_representation(const GaussField& f, const RepresentationOptions& opt = {}) {
  f.validate();
  const int nu = f.nu(), nv = f.nv();
  const double hu = f.hu(), hv = f.hv(), k = f.k;
  double min_guard = kInf;
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) min_guard = std::min(min_guard, detail::singular_guard(f.G(i, j)));
  if (!(min_guard > 1e-8)) throw Error(ErrorKind::SingularLocus, "|G| reaches 1 on the grid", min_guard);

  const auto w = detail::wirtinger(f);
  if (w.gzb.cwiseAbs().maxCoeff() < 1e-12)
    throw Error(ErrorKind::InvalidData, "G is holomorphic: the surface lies on a vertical plane");

  int bi = nu / 2, bj = nv / 2;
  if (opt.base) {
    bi = std::clamp(static_cast<int>(std::lround((opt.base->real() - f.u[0]) / hu)), 0, nu - 1);
    bj = std::clamp(static_cast<int>(std::lround((opt.base->imag() - f.v[0]) / hv)), 0, nv - 1);
  }
  const cplx I(0, 1);
  // conj(G)_zeta = conj(G_zeta*)
  Eigen::MatrixXcd a1(nu, nv), a2(nu, nv), a3(nu, nv);
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      const cplx g = f.G(i, j), gbz = std::conj(w.gzb(i, j)), d = detail::singular_guard(g);
      a1(i, j) = gbz * (1.0 - g * g) / d;
      a2(i, j) = I * gbz * (1.0 + g * g) / d;
      a3(i, j) = gbz * g / d;
    }
  // d Re int a dzeta = Re(a) du - Im(a) dv
  auto real_integral = [&](const Eigen::MatrixXcd& a, double& disc) {
    auto [val, d] = detail::integrate_form(a.real(), -a.imag(), hu, hv, bi, bj);
    disc = std::max(disc, d);
    return val;
  };
  double disc = 0.0;
  Eigen::MatrixXd X, Y, Z;
  Vec3 pin = opt.pin.value_or(Vec3::Zero());
  if (k == 1.0) {
    X = 4.0 * real_integral(a1, disc);
    Y = 4.0 * real_integral(a2, disc);
    Z = 8.0 * real_integral(a3, disc);
    X.array() += pin.x();
    Y.array() += pin.y();
    Z.array() += pin.z();
  } else {
    const double c3 = 2.0 * k / (k - 1.0);
    double gamma0 = 1.0;
    if (opt.pin) {
      gamma0 = pin.z() / c3;
      if (!(gamma0 > 0.0)) throw Error(ErrorKind::InvalidData, "pinned height incompatible with the sign of 2k/(k-1)");
    }
    const Eigen::MatrixXd L = real_integral(a3, disc);
    const Eigen::MatrixXd Gam = (gamma0 * (4.0 * (k - 1.0) * L).array().exp()).matrix();
    const Eigen::MatrixXcd b1 = a1.cwiseProduct(Gam.cast<cplx>()), b2 = a2.cwiseProduct(Gam.cast<cplx>());
    X = 4.0 * k * real_integral(b1, disc);
    Y = 4.0 * k * real_integral(b2, disc);
    Z = c3 * Gam;
    X.array() += pin.x();
    Y.array() += pin.y();
  }

  Representation out;
  auto& m = out.mesh;
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      m.vertices.emplace_back(X(i, j), Y(i, j), Z(i, j));
      m.normals.push_back(normal_from_gauss(f.G(i, j)));
      m.params.emplace_back(f.u[i], f.v[j]);
    }
  detail::grid_faces(m, nu, nv, false);
  m.skip.assign(m.size(), 0);

  auto& rep = out.report;
  rep.min_guard = min_guard;
  const double size = std::max({1.0, X.cwiseAbs().maxCoeff(), Y.cwiseAbs().maxCoeff(), Z.cwiseAbs().maxCoeff()});
  rep.path_discrepancy = disc;
  if (!std::isfinite(disc) || disc > opt.path_tol * size)
    throw Error(ErrorKind::PathDependence, "representation integrals depend on the path", disc);

  const WeightProfile prof = family_profile(k);
  const Eigen::MatrixXd Xu = detail::grid_diff(X, hu, 0), Xv = detail::grid_diff(X, hv, 1);
  const Eigen::MatrixXd Yu = detail::grid_diff(Y, hu, 0), Yv = detail::grid_diff(Y, hv, 1);
  const Eigen::MatrixXd Zu = detail::grid_diff(Z, hu, 0), Zv = detail::grid_diff(Z, hv, 1);
  const int mg = std::max(1, opt.check_margin);
  for (int i = mg; i + mg < nu; ++i)
    for (int j = mg; j + mg < nv; ++j) {
      const Vec3 pu(Xu(i, j), Yu(i, j), Zu(i, j)), pv(Xv(i, j), Yv(i, j), Zv(i, j));
      const double lam2 = 0.5 * (pu.squaredNorm() + pv.squaredNorm());
      rep.conformal_error = std::max(
          rep.conformal_error, std::max(std::abs(pu.squaredNorm() - pv.squaredNorm()), 2 * std::abs(pu.dot(pv))) / lam2);
      const Vec3 n = -pu.cross(pv).normalized();
      rep.gauss_map_error = std::max(rep.gauss_map_error, (n - m.normals[i * nv + j]).norm());
      // psi_zeta = e^{phi/2} (f, g, h)
      const double e = std::exp(-0.5 * prof.phi(Z(i, j)));
      const cplx fz = 0.5 * e * cplx(pu.x(), -pv.x()), gz = 0.5 * e * cplx(pu.y(), -pv.y()),
                 hz = 0.5 * e * cplx(pu.z(), -pv.z());
      const cplx F = fz - I * gz;
      rep.decomposition_error = std::max(rep.decomposition_error, std::abs(hz / F - f.G(i, j)));
      rep.isotropy_error = std::max(rep.isotropy_error, std::abs(fz * fz + gz * gz + hz * hz) /
                                                            (std::norm(fz) + std::norm(gz) + std::norm(hz)));
    }
  const auto res = mean_curvature_residual(m, prof);
  for (int i = mg; i + mg < nu; ++i)
    for (int j = mg; j + mg < nv; ++j) {
      const double r = res[i * nv + j];
      if (!std::isnan(r)) rep.mean_curvature_residual = std::max(rep.mean_curvature_residual, std::abs(r));
    }
  return out;
}

/// A conformal parametrization sampled from a known surface together with
/// its Gauss field, positions in grid order (i * nv + j).
struct ConformalSample {
  GaussField field;
  std::vector<Vec3> positions;
};

/// Cylinder over a catenary in the conformal parameter sigma + i v, sigma
/// the arc length of the profile from x = 0 and y = -v (so that the normal
/// of G is the upward one).
inline ConformalSample cylinder_gauss_field(const ProfileCurve& curve, Interval sigma, int ns, Interval y, int ny,
                                            double k = 1.0) {
  if (curve.kind != CurveKind::CatenaryGraph) throw Error(ErrorKind::InvalidData, "cylinder field needs a catenary");
  auto speed = [&](double x) { return std::hypot(1.0, curve.slope_at(x)); };
  auto sigma_of = [&](double x) {
    return x >= 0 ? quad::integrate(speed, 0.0, x) : -quad::integrate(speed, x, 0.0);
  };
  auto x_of = [&](double s) {
    double lo = curve.x_min(), hi = curve.x_max();
    double x = std::clamp(s, lo, hi);
    for (int it = 0; it < 100; ++it) {
      const double r = sigma_of(x) - s;
      if (r > 0) hi = x;
      else lo = x;
      double xn = x - r / speed(x);
      if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
      if (std::abs(xn - x) < 1e-15 * std::max(1.0, std::abs(x))) return xn;
      x = xn;
    }
    return x;
  };
  ConformalSample out;
  out.field.u = linspace(sigma.lo, sigma.hi, ns);
  out.field.v = linspace(y.lo, y.hi, ny);
  out.field.k = k;
  out.field.G.resize(ns, ny);
  out.positions.resize(static_cast<std::size_t>(ns) * ny);
  for (int i = 0; i < ns; ++i) {
    const double x = x_of(out.field.u[i]);
    if (!(x > curve.x_min() && x < curve.x_max()))
      throw Error(ErrorKind::OutOfRange, "arc length range exceeds the catenary");
    const double th = std::atan(curve.slope_at(x)), z = curve.height_at(x);
    for (int j = 0; j < ny; ++j) {
      out.field.G(i, j) = gauss_from_normal(Vec3(-std::sin(th), 0.0, std::cos(th)));
      out.positions[i * ny + j] = Vec3(x, -out.field.v[j], z);
    }
  }
  return out;
}

/// Rotational surface in the conformal parameter rho + i v, rho the
/// integral of ds / x along the profile from s_range.lo and angle t = -v.
inline ConformalSample rotational_gauss_field(const ProfileCurve& curve, Interval s_range, int nr, Interval t, int nt,
                                              double k = 1.0) {
  if (!curve.arc_length()) throw Error(ErrorKind::InvalidData, "rotational field needs an arc-length profile");
  auto x_at = [&](double s) { return curve.point_at(s).x; };
  if (!(x_at(s_range.lo) > 0.0)) throw Error(ErrorKind::OutOfRange, "profile range touches the axis");
  auto rho_of = [&](double s) { return quad::integrate([&](double q) { return 1.0 / x_at(q); }, s_range.lo, s); };
  const double rho_max = rho_of(s_range.hi);
  ConformalSample out;
  out.field.u = linspace(0.0, rho_max, nr);
  out.field.v = linspace(t.lo, t.hi, nt);
  out.field.k = k;
  out.field.G.resize(nr, nt);
  out.positions.resize(static_cast<std::size_t>(nr) * nt);
  double s = s_range.lo, rho = 0.0;
  for (int i = 0; i < nr; ++i) {
    const double target = out.field.u[i];
    for (int it = 0; it < 100; ++it) {
      const double ds = (target - rho) * x_at(s);
      if (std::abs(ds) < 1e-15 * std::max(1.0, std::abs(s))) break;
      s += ds;
      rho = rho_of(s);
    }
    const CurveSample c = curve.point_at(s);
    for (int j = 0; j < nt; ++j) {
      const double tt = -out.field.v[j];
      const double st = std::sin(c.theta);
      out.field.G(i, j) = gauss_from_normal(Vec3(-st * std::cos(tt), -st * std::sin(tt), std::cos(c.theta)));
      out.positions[i * nt + j] = Vec3(c.x * std::cos(tt), c.x * std::sin(tt), c.z);
    }
  }
  return out;
}

/// Largest distance between matching vertices after the best translation.
inline double translated_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  if (a.size() != b.size() || a.empty()) throw Error(ErrorKind::InvalidData, "point sets differ in size");
  Vec3 shift = Vec3::Zero();
  for (std::size_t i = 0; i < a.size(); ++i) shift += b[i] - a[i];
  shift /= static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, (a[i] + shift - b[i]).norm());
  return d;
}

}  // namespace phimin
