#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "phimin/error.hpp"
#include "phimin/ode.hpp"
#include "phimin/predicates.hpp"
#include "phimin/profile_curve.hpp"
#include "phimin/quadrature.hpp"
#include "phimin/weight_profile.hpp"

namespace phimin {

struct AsymptoteReport {
  double lambda_u0 = kInf;  ///< Lambda_{u0} for catenaries, omega_+ for rotational fits
  bool finite = false;
  std::map<std::string, double> fitted_constants;
  double residual_decay_rate = kNaN;

  double growth_exponent = kNaN;  ///< numerical growth order of phi' at infinity
  bool predicted_omega_finite = false;
  bool observed_omega_finite = false;
  double omega_plus = kInf;
};

namespace detail {

inline ode::Options solver_options(double tol, double max_dt) {
  ode::Options o;
  o.abs_tol = tol;
  o.rel_tol = tol;
  o.max_dt = max_dt;
  o.initial_dt = std::min(1e-4, max_dt);
  return o;
}

inline void require_positive(double v, const char* what) {
  if (!(v > 0.0) || std::isnan(v)) throw Error(ErrorKind::InvalidParameter, std::string(what) + " must be positive");
}

inline void require_in_domain(const WeightProfile& p, double u, const char* what) {
  if (!p.domain().contains(u))
    throw Error(ErrorKind::OutOfRange, std::string(what) + " = " + std::to_string(u) + " is outside the profile domain");
}

inline double domain_margin(double end) { return 1e-12 * std::max(1.0, std::abs(end)); }

/// Rotational generating-curve system in arc length: (x, z, theta).
struct RotationalRhs {
  const WeightProfile* p;
  void operator()(const ode::State<3>& y, ode::State<3>& d, double) const {
    const double c = std::cos(y[2]), s = std::sin(y[2]);
    d[0] = c;
    d[1] = s;
    d[2] = p->dphi(y[1]) * c - s / y[0];
  }
};

inline CurveSample rotational_sample(double s, const ode::State<3>& y, const ode::State<3>& dy) {
  return {s, y[0], y[1], y[2], dy[2]};
}

/// Least-squares slope of y against x.
inline std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / n};
}

}  // namespace detail

/// x as a function of u on a catenary from the explicit quadrature of the
/// inverse solution, using tau = z0 + w^2 to remove the endpoint singularity.
inline double catenary_abscissa(const WeightProfile& p, double u0, double u, double tol = 1e-12) {
  const double z0 = p.phi(u0), z = p.phi(u);
  if (z < z0) throw Error(ErrorKind::OutOfRange, "height is below the catenary minimum level");
  if (z == z0) return 0.0;
  const double lam0 = std::abs(p.dphi(u0));
  auto f = [&](double w) {
    if (w == 0.0) return std::sqrt(2.0) / lam0;
    const double e = std::expm1(2.0 * w * w);
    if (!std::isfinite(e)) return 0.0;
    const double lam = std::abs(lambda_of_z(p, z0 + w * w));
    return 2.0 * w / (lam * std::sqrt(e));
  };
  return quad::integrate(f, 0.0, std::sqrt(z - z0), tol);
}

/// Solves u'' = phi'(u)(1 + u'^2), u(0) = u0, u'(0) = 0 on [0, x_max) and
/// extends evenly. x_max = inf integrates over the maximal interval.
inline ProfileCurve solve_catenary(const WeightProfile& p, double u0, double x_max = kInf, double tol = 1e-10,
                                   double max_step = 0.01) {
  detail::require_in_domain(p, u0, "u0");
  detail::require_positive(x_max, "x_max");
  detail::require_positive(tol, "tol");
  detail::require_positive(max_step, "max_step");
  const Interval dom = p.domain();
  const bool inc = p.increasing();
  const double lo_stop = dom.lo + detail::domain_margin(dom.lo);
  const double hi_stop = dom.hi - detail::domain_margin(dom.hi);

  auto rhs = [&](const ode::State<2>& y, ode::State<2>& d, double) {
    d[0] = std::tan(y[1]);
    d[1] = p.dphi(y[0]);
  };
  // Steep part: switch to the height as parameter with state (x, cos theta),
  // which stays well conditioned up to the vertical asymptote.
  constexpr double kSteep = 20.0;
  Termination why = Termination::Reached;
  bool steep = false;
  auto stop = [&](double, const ode::State<2>& y, const ode::State<2>& d) {
    if (y[0] <= lo_stop || y[0] >= hi_stop) {
      why = Termination::DomainExit;
      return true;
    }
    if (std::abs(d[0]) > kSteep) {
      steep = true;
      return true;
    }
    if (std::abs(y[0]) > 1e100) {
      why = Termination::Overflow;
      return true;
    }
    return false;
  };
  const auto opts = detail::solver_options(tol, max_step);
  auto tr = ode::integrate<2>(rhs, {u0, 0.0}, 0.0, x_max, opts, stop);
  switch (tr.status) {
    case ode::Status::Reached: why = Termination::Reached; break;
    case ode::Status::Stopped: break;
    case ode::Status::StepLimit: why = Termination::StepLimit; break;
    case ode::Status::StepUnderflow:
    case ode::Status::NonFinite:
      why = inc ? Termination::BlowUp : Termination::DomainExit;
      break;
  }

  std::vector<CurveSample> half;
  for (std::size_t i = 0; i < tr.size(); ++i) half.push_back({tr.t[i], tr.t[i], tr.y[i][0], tr.y[i][1], tr.dy[i][1]});

  if (steep) {
    const double sg = tr.y.back()[1] > 0 ? 1.0 : -1.0;
    const double ua = tr.y.back()[0];
    // t = |u - ua|; state (x, log cos theta)
    auto rhs2 = [&](const ode::State<2>& y, ode::State<2>& d, double t) {
      const double c = std::exp(y[1]);
      d[0] = c / std::sqrt(-std::expm1(2.0 * y[1]));
      d[1] = -sg * p.dphi(ua + sg * t);
    };
    bool past = false;
    why = Termination::Reached;
    auto stop2 = [&](double t, const ode::State<2>& y, const ode::State<2>&) {
      const double u = ua + sg * t;
      if (y[0] >= x_max) {
        past = true;
        return true;
      }
      if (u <= lo_stop || u >= hi_stop) {
        why = Termination::DomainExit;
        return true;
      }
      if (y[1] < std::log(1e-8)) {
        why = inc ? Termination::BlowUp : Termination::DomainExit;
        return true;
      }
      if (std::abs(u) > 1e100) {
        why = Termination::Overflow;
        return true;
      }
      return false;
    };
    auto o2 = opts;
    o2.max_dt = std::max(max_step, 1.0);
    auto tr2 = ode::integrate<2>(rhs2, {tr.t.back(), std::log(std::cos(tr.y.back()[1]))}, 0.0, kInf, o2, stop2);
    if (tr2.status == ode::Status::StepLimit) why = Termination::StepLimit;
    else if (tr2.status == ode::Status::StepUnderflow || tr2.status == ode::Status::NonFinite)
      why = inc ? Termination::BlowUp : Termination::DomainExit;
    std::size_t n2 = tr2.size();
    if (past) {
      // last step crossed x_max: locate the crossing on the dense output
      double a = tr2.t[n2 - 2], b = tr2.t[n2 - 1];
      for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, b); ++it) {
        const double m = 0.5 * (a + b);
        (tr2.at(m)[0] < x_max ? a : b) = m;
      }
      // dense output is too coarse here: re-advance to the crossing
      const auto y = ode::advance<2>(rhs2, tr2.y[n2 - 2], tr2.t[n2 - 2], b, o2);
      tr2.t[n2 - 1] = b;
      tr2.y[n2 - 1] = {x_max, y[1]};
    }
    for (std::size_t i = 1; i < n2; ++i) {
      const double u = ua + sg * tr2.t[i], c = std::exp(tr2.y[i][1]);
      const double th = sg * std::atan2(std::sqrt(-std::expm1(2.0 * tr2.y[i][1])), c);
      half.push_back({tr2.y[i][0], tr2.y[i][0], u, th, p.dphi(u)});
    }
  }
  const double x_end = half.back().x;
  if (std::isfinite(x_max) && why != Termination::Reached) {
    const ErrorKind k = why == Termination::DomainExit ? ErrorKind::DomainExit : ErrorKind::BlowUp;
    throw Error(k, "catenary ends at x = " + std::to_string(x_end) + " before x_max", x_end);
  }

  ProfileCurve c;
  c.kind = CurveKind::CatenaryGraph;
  c.profile = p.spec();
  c.initial.u0 = u0;
  c.initial.x0 = 0.0;
  c.initial.z0 = u0;
  c.initial.theta0 = 0.0;
  c.termination = why;
  c.end_estimate = why == Termination::Reached ? kNaN : x_end;
  const std::size_t n = half.size();
  c.samples.reserve(2 * n - 1);
  for (std::size_t i = n; i-- > 1;) {
    const auto& h = half[i];
    c.samples.push_back({-h.s, -h.x, h.z, -h.theta, h.dtheta});
  }
  for (const auto& h : half) c.samples.push_back(h);

  // Cross-check against the explicit inverse solution.
  double mismatch = 0.0;
  if (tr.t.back() > 0.0) {
    for (int k = 0; k < 8; ++k) {
      const double xs = tr.t.back() * (0.2 + 0.1 * k);
      const std::size_t i = tr.cell(xs);
      try {
        mismatch = std::max(mismatch, std::abs(catenary_abscissa(p, u0, tr.y[i][0]) - tr.t[i]));
      } catch (const Error&) {
        mismatch = kInf;
      }
    }
  }
  c.diagnostics["quadrature_mismatch"] = mismatch;
  return c;
}

/// max over samples of |e^{phi(u)} cos(theta) - e^{phi(u(0))} cos(theta(0))|.
inline double first_integral_drift(const ProfileCurve& curve, const WeightProfile& p) {
  if (curve.samples.size() < 2) return 0.0;
  const auto ref = std::min_element(curve.samples.begin(), curve.samples.end(),
                                    [](const auto& a, const auto& b) { return std::abs(a.s) < std::abs(b.s); });
  const double c0 = std::exp(p.phi(ref->z)) * std::cos(ref->theta);
  double drift = 0.0;
  for (const auto& s : curve.samples) drift = std::max(drift, std::abs(std::exp(p.phi(s.z)) * std::cos(s.theta) - c0));
  return drift;
}

/// Half-width Lambda_{u0} of the catenary through u0 together with the
/// independent integrability test of e^{-phi}.
inline AsymptoteReport compute_lambda(const WeightProfile& p, double u0, double tol = 1e-10) {
  detail::require_in_domain(p, u0, "u0");
  detail::require_positive(tol, "tol");
  const Interval dom = p.domain();
  const bool inc = p.increasing();
  if (inc && std::isfinite(dom.hi))
    throw Error(ErrorKind::InvalidParameter, "half-width needs a profile defined up to +infinity");

  AsymptoteReport r;
  const double z0 = p.phi(u0);
  const double c = inc ? p.phi_at_hi() : p.phi_at_lo();  // sup of phi along the solution

  // Integrability of e^{-phi} towards the end the solution runs to.
  quad::TailResult l1;
  if (inc) {
    l1 = quad::integrate_tail([&](double u) { return std::exp(-p.phi(u)); }, u0, 1.0, tol, 1e-12);
  } else if (std::isfinite(dom.lo)) {
    l1.value = quad::integrate([&](double u) { return std::exp(-p.phi(u)); }, dom.lo, u0, 1e-12);
    l1.converged = std::isfinite(l1.value);
  } else {
    l1 = quad::integrate_tail([&](double t) { return std::exp(-p.phi(u0 - t)); }, 0.0, 1.0, tol, 1e-12);
  }
  r.fitted_constants["l1_integral"] = l1.converged ? l1.value : kInf;

  if (inc && std::isfinite(c)) {
    r.lambda_u0 = kInf;
    r.finite = false;
    r.fitted_constants["sup_phi"] = c;
  } else {
    auto lam = [&](double tau) { return std::abs(lambda_of_z(p, tau)); };
    auto fw = [&](double w) {
      if (w == 0.0) return std::sqrt(2.0) / std::abs(p.dphi(u0));
      return 2.0 * w / (lam(z0 + w * w) * std::sqrt(std::expm1(2.0 * w * w)));
    };
    if (std::isfinite(c)) {
      r.lambda_u0 = quad::integrate(fw, 0.0, std::sqrt(c - z0), 1e-12);
      r.finite = std::isfinite(r.lambda_u0);
    } else {
      // Near z0 in tau = z0 + w^2, beyond that in u itself (d tau = phi' du).
      const double head = quad::integrate(fw, 0.0, 1.0, 1e-12);
      const double u1 = inverse_phi(p, z0 + 1.0);
      auto fu = [&](double u) {
        const double e = std::expm1(2.0 * (p.phi(u) - z0));
        return std::isfinite(e) ? 1.0 / std::sqrt(e) : 0.0;
      };
      quad::TailResult tail;
      if (inc) {
        tail = quad::integrate_tail(fu, u1, 1.0, tol, 1e-12);
      } else if (std::isfinite(dom.lo)) {
        tail.value = quad::integrate(fu, dom.lo, u1, 1e-12);
        tail.converged = std::isfinite(tail.value);
      } else {
        tail = quad::integrate_tail([&](double t) { return fu(u1 - t); }, 0.0, 1.0, tol, 1e-12);
      }
      r.finite = tail.converged;
      r.lambda_u0 = tail.converged ? head + tail.value : kInf;
    }
  }
  if (r.finite != l1.converged)
    throw Error(ErrorKind::QuadratureNonconvergence,
                "half-width quadrature and the integrability test of exp(-phi) disagree");
  return r;
}

struct BowlOptions {
  double s_launch = 1e-3;
  double max_step = 0.02;
  double fit_window = 0.05;  ///< arc-length window of the theta'(0) fit
};

namespace detail {

/// Least-squares fit theta = a s + b s^3 on [s_lo, s_hi]; returns a.
inline double fit_odd_slope(const ode::Trajectory<3>& tr, double s_lo, double s_hi) {
  double m11 = 0, m12 = 0, m22 = 0, r1 = 0, r2 = 0;
  const int n = 64;
  for (int k = 0; k <= n; ++k) {
    const double s = s_lo + (s_hi - s_lo) * k / n;
    const double th = tr.at(s)[2];
    const double a = s, b = s * s * s;
    m11 += a * a;
    m12 += a * b;
    m22 += b * b;
    r1 += a * th;
    r2 += b * th;
  }
  return (r1 * m22 - r2 * m12) / (m11 * m22 - m12 * m12);
}

inline void check_rotational_convexity(const ProfileCurve& c, const WeightProfile& p, double tol,
                                       std::size_t from = 1) {
  for (std::size_t i = from; i < c.samples.size(); ++i) {
    const auto& s = c.samples[i];
    if (p.ddphi(s.z) < 0.0) continue;
    const double noise = 10.0 * tol * (std::abs(p.dphi(s.z)) + 1.0 / std::max(s.x, 1e-300));
    if (s.dtheta <= -noise || !(s.theta > 0.0 && s.theta < std::numbers::pi / 2))
      throw Error(ErrorKind::ConvexityViolation,
                  "curvature of the generating curve is not positive at s = " + std::to_string(s.s), s.s);
  }
}

inline Termination rotational_termination(ode::Status st, bool domain_hit) {
  if (domain_hit) return Termination::DomainExit;
  switch (st) {
    case ode::Status::Reached: return Termination::Reached;
    case ode::Status::StepLimit: return Termination::StepLimit;
    default: return Termination::BlowUp;
  }
}

}  // namespace detail

/// Rotational graph through (0, z0) meeting the axis orthogonally.
inline ProfileCurve solve_bowl(const WeightProfile& p, double z0, double s_max, double tol = 1e-10,
                               const BowlOptions& opt = {}) {
  detail::require_in_domain(p, z0, "z0");
  detail::require_positive(s_max, "s_max");
  detail::require_positive(tol, "tol");
  const double d0 = p.dphi(z0);
  if (!(d0 > 0.0)) throw Error(ErrorKind::InvalidParameter, "bowl needs phi'(z0) > 0");

  // Axis launch from u = z0 + c2 r^2 + c4 r^4, s = r + (2/3) c2^2 r^3.
  const double c2 = d0 / 4.0;
  const double c4 = c2 * c2 * c2 / 2.0 + p.ddphi(z0) * c2 / 16.0;
  const double sl = std::min(opt.s_launch, s_max / 2.0);
  double r = sl;
  for (int i = 0; i < 8; ++i) r -= (r + 2.0 / 3.0 * c2 * c2 * r * r * r - sl) / (1.0 + 2.0 * c2 * c2 * r * r);
  const ode::State<3> y0{r, z0 + c2 * r * r + c4 * r * r * r * r,
                         std::atan(2.0 * c2 * r + 4.0 * c4 * r * r * r)};

  const double hi_stop = p.domain().hi - detail::domain_margin(p.domain().hi);
  bool domain_hit = false;
  auto stop = [&](double, const ode::State<3>& y, const ode::State<3>&) {
    if (y[1] >= hi_stop) return domain_hit = true;
    return y[2] >= std::numbers::pi / 2 || y[0] <= 0.0;
  };
  detail::RotationalRhs rhs{&p};
  auto tr = ode::integrate<3>(rhs, y0, sl, s_max, detail::solver_options(tol, opt.max_step), stop);

  ProfileCurve c;
  c.kind = CurveKind::BowlGraph;
  c.profile = p.spec();
  c.initial = {kNaN, 0.0, z0, 0.0};
  c.samples.push_back({0.0, 0.0, z0, 0.0, d0 / 2.0});
  for (std::size_t i = 0; i < tr.size(); ++i) c.samples.push_back(detail::rotational_sample(tr.t[i], tr.y[i], tr.dy[i]));
  c.termination = detail::rotational_termination(tr.status, domain_hit);
  if (tr.status == ode::Status::Stopped && !domain_hit)
    throw Error(ErrorKind::ConvexityViolation, "generating curve turned back", tr.t.back());
  if (c.termination == Termination::DomainExit)
    throw Error(ErrorKind::DomainExit, "bowl leaves the profile domain", tr.t.back());
  if (c.termination == Termination::BlowUp)
    throw Error(ErrorKind::NonFinite, "integration of the bowl failed", tr.t.back());
  if (c.termination != Termination::Reached) c.end_estimate = tr.t.back();
  detail::check_rotational_convexity(c, p, tol);

  const double fit_hi = std::min(opt.fit_window, tr.t.back());
  if (fit_hi > 4.0 * sl) c.diagnostics["dtheta0_fit"] = detail::fit_odd_slope(tr, sl, fit_hi);
  return c;
}

struct CatenoidOptions {
  bool axis_distance = true;  ///< x0 is the distance to the axis (else the abscissa where theta = 0)
  double max_step = 0.02;
};

namespace detail {

struct TurnPoint {
  double s = kNaN;
  ode::State<3> y{};
};

/// First point of the left branch from (xh, z0, pi) where theta = pi/2.
inline TurnPoint left_turn(const WeightProfile& p, double xh, double z0, double tol, double max_step,
                           double s_cap = 1e3) {
  RotationalRhs rhs{&p};
  auto stop = [](double, const ode::State<3>& y, const ode::State<3>&) {
    return y[2] <= std::numbers::pi / 2 || y[0] <= 0.0;
  };
  const auto o = solver_options(tol, max_step);
  auto tr = ode::integrate<3>(rhs, {xh, z0, std::numbers::pi}, 0.0, s_cap, o, stop);
  if (tr.status != ode::Status::Stopped)
    throw Error(ErrorKind::MilestoneMissing, "left branch never becomes vertical");
  if (tr.y.back()[0] <= 0.0) return {tr.t.back(), {0.0, tr.y.back()[1], tr.y.back()[2]}};
  const std::size_t i = tr.size() - 2;
  const double th0 = tr.y[i][2] - std::numbers::pi / 2, th1 = tr.y[i + 1][2] - std::numbers::pi / 2;
  double s = tr.t[i] + (tr.t[i + 1] - tr.t[i]) * th0 / (th0 - th1);
  ode::State<3> y = tr.at(s);
  for (int it = 0; it < 8; ++it) {
    y = ode::advance<3>(rhs, tr.y[i], tr.t[i], s, o);
    ode::State<3> d{};
    rhs(y, d, s);
    const double ds = (y[2] - std::numbers::pi / 2) / d[2];
    s -= ds;
    if (std::abs(ds) < 1e-15 * std::max(1.0, s)) break;
  }
  y = ode::advance<3>(rhs, tr.y[i], tr.t[i], s, o);
  return {s, y};
}

}  // namespace detail

/// Winglike rotational curve. Returns (right branch, left branch); the left
/// branch is parametrized from theta = pi.
inline std::pair<ProfileCurve, ProfileCurve> solve_catenoid(const WeightProfile& p, double x0, double z0,
                                                            double s_max, double tol = 1e-10,
                                                            const CatenoidOptions& opt = {}) {
  detail::require_positive(x0, "x0");
  detail::require_in_domain(p, z0, "z0");
  detail::require_positive(s_max, "s_max");
  detail::require_positive(tol, "tol");
  if (!(p.dphi(z0) > 0.0)) throw Error(ErrorKind::InvalidParameter, "catenoid needs phi'(z0) > 0");

  double xh = x0;
  if (opt.axis_distance) {
    auto f = [&](double h) { return detail::left_turn(p, h, z0, tol, opt.max_step).y[0] - x0; };
    double lo = x0, hi = 2.0 * x0;
    double flo = f(lo), fhi = f(hi);
    for (int k = 0; k < 60 && fhi < 0.0; ++k) {
      lo = hi;
      flo = fhi;
      hi *= 2.0;
      fhi = f(hi);
    }
    if (fhi < 0.0) throw Error(ErrorKind::MilestoneMissing, "could not bracket the axis distance");
    std::uintmax_t iters = 200;
    auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                                    boost::math::tools::eps_tolerance<double>(50), iters);
    xh = 0.5 * (a + b);
  }

  detail::RotationalRhs rhs{&p};
  const auto o = detail::solver_options(tol, opt.max_step);
  const double hi_stop = p.domain().hi - detail::domain_margin(p.domain().hi);
  auto build = [&](CurveKind kind, double theta0) {
    bool domain_hit = false;
    auto stop = [&](double, const ode::State<3>& y, const ode::State<3>&) {
      if (y[1] >= hi_stop) return domain_hit = true;
      return y[0] <= 0.0;
    };
    auto tr = ode::integrate<3>(rhs, {xh, z0, theta0}, 0.0, s_max, o, stop);
    ProfileCurve c;
    c.kind = kind;
    c.profile = p.spec();
    c.initial = {kNaN, x0, z0, theta0};
    for (std::size_t i = 0; i < tr.size(); ++i) c.samples.push_back(detail::rotational_sample(tr.t[i], tr.y[i], tr.dy[i]));
    c.termination = detail::rotational_termination(tr.status, domain_hit);
    if (tr.status == ode::Status::Stopped && !domain_hit)
      throw Error(ErrorKind::NotEmbedded, "generating curve reaches the axis", tr.t.back());
    if (c.termination == Termination::DomainExit)
      throw Error(ErrorKind::DomainExit, "catenoid leaves the profile domain", tr.t.back());
    if (c.termination == Termination::BlowUp)
      throw Error(ErrorKind::NonFinite, "integration of the catenoid failed", tr.t.back());
    if (c.termination != Termination::Reached) c.end_estimate = tr.t.back();
    return c;
  };
  ProfileCurve right = build(CurveKind::CatenoidRight, 0.0);
  ProfileCurve left = build(CurveKind::CatenoidLeft, std::numbers::pi);

  // Milestones of the left branch.
  const auto turn = detail::left_turn(p, xh, z0, tol, opt.max_step);
  if (!(turn.s < s_max)) throw Error(ErrorKind::MilestoneMissing, "left branch does not become vertical before s_max");
  {
    ode::State<3> d{};
    rhs(turn.y, d, turn.s);
    auto it = std::upper_bound(left.samples.begin(), left.samples.end(), turn.s,
                               [](double v, const CurveSample& c) { return v < c.s; });
    left.samples.insert(it, detail::rotational_sample(turn.s, turn.y, d));
  }
  double s1 = kNaN;
  std::size_t i1 = 0;
  for (std::size_t i = 1; i < left.samples.size(); ++i) {
    const auto& a = left.samples[i - 1];
    const auto& b = left.samples[i];
    if (a.s >= turn.s && a.dtheta <= 0.0 && b.dtheta > 0.0) {
      s1 = a.s + (b.s - a.s) * (-a.dtheta) / (b.dtheta - a.dtheta);
      i1 = i;
      break;
    }
  }
  if (std::isnan(s1)) throw Error(ErrorKind::MilestoneMissing, "left branch has no curvature minimum before s_max");
  for (std::size_t i = i1; i < left.samples.size(); ++i) {
    const auto& s = left.samples[i];
    const double noise = 10.0 * tol * (std::abs(p.dphi(s.z)) + 1.0 / s.x);
    if (s.dtheta <= -noise || !(s.theta > 0.0 && s.theta < std::numbers::pi / 2))
      throw Error(ErrorKind::MilestoneMissing, "left branch angle is not increasing after its minimum", s.s);
  }
  for (const auto& s : left.samples)
    if (s.s > turn.s && !(s.theta > 0.0 && s.theta < std::numbers::pi / 2))
      throw Error(ErrorKind::MilestoneMissing, "left branch angle leaves (0, pi/2) after the vertical point", s.s);
  detail::check_rotational_convexity(right, p, tol);

  std::vector<geom::Point2> poly;
  for (std::size_t i = left.samples.size(); i-- > 1;) poly.push_back({left.samples[i].x, left.samples[i].z});
  for (const auto& s : right.samples) poly.push_back({s.x, s.z});
  const std::size_t crossings = geom::count_self_intersections(poly);
  if (crossings != 0)
    throw Error(ErrorKind::NotEmbedded, std::to_string(crossings) + " self-intersections in the generating curve");

  double min_x = kInf;
  for (const auto& s : left.samples) min_x = std::min(min_x, s.x);
  for (auto* c : {&right, &left}) {
    c->diagnostics["horizontal_abscissa"] = xh;
    c->diagnostics["s0"] = turn.s;
    c->diagnostics["s1"] = s1;
    c->diagnostics["min_axis_distance"] = min_x;
    c->diagnostics["self_intersections"] = 0.0;
  }
  return {std::move(right), std::move(left)};
}

/// Samples of a rotational graph continued far from the axis. g = G(u) with
/// G' = 1/phi' and G(u(first sample)) = 0; dg = dg/dr; log_u = log u (NaN
/// when u <= 0, +inf past overflow).
struct RadialSample {
  double r = 0, g = 0, dg = 0, u = 0, log_u = kNaN;
};

struct RadialExtension {
  std::vector<RadialSample> samples;
  bool omega_finite = false;
  double omega_plus = kInf;
  double r_reached = 0;
  double switch_radius_reduced = kNaN;  ///< start of the slow-manifold stage
  double switch_radius_closed = kNaN;   ///< start of the closed-form stage
};

namespace detail {

inline double growth_order(const WeightProfile& p, double l1, double l2) {
  const double a = p.dphi(std::exp(l1)), b = p.dphi(std::exp(l2));
  return (std::log(b) - std::log(a)) / (l2 - l1);
}

}  // namespace detail

/// Continues a rotational graph curve to radius r_target. Far out, the
/// curve is followed on its slow manifold tan(theta) = r phi'(u)(1 + eps)
/// in the variables (r, G(u)) against log u, and past overflow with G' = r.
inline RadialExtension extend_to_radius(const ProfileCurve& curve, const WeightProfile& p, double r_target,
                                        double tol = 1e-10, double max_step = 0.02) {
  if (curve.kind != CurveKind::BowlGraph && curve.kind != CurveKind::CatenoidRight)
    throw Error(ErrorKind::InvalidData, "radial extension needs a bowl or right catenoid branch");
  if (curve.samples.size() < 2) throw Error(ErrorKind::InvalidData, "curve has fewer than two samples");
  detail::require_positive(r_target, "r_target");
  RadialExtension ext;
  auto logu = [](double u) { return u > 0.0 ? std::log(u) : kNaN; };

  double g = 0.0;
  for (std::size_t i = 0; i < curve.samples.size(); ++i) {
    const auto& s = curve.samples[i];
    if (i > 0)
      g += boost::math::quadrature::gauss<double, 15>::integrate([&](double xi) { return 1.0 / p.dphi(xi); },
                                                                 curve.samples[i - 1].z, s.z);
    ext.samples.push_back({s.x, g, std::tan(s.theta) / p.dphi(s.z), s.z, logu(s.z)});
  }
  auto eps = [&](double x, double u) {
    const double d = p.dphi(u);
    return 1.0 / (x * x * d * d) + std::abs(p.ddphi(u)) / (d * d);
  };

  // Stage A: arc-length system with G appended.
  const auto& last = curve.samples.back();
  double x = last.x, u = last.z;
  if (x < r_target && !(eps(x, u) < 1e-6 && u > 1.0)) {
    auto rhs = [&](const ode::State<4>& y, ode::State<4>& d, double) {
      const double c = std::cos(y[2]), s = std::sin(y[2]), dp = p.dphi(y[1]);
      d[0] = c;
      d[1] = s;
      d[2] = dp * c - s / y[0];
      d[3] = s / dp;
    };
    auto stop = [&](double, const ode::State<4>& y, const ode::State<4>&) {
      return y[0] >= r_target || (eps(y[0], y[1]) < 1e-6 && y[1] > 1.0) || y[2] >= std::numbers::pi / 2 ||
             y[1] >= p.domain().hi;
    };
    auto o = detail::solver_options(tol, max_step);
    o.max_steps = 20'000'000;
    auto tr = ode::integrate<4>(rhs, {last.x, last.z, last.theta, g}, last.s, kInf, o, stop);
    for (std::size_t i = 1; i < tr.size(); ++i) {
      const auto& y = tr.y[i];
      ext.samples.push_back({y[0], y[3], std::tan(y[2]) / p.dphi(y[1]), y[1], logu(y[1])});
    }
    if (tr.status != ode::Status::Stopped || tr.y.back()[2] >= std::numbers::pi / 2)
      throw Error(ErrorKind::NonFinite, "radial extension failed in the arc-length stage", tr.y.back()[0]);
    x = tr.y.back()[0];
    u = tr.y.back()[1];
    g = tr.y.back()[3];
  }

  // Stage B: slow manifold, independent variable l = log u.
  if (x < r_target) {
    ext.switch_radius_reduced = x;
    auto gp = [&](double xx, double uu) {
      const double d = p.dphi(uu), dd = p.ddphi(uu);
      if (!std::isfinite(d)) return xx;
      const double corr = std::isfinite(dd) ? xx * dd / (d * d) : 0.0;
      return xx - 1.0 / (xx * d * d) - corr;
    };
    auto rhs = [&](const ode::State<2>& y, ode::State<2>& d, double l) {
      const double uu = std::exp(l), dp = p.dphi(uu);
      const double q = std::isfinite(dp) ? uu / dp : 0.0;
      d[0] = q / gp(y[0], uu);
      d[1] = q;
    };
    double l_max = 700.0;
    while (l_max > std::log(u) + 1.0 && !std::isfinite(p.dphi(std::exp(l_max)))) l_max -= 1.0;
    auto stop = [&](double, const ode::State<2>& y, const ode::State<2>&) { return y[0] >= r_target; };
    auto o = detail::solver_options(tol, 1.0);
    auto tr = ode::integrate<2>(rhs, {x, g}, std::log(u), l_max, o, stop);
    for (std::size_t i = 1; i < tr.size(); ++i) {
      const double uu = std::exp(tr.t[i]);
      ext.samples.push_back({tr.y[i][0], tr.y[i][1], gp(tr.y[i][0], uu), uu, tr.t[i]});
    }
    if (tr.status != ode::Status::Stopped && tr.status != ode::Status::Reached)
      throw Error(ErrorKind::NonFinite, "radial extension failed in the reduced stage", tr.y.back()[0]);
    x = tr.y.back()[0];
    g = tr.y.back()[1];
    if (tr.status == ode::Status::Reached) {
      // Stage C: u beyond double range, G' = r.
      ext.switch_radius_closed = x;
      const double lb = tr.t.back();
      const double alpha = detail::growth_order(p, lb - 2.0, lb - 1.0);
      if (alpha > 1.0 + 1e-6) {
        const double db = p.dphi(std::exp(lb));
        const double rem = std::isfinite(db) ? std::exp(lb) / db / (alpha - 1.0) : 0.0;
        ext.omega_finite = true;
        ext.omega_plus = std::sqrt(x * x + 2.0 * rem);
        ext.r_reached = ext.omega_plus;
        return ext;
      }
      const int n = 200;
      for (int k = 1; k <= n; ++k) {
        const double r = x + (r_target - x) * k / n;
        ext.samples.push_back({r, g + 0.5 * (r * r - x * x), r, kInf, kInf});
      }
      ext.r_reached = r_target;
      return ext;
    }
  }
  ext.r_reached = ext.samples.back().r;
  return ext;
}

/// Asymptotic laws of a rotational graph over r_window (see AsymptoteReport).
inline AsymptoteReport fit_asymptotics(const ProfileCurve& curve, const WeightProfile& p, Interval r_window,
                                       double tol = 1e-10) {
  if (!(r_window.lo > 0.0) || !(r_window.hi > r_window.lo) || !std::isfinite(r_window.hi))
    throw Error(ErrorKind::WindowTooShort, "radius window must be a nonempty positive interval");
  double L = 0.0, beta = 0.0;
  const auto& sp = p.spec();
  switch (sp.kind) {
    case ProfileKind::Series: L = sp.params[0]; beta = sp.params[1]; break;
    case ProfileKind::Linear: L = 0.0; beta = sp.params[0]; break;
    case ProfileKind::Power:
      if (sp.params[0] != 1.0) throw Error(ErrorKind::InvalidParameter, "profile has no expansion Lu + b + ...");
      L = 1.0;
      break;
    default: throw Error(ErrorKind::InvalidParameter, "profile has no expansion Lu + b + ...");
  }

  AsymptoteReport rep;
  const double r_obs = std::max(2.0 * r_window.hi, 50.0);
  const RadialExtension ext = extend_to_radius(curve, p, r_obs, tol);
  rep.observed_omega_finite = ext.omega_finite;
  rep.omega_plus = ext.omega_plus;
  rep.lambda_u0 = ext.omega_plus;
  rep.finite = ext.omega_finite;
  rep.growth_exponent = detail::growth_order(p, std::log(1e6), std::log(1e12)) ;
  rep.predicted_omega_finite = rep.growth_exponent > 1.0 + 1e-3;

  std::vector<const RadialSample*> win;
  for (const auto& s : ext.samples)
    if (s.r >= r_window.lo && s.r <= r_window.hi) win.push_back(&s);

  if (L == 0.0) {
    std::vector<double> lr, ld, inv2, rem;
    for (auto* s : win) {
      const double dR = s->dg - s->r + 1.0 / (beta * beta * s->r);
      inv2.push_back(1.0 / (s->r * s->r));
      rem.push_back(s->g - 0.5 * s->r * s->r + std::log(s->r) / (beta * beta));
      if (dR != 0.0 && std::isfinite(dR)) {
        lr.push_back(std::log(s->r));
        ld.push_back(std::log(std::abs(dR)));
      }
    }
    if (lr.size() < 8 || std::log(r_window.hi / r_window.lo) < 0.1)
      throw Error(ErrorKind::WindowTooShort, "too few samples in the radius window");
    const auto [slope, icpt] = detail::linear_fit(lr, ld);
    rep.residual_decay_rate = slope + 1.0;
    const auto [d, c] = detail::linear_fit(inv2, rem);
    rep.fitted_constants["C"] = c;
    rep.fitted_constants["remainder_coefficient"] = d;
    rep.fitted_constants["derivative_log_intercept"] = icpt;
  } else {
    std::vector<double> r2, lp;
    for (auto* s : win) {
      const double ph = std::isfinite(s->u) ? p.phi(s->u) : kInf;
      if (ph > 0.0 && std::isfinite(ph)) {
        r2.push_back(s->r * s->r);
        lp.push_back(std::log(ph));
      }
    }
    if (r2.size() < 8) throw Error(ErrorKind::WindowTooShort, "too few finite samples in the radius window");
    const auto [alpha, logc] = detail::linear_fit(r2, lp);
    rep.fitted_constants["alpha"] = alpha;
    rep.fitted_constants["C"] = std::exp(logc);
    double worst = 0.0;
    for (std::size_t i = 0; i < r2.size(); ++i) worst = std::max(worst, std::abs(lp[i] - logc - alpha * r2[i]));
    rep.fitted_constants["log_fit_residual"] = worst;
  }
  return rep;
}

}  // namespace phimin
