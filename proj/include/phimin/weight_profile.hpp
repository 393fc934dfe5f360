#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/special_functions/expint.hpp>

#include "phimin/error.hpp"
#include "phimin/quadrature.hpp"

namespace phimin {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Open interval (lo, hi); either end may be infinite.
struct Interval {
  double lo = -kInf;
  double hi = kInf;

  bool contains(double t) const { return t > lo && t < hi; }
  bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }
};

enum class ProfileKind {
  Linear,      ///< phi(z) = m z on R
  Log,         ///< phi(z) = alpha log z on (0, inf)
  Power,       ///< phi'(z) = z^p on (0, inf)
  ExpInverse,  ///< phi'(z) = exp(-1/z) on (0, inf)
  Series,      ///< phi'(z) = L z + b + sum c_i / z^i
  Custom,      ///< user callables
  Dual,        ///< -phi o theta^{-1}, produced by the Calabi transform
};

inline const char* to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::Linear: return "linear";
    case ProfileKind::Log: return "log";
    case ProfileKind::Power: return "power";
    case ProfileKind::ExpInverse: return "exp-inverse";
    case ProfileKind::Series: return "series";
    case ProfileKind::Custom: return "custom";
    case ProfileKind::Dual: return "dual";
  }
  return "unknown";
}

inline std::optional<ProfileKind> profile_kind_from_string(const std::string& s) {
  for (auto k : {ProfileKind::Linear, ProfileKind::Log, ProfileKind::Power, ProfileKind::ExpInverse,
                 ProfileKind::Series, ProfileKind::Custom, ProfileKind::Dual})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

enum class Monotonicity { Any, Increasing, Decreasing };

/// Serializable description of a profile. For Dual profiles `base` is the
/// profile that was transformed and `params[0]` the additive constant of
/// its primitive (NaN when the closed-form primitive was used).
struct ProfileSpec {
  ProfileKind kind = ProfileKind::Linear;
  std::vector<double> params;
  Interval domain;
  std::shared_ptr<const ProfileSpec> base;
};

/// A primitive of exp(phi) together with its inverse.
struct Primitive {
  std::function<double(double)> value;
  std::function<double(double)> inverse;
};

/// The weight function phi with its first two derivatives. Immutable.
class WeightProfile {
 public:
  using Fn = std::function<double(double)>;

  WeightProfile(ProfileSpec spec, Fn phi, Fn dphi, Fn ddphi, double phi_lo, double phi_hi)
      : spec_(std::move(spec)),
        phi_(std::move(phi)),
        dphi_(std::move(dphi)),
        ddphi_(std::move(ddphi)),
        phi_lo_(phi_lo),
        phi_hi_(phi_hi) {}

  double phi(double z) const { return phi_(z); }
  double dphi(double z) const { return dphi_(z); }
  double ddphi(double z) const { return ddphi_(z); }

  const ProfileSpec& spec() const { return spec_; }
  ProfileKind kind() const { return spec_.kind; }
  const Interval& domain() const { return spec_.domain; }

  /// Limits of phi at the two domain ends (the range of phi).
  double phi_at_lo() const { return phi_lo_; }
  double phi_at_hi() const { return phi_hi_; }
  Interval range() const {
    return increasing() ? Interval{phi_lo_, phi_hi_} : Interval{phi_hi_, phi_lo_};
  }

  bool increasing() const { return !(phi_hi_ < phi_lo_); }

  /// Closed-form inverse of phi, when the kind has one.
  const std::optional<Fn>& closed_inverse() const { return inverse_; }
  /// Closed-form primitive of exp(phi) vanishing where exp(phi) is not
  /// integrable from, when the kind has one.
  const std::optional<Primitive>& natural_primitive() const { return primitive_; }

  WeightProfile& with_inverse(Fn inv) {
    inverse_ = std::move(inv);
    return *this;
  }
  WeightProfile& with_primitive(Primitive p) {
    primitive_ = std::move(p);
    return *this;
  }

  /// For Dual profiles: the profile that was transformed.
  const std::shared_ptr<const WeightProfile>& dual_base() const { return base_; }
  WeightProfile& with_dual_base(std::shared_ptr<const WeightProfile> b) {
    base_ = std::move(b);
    return *this;
  }

 private:
  ProfileSpec spec_;
  Fn phi_, dphi_, ddphi_;
  double phi_lo_, phi_hi_;
  std::optional<Fn> inverse_;
  std::optional<Primitive> primitive_;
  std::shared_ptr<const WeightProfile> base_;
};

namespace detail {

/// Maps t in (0,1) to a point of the interval; used for sampled checks.
inline double interval_sample(const Interval& d, double t) {
  if (d.finite()) return d.lo + t * (d.hi - d.lo);
  if (std::isfinite(d.lo)) return d.lo + t / (1.0 - t) * std::max(1.0, std::abs(d.lo));
  if (std::isfinite(d.hi)) return d.hi - (1.0 - t) / t * std::max(1.0, std::abs(d.hi));
  return std::tan(std::numbers::pi * (t - 0.5));
}

inline Monotonicity sampled_monotonicity(const WeightProfile& p, int n = 2000) {
  int pos = 0, neg = 0;
  for (int i = 1; i < n; ++i) {
    const double z = interval_sample(p.domain(), static_cast<double>(i) / n);
    if (!p.domain().contains(z)) continue;
    const double d = p.dphi(z);
    if (!std::isfinite(d)) continue;
    if (d > 0.0) ++pos;
    if (d < 0.0) ++neg;
  }
  // isolated zeros (or underflow, as for exp(-1/z) near 0) keep monotonicity
  if (pos > 0 && neg == 0) return Monotonicity::Increasing;
  if (neg > 0 && pos == 0) return Monotonicity::Decreasing;
  return Monotonicity::Any;
}

inline void check_monotone(const WeightProfile& p, Monotonicity required) {
  const Monotonicity m = sampled_monotonicity(p);
  if (m == Monotonicity::Any)
    throw Error(ErrorKind::InvalidParameter, std::string(to_string(p.kind())) +
                                                 " profile is not strictly monotone on its domain");
  if (required != Monotonicity::Any && m != required)
    throw Error(ErrorKind::InvalidParameter,
                std::string(to_string(p.kind())) + " profile does not have the requested monotonicity");
}

inline double limit_or_inf(double v, double sign_if_inf) {
  if (std::isfinite(v)) return v;
  return sign_if_inf * kInf;
}

}  // namespace detail

/// Builds one of the closed-form profiles.
///   Linear: {m}             phi = m z
///   Log: {alpha}            phi = alpha log z
///   Power: {p}              phi' = z^p
///   ExpInverse: {}          phi' = exp(-1/z)
///   Series: {L, b, c1, ..}  phi' = L z + b + sum c_i z^-i, domain lo defaults to 0
/// `domain` overrides the default domain (Series only, or to shrink another kind).
inline WeightProfile make_builtin(ProfileKind kind, std::span<const double> params,
                                  std::optional<Interval> domain = std::nullopt,
                                  Monotonicity required = Monotonicity::Any) {
  auto need = [&](std::size_t n) {
    if (params.size() < n)
      throw Error(ErrorKind::InvalidParameter,
                  std::string(to_string(kind)) + " profile needs " + std::to_string(n) + " parameter(s)");
  };
  ProfileSpec spec{kind, std::vector<double>(params.begin(), params.end()), {}, nullptr};
  auto make = [&](Interval def, auto phi, auto dphi, auto ddphi, double lo_lim, double hi_lim) {
    spec.domain = domain.value_or(def);
    if (spec.domain.lo >= spec.domain.hi) throw Error(ErrorKind::InvalidParameter, "empty profile domain");
    return WeightProfile(spec, phi, dphi, ddphi, lo_lim, hi_lim);
  };

  std::optional<WeightProfile> out;
  switch (kind) {
    case ProfileKind::Linear: {
      need(1);
      const double m = params[0];
      if (m == 0.0 || !std::isfinite(m))
        throw Error(ErrorKind::InvalidParameter, "linear profile needs a nonzero finite slope");
      out = make(
          Interval{}, [m](double z) { return m * z; }, [m](double) { return m; },
          [](double) { return 0.0; }, -m * kInf, m * kInf);
      out->with_inverse([m](double z) { return z / m; });
      out->with_primitive({[m](double z) { return std::exp(m * z) / m; },
                           [m](double w) { return std::log(m * w) / m; }});
      break;
    }
    case ProfileKind::Log: {
      need(1);
      const double a = params[0];
      if (a == 0.0 || !std::isfinite(a))
        throw Error(ErrorKind::InvalidParameter, "log profile needs a nonzero finite coefficient");
      out = make(
          Interval{0.0, kInf}, [a](double z) { return a * std::log(z); },
          [a](double z) { return a / z; }, [a](double z) { return -a / (z * z); }, -a * kInf, a * kInf);
      out->with_inverse([a](double w) { return std::exp(w / a); });
      if (a == -1.0)
        out->with_primitive({[](double z) { return std::log(z); }, [](double w) { return std::exp(w); }});
      else
        out->with_primitive({[a](double z) { return std::pow(z, a + 1.0) / (a + 1.0); },
                             [a](double w) { return std::pow((a + 1.0) * w, 1.0 / (a + 1.0)); }});
      break;
    }
    case ProfileKind::Power: {
      need(1);
      const double p = params[0];
      if (!std::isfinite(p)) throw Error(ErrorKind::InvalidParameter, "power profile needs a finite exponent");
      if (p == -1.0) {
        out = make(
            Interval{0.0, kInf}, [](double z) { return std::log(z); }, [](double z) { return 1.0 / z; },
            [](double z) { return -1.0 / (z * z); }, -kInf, kInf);
        out->with_inverse([](double w) { return std::exp(w); });
        out->with_primitive({[](double z) { return 0.5 * z * z; }, [](double w) { return std::sqrt(2.0 * w); }});
      } else {
        const double q = p + 1.0;
        out = make(
            Interval{0.0, kInf}, [q](double z) { return std::pow(z, q) / q; },
            [p](double z) { return std::pow(z, p); },
            [p](double z) { return p == 0.0 ? 0.0 : p * std::pow(z, p - 1.0); }, q > 0 ? 0.0 : -kInf,
            q > 0 ? kInf : 0.0);
        out->with_inverse([q](double w) { return std::pow(q * w, 1.0 / q); });
      }
      break;
    }
    case ProfileKind::ExpInverse: {
      // phi(z) = int_0^z exp(-1/t) dt = z exp(-1/z) - E1(1/z)
      out = make(
          Interval{0.0, kInf},
          [](double z) {
            if (z <= 0.0) return 0.0;
            const double w = 1.0 / z;
            if (w > 700.0) return 0.0;
            return z * std::exp(-w) - boost::math::expint(1, w);
          },
          [](double z) { return z > 0.0 ? std::exp(-1.0 / z) : 0.0; },
          [](double z) { return z > 0.0 ? std::exp(-1.0 / z) / (z * z) : 0.0; }, 0.0, kInf);
      break;
    }
    case ProfileKind::Series: {
      need(2);
      const double L = params[0], b = params[1];
      std::vector<double> c(params.begin() + 2, params.end());
      if (L < 0.0) throw Error(ErrorKind::InvalidParameter, "series profile needs Lambda >= 0");
      if (L == 0.0 && !(b > 0.0))
        throw Error(ErrorKind::InvalidParameter, "series profile needs beta > 0 when Lambda = 0");
      auto phi = [L, b, c](double z) {
        double v = 0.5 * L * z * z + b * z;
        for (std::size_t i = 0; i < c.size(); ++i) {
          const int n = static_cast<int>(i) + 1;
          v += n == 1 ? c[i] * std::log(z) : -c[i] / ((n - 1) * std::pow(z, n - 1));
        }
        return v;
      };
      auto dphi = [L, b, c](double z) {
        double v = L * z + b;
        for (std::size_t i = 0; i < c.size(); ++i) v += c[i] / std::pow(z, static_cast<double>(i + 1));
        return v;
      };
      auto ddphi = [L, c](double z) {
        double v = L;
        for (std::size_t i = 0; i < c.size(); ++i) {
          const double n = static_cast<double>(i + 1);
          v -= n * c[i] / std::pow(z, n + 1.0);
        }
        return v;
      };
      const Interval d = domain.value_or(Interval{0.0, kInf});
      double lo_lim = d.lo == 0.0 && !c.empty() ? -kInf : phi(d.lo);
      if (!std::isfinite(d.lo)) lo_lim = L > 0.0 ? kInf : -kInf;
      out = make(Interval{0.0, kInf}, phi, dphi, ddphi, detail::limit_or_inf(lo_lim, -1.0), kInf);
      break;
    }
    case ProfileKind::Custom:
    case ProfileKind::Dual:
      throw Error(ErrorKind::InvalidParameter, "not a builtin profile kind");
  }
  detail::check_monotone(*out, required);
  return *out;
}

inline WeightProfile make_builtin(ProfileKind kind, std::initializer_list<double> params,
                                  std::optional<Interval> domain = std::nullopt,
                                  Monotonicity required = Monotonicity::Any) {
  return make_builtin(kind, std::span<const double>(params.begin(), params.size()), domain, required);
}

/// Profile from callables. When ddphi is absent it is replaced by a central
/// difference of dphi. The limits of phi at the domain ends are taken from
/// `phi_limits` or, if absent, by evaluating phi at the (finite) endpoints
/// and assuming +/-inf at infinite ones.
inline WeightProfile make_custom(WeightProfile::Fn phi, WeightProfile::Fn dphi, Interval domain,
                                 std::optional<WeightProfile::Fn> ddphi = std::nullopt,
                                 std::optional<std::pair<double, double>> phi_limits = std::nullopt,
                                 Monotonicity required = Monotonicity::Any) {
  if (!phi || !dphi) throw Error(ErrorKind::InvalidParameter, "custom profile needs phi and dphi");
  if (domain.lo >= domain.hi) throw Error(ErrorKind::InvalidParameter, "empty profile domain");
  WeightProfile::Fn dd = ddphi ? *ddphi : WeightProfile::Fn([dphi](double z) {
    const double h = 1e-5 * std::max(1.0, std::abs(z));
    return (dphi(z + h) - dphi(z - h)) / (2.0 * h);
  });
  const double mid = detail::interval_sample(domain, 0.5);
  const double s = dphi(mid) >= 0.0 ? 1.0 : -1.0;
  double lo = -s * kInf, hi = s * kInf;
  if (phi_limits) {
    lo = phi_limits->first;
    hi = phi_limits->second;
  } else {
    if (std::isfinite(domain.lo)) lo = detail::limit_or_inf(phi(domain.lo), -s);
    if (std::isfinite(domain.hi)) hi = detail::limit_or_inf(phi(domain.hi), s);
  }
  WeightProfile p(ProfileSpec{ProfileKind::Custom, {}, domain, nullptr}, std::move(phi), std::move(dphi),
                  std::move(dd), lo, hi);
  detail::check_monotone(p, required);
  return p;
}

/// Profile from a table of (z, phi, dphi) with z strictly increasing; phi is
/// the cubic Hermite interpolant and dphi its derivative.
inline WeightProfile make_tabulated(std::vector<double> z, std::vector<double> phi, std::vector<double> dphi,
                                    Monotonicity required = Monotonicity::Any) {
  if (z.size() < 2 || phi.size() != z.size() || dphi.size() != z.size())
    throw Error(ErrorKind::InvalidParameter, "tabulated profile needs matching tables of length >= 2");
  for (std::size_t i = 1; i < z.size(); ++i)
    if (!(z[i] > z[i - 1])) throw Error(ErrorKind::InvalidParameter, "tabulated abscissae must increase");
  struct Table {
    std::vector<double> z, f, d;
    std::size_t cell(double t) const {
      auto it = std::upper_bound(z.begin(), z.end(), t);
      std::size_t i = it == z.begin() ? 0 : static_cast<std::size_t>(it - z.begin()) - 1;
      return std::min(i, z.size() - 2);
    }
  };
  auto tab = std::make_shared<Table>(Table{std::move(z), std::move(phi), std::move(dphi)});
  auto value = [tab](double t) {
    const std::size_t i = tab->cell(t);
    const double h = tab->z[i + 1] - tab->z[i], s = (t - tab->z[i]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * tab->f[i] + h10 * h * tab->d[i] + h01 * tab->f[i + 1] + h11 * h * tab->d[i + 1];
  };
  auto deriv = [tab](double t) {
    const std::size_t i = tab->cell(t);
    const double h = tab->z[i + 1] - tab->z[i], s = (t - tab->z[i]) / h;
    const double d00 = 6 * s * s - 6 * s, d10 = 3 * s * s - 4 * s + 1;
    const double d01 = -6 * s * s + 6 * s, d11 = 3 * s * s - 2 * s;
    return (d00 * tab->f[i] + d01 * tab->f[i + 1]) / h + d10 * tab->d[i] + d11 * tab->d[i + 1];
  };
  auto second = [tab](double t) {
    const std::size_t i = tab->cell(t);
    const double h = tab->z[i + 1] - tab->z[i], s = (t - tab->z[i]) / h;
    const double d00 = 12 * s - 6, d10 = 6 * s - 4, d01 = -12 * s + 6, d11 = 6 * s - 2;
    return (d00 * tab->f[i] + d01 * tab->f[i + 1]) / (h * h) + (d10 * tab->d[i] + d11 * tab->d[i + 1]) / h;
  };
  Interval dom{tab->z.front(), tab->z.back()};
  return make_custom(value, deriv, dom, second, std::make_pair(tab->f.front(), tab->f.back()), required);
}

/// phi^{-1}(w): closed form for builtins, bracketed bisection otherwise.
inline double inverse_phi(const WeightProfile& p, double w) {
  const Interval r = p.range();
  if (!(w > r.lo && w < r.hi))
    throw Error(ErrorKind::OutOfRange, "value " + std::to_string(w) + " is outside the range of phi");
  if (p.closed_inverse()) return (*p.closed_inverse())(w);

  const Interval& d = p.domain();
  const double sgn = p.increasing() ? 1.0 : -1.0;
  auto g = [&](double z) { return sgn * (p.phi(z) - w); };  // increasing in z

  double lo = detail::interval_sample(d, 0.5), hi = lo;
  // Expand the bracket towards the domain ends.
  double step = std::max(1.0, std::abs(lo));
  for (int i = 0; i < 4000 && g(lo) > 0.0; ++i) {
    if (std::isfinite(d.lo)) {
      lo = d.lo + 0.5 * (lo - d.lo);
    } else {
      lo -= step;
      step *= 2.0;
    }
  }
  step = std::max(1.0, std::abs(hi));
  for (int i = 0; i < 4000 && g(hi) < 0.0; ++i) {
    if (std::isfinite(d.hi)) {
      hi = d.hi - 0.5 * (d.hi - hi);
    } else {
      hi += step;
      step *= 2.0;
    }
  }
  if (g(lo) > 0.0 || g(hi) < 0.0) throw Error(ErrorKind::OutOfRange, "could not bracket phi^{-1}");
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= 1e-12 * std::max(1.0, std::abs(mid))) break;
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// lambda(z) = phi'(phi^{-1}(z)).
inline double lambda_of_z(const WeightProfile& p, double z) { return p.dphi(inverse_phi(p, z)); }

/// G(u) = int_{u0}^{u} d xi / phi'(xi).
inline double curly_g(const WeightProfile& p, double u0, double u, double tol = 1e-12) {
  const Interval& d = p.domain();
  auto inside = [&](double t) { return t >= d.lo && t <= d.hi && std::isfinite(t); };
  if (!inside(u0) || !inside(u)) throw Error(ErrorKind::OutOfRange, "curly_g interval leaves the profile domain");
  if (u == u0) return 0.0;
  return quad::integrate([&](double xi) { return 1.0 / p.dphi(xi); }, u0, u, tol);
}

}  // namespace phimin
