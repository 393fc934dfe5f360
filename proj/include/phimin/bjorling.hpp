#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phimin/error.hpp"
#include "phimin/geometry.hpp"
#include "phimin/weierstrass.hpp"

namespace phimin {

enum class SeriesBasis { Taylor, Fourier };

inline const char* to_string(SeriesBasis b) { return b == SeriesBasis::Taylor ? "taylor" : "fourier"; }

/// Real analytic function of s. Taylor: sum a_k (s - center)^k. Fourier:
/// a_0 + sum_m a_m cos(2 pi m s / period) + b_m sin(2 pi m s / period).
struct RealSeries {
  SeriesBasis basis = SeriesBasis::Taylor;
  double param = 0.0;  ///< center (Taylor) or period (Fourier)
  std::vector<double> a, b;

  double operator()(double s) const { return eval(s, 0); }

  /// d-th derivative at s.
  double eval(double s, int d) const {
    if (basis == SeriesBasis::Taylor) {
      double v = 0.0;
      for (std::size_t k = a.size(); k-- > static_cast<std::size_t>(d);) {
        double c = a[k];
        for (int q = 0; q < d; ++q) c *= static_cast<double>(k - q);
        v = v * (s - param) + c;
      }
      return v;
    }
    const double w = 2 * std::numbers::pi / param;
    double v = d == 0 && !a.empty() ? a[0] : 0.0;
    for (std::size_t m = 1; m < std::max(a.size(), b.size()); ++m) {
      const double am = m < a.size() ? a[m] : 0.0, bm = m < b.size() ? b[m] : 0.0;
      const double f = std::pow(w * m, d), ph = w * m * s + d * std::numbers::pi / 2;
      v += f * (am * std::cos(ph) + bm * std::sin(ph));
    }
    return v;
  }
};

/// Curve beta and unit normal field V along it.
struct BjorlingData {
  std::array<RealSeries, 3> beta, V;
  int degree = 12;  ///< truncation order of the series in v

  SeriesBasis basis() const { return beta[0].basis; }
  double param() const { return beta[0].param; }
  Vec3 beta_at(double s, int d = 0) const { return {beta[0].eval(s, d), beta[1].eval(s, d), beta[2].eval(s, d)}; }
  Vec3 V_at(double s) const { return {V[0](s), V[1](s), V[2](s)}; }

  /// Checks the data constraints at n points of [lo, hi].
  void validate(double k, double lo, double hi, int n = 257) const {
    for (const auto* arr : {&beta, &V})
      for (const auto& c : *arr)
        if (c.basis != basis() || c.param != param())
          throw Error(ErrorKind::InvalidData, "all components must share one basis");
    if (basis() == SeriesBasis::Fourier && !(param() > 0.0)) throw Error(ErrorKind::InvalidData, "period must be positive");
    if (degree < 1) throw Error(ErrorKind::InvalidParameter, "degree must be at least 1");
    for (int i = 0; i < n; ++i) {
      const double s = lo + (hi - lo) * i / (n - 1);
      const Vec3 d = beta_at(s, 1), v = V_at(s);
      if (!(d.norm() > 1e-12)) throw Error(ErrorKind::InvalidData, "curve is not regular");
      if (std::abs(v.norm() - 1.0) > 1e-8) throw Error(ErrorKind::InvalidData, "V is not a unit field");
      if (std::abs(d.dot(v)) > 1e-8 * d.norm()) throw Error(ErrorKind::InvalidData, "V is not orthogonal to the curve");
      if (!(v.z() > 0.0)) throw Error(ErrorKind::InvalidData, "stereographic projection of V must lie in the unit disc");
      if (k != 1.0 && !(beta[2](s) > 0.0)) throw Error(ErrorKind::InvalidData, "curve must stay in the upper half-space");
    }
  }
};

/// Horizontal circle of radius r0 at height z0 traversed by arc length, V at
/// angle theta from the vertical towards the axis.
inline BjorlingData circle_data(double r0, double z0, double theta, int degree = 12) {
  if (!(r0 > 0.0)) throw Error(ErrorKind::InvalidParameter, "radius must be positive");
  const double L = 2 * std::numbers::pi * r0, st = std::sin(theta);
  BjorlingData d;
  d.degree = degree;
  d.beta = {RealSeries{SeriesBasis::Fourier, L, {0.0, r0}, {0.0, 0.0}},
            RealSeries{SeriesBasis::Fourier, L, {0.0, 0.0}, {0.0, r0}}, RealSeries{SeriesBasis::Fourier, L, {z0}, {}}};
  d.V = {RealSeries{SeriesBasis::Fourier, L, {0.0, -st}, {0.0, 0.0}},
         RealSeries{SeriesBasis::Fourier, L, {0.0, 0.0}, {0.0, -st}},
         RealSeries{SeriesBasis::Fourier, L, {std::cos(theta)}, {}}};
  return d;
}

/// The line (0, s, z0) with V = (-sin alpha, 0, cos alpha).
inline BjorlingData line_data(double z0, double alpha, int degree = 12) {
  BjorlingData d;
  d.degree = degree;
  d.beta = {RealSeries{SeriesBasis::Taylor, 0.0, {0.0}, {}}, RealSeries{SeriesBasis::Taylor, 0.0, {0.0, 1.0}, {}},
            RealSeries{SeriesBasis::Taylor, 0.0, {z0}, {}}};
  d.V = {RealSeries{SeriesBasis::Taylor, 0.0, {-std::sin(alpha)}, {}}, RealSeries{SeriesBasis::Taylor, 0.0, {0.0}, {}},
         RealSeries{SeriesBasis::Taylor, 0.0, {std::cos(alpha)}, {}}};
  return d;
}

namespace detail {

/// Complex functions of s in one of the two bases: Taylor coefficients
/// about the center, or samples on a periodic grid.
class SBasis {
 public:
  using F = Eigen::VectorXcd;

  SBasis(SeriesBasis b, double param, int size) : basis_(b), param_(param), n_(size) {
    if (b == SeriesBasis::Fourier) {
      const double w = 2 * std::numbers::pi / n_;
      fwd_.resize(n_, n_);
      bwd_.resize(n_, n_);
      for (int m = 0; m < n_; ++m)
        for (int j = 0; j < n_; ++j) {
          fwd_(m, j) = std::polar(1.0 / n_, -w * m * j);
          bwd_(j, m) = std::polar(1.0, w * m * j);
        }
    }
  }

  int size() const { return n_; }
  double node(int j) const { return param_ * j / n_; }

  F from(const RealSeries& r) const {
    F out = F::Zero(n_);
    if (basis_ == SeriesBasis::Fourier) {
      for (int j = 0; j < n_; ++j) out(j) = r(node(j));
    } else {
      for (std::size_t k = 0; k < r.a.size() && static_cast<int>(k) < n_; ++k) out(k) = r.a[k];
    }
    return out;
  }
  F constant(cplx c) const {
    if (basis_ == SeriesBasis::Fourier) return F::Constant(n_, c);
    F out = F::Zero(n_);
    out(0) = c;
    return out;
  }
  F mul(const F& a, const F& b) const {
    if (basis_ == SeriesBasis::Fourier) return a.cwiseProduct(b);
    F out = F::Zero(n_);
    for (int i = 0; i < n_; ++i)
      if (a(i) != 0.0)
        for (int j = 0; i + j < n_; ++j) out(i + j) += a(i) * b(j);
    return out;
  }
  F div(const F& a, const F& b) const {
    if (basis_ == SeriesBasis::Fourier) return a.cwiseQuotient(b);
    if (std::abs(b(0)) == 0.0) throw Error(ErrorKind::SingularLocus, "division by a series vanishing at the center");
    F out(n_);
    for (int i = 0; i < n_; ++i) {
      cplx v = a(i);
      for (int j = 1; j <= i; ++j) v -= b(j) * out(i - j);
      out(i) = v / b(0);
    }
    return out;
  }
  F conj(const F& a) const { return a.conjugate(); }
  F d(const F& a) const {
    if (basis_ == SeriesBasis::Taylor) {
      F out = F::Zero(n_);
      for (int i = 1; i < n_; ++i) out(i - 1) = a(i) * static_cast<double>(i);
      return out;
    }
    F c = fwd_ * a;
    for (int m = 0; m < n_; ++m) {
      const int mm = m <= n_ / 2 ? m : m - n_;
      c(m) *= (2 * m == n_) ? cplx(0.0) : cplx(0.0, 2 * std::numbers::pi * mm / param_);
    }
    return bwd_ * c;
  }
  /// Coefficient form used by eval_coeffs.
  std::vector<F> coefficients(const std::vector<F>& fs) const {
    std::vector<F> out;
    for (const auto& f : fs) out.push_back(basis_ == SeriesBasis::Fourier ? F(fwd_ * f) : f);
    return out;
  }
  cplx eval_coeffs(const F& c, double s) const {
    if (basis_ == SeriesBasis::Taylor) {
      cplx v = 0.0;
      for (int i = n_; i-- > 0;) v = v * (s - param_) + c(i);
      return v;
    }
    cplx v = 0.0;
    for (int m = 0; m < n_; ++m) {
      const int mm = m <= n_ / 2 ? m : m - n_;
      const double ph = 2 * std::numbers::pi * mm * s / param_;
      v += (2 * m == n_) ? c(m) * std::cos(ph) : c(m) * std::polar(1.0, ph);
    }
    return v;
  }

 private:
  SeriesBasis basis_;
  double param_;
  int n_;
  Eigen::MatrixXcd fwd_, bwd_;
};

using VSeries = std::vector<SBasis::F>;

inline VSeries vmul(const SBasis& B, const VSeries& a, const VSeries& b, int order) {
  VSeries out(order + 1, SBasis::F::Zero(B.size()));
  for (int n = 0; n <= order; ++n)
    for (int k = 0; k <= n; ++k) out[n] += B.mul(a[k], b[n - k]);
  return out;
}

inline VSeries vdiv(const SBasis& B, const VSeries& a, const VSeries& b, int order) {
  VSeries out(order + 1);
  for (int n = 0; n <= order; ++n) {
    SBasis::F v = a[n];
    for (int k = 1; k <= n; ++k) v -= B.mul(b[k], out[n - k]);
    out[n] = B.div(v, b[0]);
  }
  return out;
}

}  // namespace detail

struct BjorlingOptions {
  double s_lo = kNaN, s_hi = kNaN;  ///< parameter range; full period or center +/- 1 when NaN
  int ns = 201, nv = 201;
  int basis_size = 0;               ///< Fourier samples or Taylor length in s (0: 64)
  double tol = 1e-4;                ///< bound on the Gauss-map PDE residual of the result
};

struct BjorlingSolution {
  GaussField field;
  BjorlingData data;
  double pde_residual = 0.0;
  double initial_gap = 0.0;   ///< disagreement of the two expressions for G(s, 0)
  double tail = 0.0;          ///< size of the last series term on the strip
  std::vector<std::vector<cplx>> coefficients;  ///< g_n(s) at the grid abscissae
};

/// Cauchy-Kowalewski series G(s, v) = sum g_n(s) v^n of the Gauss-map PDE
/// with the initial values determined by the data, evaluated on the strip
/// |v| <= halfwidth.
inline BjorlingSolution solve_bjorling(const BjorlingData& data, double k, double halfwidth,
                                       const BjorlingOptions& opt = {}) {
  if (k == 0.0) throw Error(ErrorKind::InvalidParameter, "k = 0 is not supported");
  if (!(halfwidth > 0.0)) throw Error(ErrorKind::InvalidParameter, "halfwidth must be positive");
  if (opt.ns < 5 || opt.nv < 5) throw Error(ErrorKind::DegenerateRange, "grid needs at least 5 nodes per axis");
  const bool fourier = data.basis() == SeriesBasis::Fourier;
  double lo = opt.s_lo, hi = opt.s_hi;
  if (std::isnan(lo)) lo = fourier ? 0.0 : data.param() - 1.0;
  if (std::isnan(hi)) hi = fourier ? data.param() : data.param() + 1.0;
  if (!(hi > lo)) throw Error(ErrorKind::DegenerateRange, "empty parameter range");
  data.validate(k, lo, hi);

  using detail::VSeries;
  const detail::SBasis B(data.basis(), data.param(), opt.basis_size > 0 ? opt.basis_size : 64);
  using F = detail::SBasis::F;
  const cplx I(0, 1);

  // phi = (beta' - i beta' x V) / 2
  std::array<F, 3> bp, V;
  for (int c = 0; c < 3; ++c) {
    bp[c] = B.d(B.from(data.beta[c]));
    V[c] = B.from(data.V[c]);
  }
  std::array<F, 3> ph;
  for (int c = 0; c < 3; ++c) {
    const int a = (c + 1) % 3, b = (c + 2) % 3;
    const F cross = B.mul(bp[a], V[b]) - B.mul(bp[b], V[a]);
    ph[c] = 0.5 * (bp[c] - I * cross);
  }
  const F g0 = B.div(ph[2], ph[0] - I * ph[1]);
  const F one = B.constant(1.0);
  const F g0c = B.conj(g0);
  const F m4 = one - B.mul(B.mul(g0, g0), B.mul(g0c, g0c));
  F gzb0 = B.mul(m4, B.conj(ph[0]) + I * B.conj(ph[1]));
  if (k == 1.0) {
    gzb0 *= 0.25;
  } else {
    gzb0 = B.div(gzb0, 2.0 * (k - 1.0) * B.from(data.beta[2]));
  }
  const F g1 = -I * (2.0 * gzb0 - B.d(g0));  // G_v(s, 0)

  const int N = data.degree;
  VSeries g(N + 1, F::Zero(B.size()));
  g[0] = g0;
  if (N >= 1) g[1] = g1;
  for (int m = 0; m + 2 <= N; ++m) {
    VSeries G(g.begin(), g.begin() + m + 1), Gs(m + 1), Gv(m + 1), Gc(m + 1);
    for (int n = 0; n <= m; ++n) {
      Gs[n] = B.d(g[n]);
      Gv[n] = static_cast<double>(n + 1) * g[n + 1];
      Gc[n] = B.conj(g[n]);
    }
    VSeries Gz(m + 1), Gzb(m + 1), Gzbc(m + 1);
    for (int n = 0; n <= m; ++n) {
      Gz[n] = 0.5 * (Gs[n] - I * Gv[n]);
      Gzb[n] = 0.5 * (Gs[n] + I * Gv[n]);
      Gzbc[n] = B.conj(Gzb[n]);
    }
    const VSeries Gc2 = detail::vmul(B, Gc, Gc, m);
    VSeries D = detail::vmul(B, detail::vmul(B, G, G, m), Gc2, m);
    for (int n = 0; n <= m; ++n) D[n] = (n == 0 ? one : F(F::Zero(B.size()))) - D[n];
    const VSeries t1 = detail::vmul(B, detail::vmul(B, detail::vmul(B, G, Gc2, m), Gz, m), Gzb, m);
    const VSeries t2 = detail::vmul(B, detail::vmul(B, Gzb, Gzbc, m), G, m);
    VSeries num(m + 1);
    for (int n = 0; n <= m; ++n) num[n] = 2.0 * t1[n] + 2.0 * k * t2[n];
    const VSeries Q = detail::vdiv(B, num, D, m);
    g[m + 2] = (-B.d(B.d(g[m])) - 4.0 * Q[m]) / static_cast<double>((m + 2) * (m + 1));
  }

  BjorlingSolution out;
  out.data = data;
  auto& f = out.field;
  f.k = k;
  f.u = linspace(lo, hi, opt.ns);
  f.v = linspace(-halfwidth, halfwidth, opt.nv);
  f.G.resize(opt.ns, opt.nv);
  const auto coeffs = B.coefficients(g);
  const auto alt_c = B.coefficients({B.div(-(ph[0] + I * ph[1]), ph[2]), ph[2]});
  out.coefficients.assign(N + 1, std::vector<cplx>(opt.ns));
  for (int i = 0; i < opt.ns; ++i) {
    const double s = f.u[i];
    for (int n = 0; n <= N; ++n) out.coefficients[n][i] = B.eval_coeffs(coeffs[n], s);
    if (std::abs(B.eval_coeffs(alt_c[1], s)) > 1e-8)
      out.initial_gap = std::max(out.initial_gap, std::abs(B.eval_coeffs(alt_c[0], s) - out.coefficients[0][i]));
    out.tail = std::max(out.tail, std::abs(out.coefficients[N][i]) * std::pow(halfwidth, N));
    for (int j = 0; j < opt.nv; ++j) {
      cplx val = 0.0;
      for (int n = N; n >= 0; --n) val = val * f.v[j] + out.coefficients[n][i];
      f.G(i, j) = val;
    }
  }
  out.pde_residual = max_abs(gauss_pde_residual(f));
  if (!(out.pde_residual <= opt.tol))
    throw Error(ErrorKind::SeriesDivergence,
                "series residual " + std::to_string(out.pde_residual) + " exceeds the tolerance on the strip",
                out.pde_residual);
  return out;
}

/// Surface of a Bjorling solution, pinned so that the middle of the curve
/// is at beta.
inline Representation bjorling_surface(const BjorlingSolution& sol, RepresentationOptions opt = {}) {
  const auto& f = sol.field;
  const int bi = f.nu() / 2;
  int bj = 0;
  for (int j = 1; j < f.nv(); ++j)
    if (std::abs(f.v[j]) < std::abs(f.v[bj])) bj = j;
  opt.base = cplx(f.u[bi], f.v[bj]);
  opt.pin = sol.data.beta_at(f.u[bi]);
  return integrate_representation(f, opt);
}

}  // namespace phimin
