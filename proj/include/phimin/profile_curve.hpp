#pragma once

#include <algorithm>
#include <array>
#include <numbers>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "phimin/error.hpp"
#include "phimin/weight_profile.hpp"

namespace phimin {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum class CurveKind { CatenaryGraph, BowlGraph, CatenoidRight, CatenoidLeft };

inline const char* to_string(CurveKind k) {
  switch (k) {
    case CurveKind::CatenaryGraph: return "catenary";
    case CurveKind::BowlGraph: return "bowl";
    case CurveKind::CatenoidRight: return "catenoid-right";
    case CurveKind::CatenoidLeft: return "catenoid-left";
  }
  return "unknown";
}

/// Why the integration of a curve ended.
enum class Termination { Reached, BlowUp, DomainExit, Overflow, StepLimit };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::Reached: return "reached";
    case Termination::BlowUp: return "blow-up";
    case Termination::DomainExit: return "domain-exit";
    case Termination::Overflow: return "overflow";
    case Termination::StepLimit: return "step-limit";
  }
  return "unknown";
}

/// One point of a generating curve. For catenary graphs `s` is the abscissa
/// x, theta = arctan u' and dtheta = d theta / dx; otherwise s is arc length
/// and dtheta = d theta / ds.
struct CurveSample {
  double s = 0, x = 0, z = 0, theta = 0, dtheta = 0;
};

struct InitialData {
  double u0 = kNaN;
  double x0 = kNaN;
  double z0 = kNaN;
  double theta0 = kNaN;
};

struct ProfileCurve {
  CurveKind kind = CurveKind::CatenaryGraph;
  ProfileSpec profile;
  InitialData initial;
  std::vector<CurveSample> samples;
  Termination termination = Termination::Reached;
  double end_estimate = kNaN;  ///< last abscissa (Lambda or omega estimate) when not reached
  std::map<std::string, double> diagnostics;

  bool is_graph() const {
    for (std::size_t i = 1; i < samples.size(); ++i)
      if (!(samples[i].x > samples[i - 1].x)) return false;
    return !samples.empty();
  }

  double x_min() const { return samples.front().x; }
  double x_max() const { return samples.back().x; }

  bool arc_length() const { return kind != CurveKind::CatenaryGraph; }

  /// Height, slope and second derivative of a graph curve at abscissa x
  /// (quintic Hermite in x).
  std::array<double, 3> graph_jet(double x) const {
    auto [i, t] = locate(x, [](const CurveSample& c) { return c.x; });
    const auto a = graph_derivs(samples[i]), b = graph_derivs(samples[i + 1]);
    return quintic(t, samples[i + 1].x - samples[i].x, a, b);
  }
  double height_at(double x) const { return graph_jet(x)[0]; }
  double slope_at(double x) const { return graph_jet(x)[1]; }

  /// Point of an arc-length curve at parameter s.
  CurveSample point_at(double s) const {
    if (!arc_length()) throw Error(ErrorKind::InvalidData, "curve is not parametrized by arc length");
    auto [i, t] = locate(s, [](const CurveSample& c) { return c.s; });
    const auto& a = samples[i];
    const auto& b = samples[i + 1];
    const double h = b.s - a.s;
    const auto X = quintic(t, h, {a.x, std::cos(a.theta), -std::sin(a.theta) * a.dtheta},
                           {b.x, std::cos(b.theta), -std::sin(b.theta) * b.dtheta});
    const auto Z = quintic(t, h, {a.z, std::sin(a.theta), std::cos(a.theta) * a.dtheta},
                           {b.z, std::sin(b.theta), std::cos(b.theta) * b.dtheta});
    double th = std::atan2(Z[1], X[1]);
    const double ref = a.theta + t * (b.theta - a.theta);
    while (th - ref > std::numbers::pi) th -= 2 * std::numbers::pi;
    while (ref - th > std::numbers::pi) th += 2 * std::numbers::pi;
    const double sp2 = X[1] * X[1] + Z[1] * Z[1];
    return {s, X[0], Z[0], th, (X[1] * Z[2] - Z[1] * X[2]) / sp2};
  }

  /// Quintic Hermite value and first two derivatives on a cell of width h.
  static std::array<double, 3> quintic(double s, double h, const std::array<double, 3>& a,
                                       const std::array<double, 3>& b) {
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
    const double H[6] = {1 - 10 * s3 + 15 * s4 - 6 * s5, s - 6 * s3 + 8 * s4 - 3 * s5,
                         0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5, 0.5 * s3 - s4 + 0.5 * s5,
                         -4 * s3 + 7 * s4 - 3 * s5, 10 * s3 - 15 * s4 + 6 * s5};
    const double D[6] = {-30 * s2 + 60 * s3 - 30 * s4, 1 - 18 * s2 + 32 * s3 - 15 * s4,
                         s - 4.5 * s2 + 6 * s3 - 2.5 * s4, 1.5 * s2 - 4 * s3 + 2.5 * s4,
                         -12 * s2 + 28 * s3 - 15 * s4, 30 * s2 - 60 * s3 + 30 * s4};
    const double C[6] = {-60 * s + 180 * s2 - 120 * s3, -36 * s + 96 * s2 - 60 * s3,
                         1 - 9 * s + 18 * s2 - 10 * s3, 3 * s - 12 * s2 + 10 * s3,
                         -24 * s + 84 * s2 - 60 * s3, 60 * s - 180 * s2 + 120 * s3};
    auto comb = [&](const double* w) {
      return w[0] * a[0] + w[1] * h * a[1] + w[2] * h * h * a[2] + w[3] * h * h * b[2] + w[4] * h * b[1] +
             w[5] * b[0];
    };
    return {comb(H), comb(D) / h, comb(C) / (h * h)};
  }

 private:
  /// (z, dz/dx, d2z/dx2) at a sample of a graph curve.
  std::array<double, 3> graph_derivs(const CurveSample& c) const {
    const double t = std::tan(c.theta), ct = std::cos(c.theta);
    const double dth_dx = arc_length() ? c.dtheta / ct : c.dtheta;
    return {c.z, t, dth_dx / (ct * ct)};
  }

  template <class Key>
  std::pair<std::size_t, double> locate(double v, Key key) const {
    if (samples.size() < 2) throw Error(ErrorKind::InvalidData, "curve has fewer than two samples");
    if (v < key(samples.front()) || v > key(samples.back()))
      throw Error(ErrorKind::OutOfRange, "parameter outside the sampled range");
    auto it = std::upper_bound(samples.begin(), samples.end(), v,
                               [&](double q, const CurveSample& c) { return q < key(c); });
    std::size_t i = it == samples.begin() ? 0 : static_cast<std::size_t>(it - samples.begin()) - 1;
    i = std::min(i, samples.size() - 2);
    return {i, (v - key(samples[i])) / (key(samples[i + 1]) - key(samples[i]))};
  }
};

}  // namespace phimin
