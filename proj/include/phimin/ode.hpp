#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "phimin/error.hpp"

namespace phimin::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double max_dt = 0.05;
  double initial_dt = 1e-4;
  double min_dt = 1e-16;
  long max_steps = 5'000'000;
};

enum class Status { Reached, Stopped, StepUnderflow, StepLimit, NonFinite };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Reached: return "reached";
    case Status::Stopped: return "stopped";
    case Status::StepUnderflow: return "step-underflow";
    case Status::StepLimit: return "step-limit";
    case Status::NonFinite: return "non-finite";
  }
  return "unknown";
}

/// Accepted steps of an integration with derivatives, for cubic Hermite
/// dense output.
template <std::size_t N>
struct Trajectory {
  std::vector<double> t;
  std::vector<State<N>> y;
  std::vector<State<N>> dy;
  Status status = Status::Reached;

  std::size_t size() const { return t.size(); }

  std::size_t cell(double tt) const {
    auto it = std::upper_bound(t.begin(), t.end(), tt);
    std::size_t i = it == t.begin() ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
    return std::min(i, t.size() - 2);
  }

  State<N> at(double tt) const {
    if (t.size() == 1) return y.front();
    const std::size_t i = cell(tt);
    const double h = t[i + 1] - t[i], s = (tt - t[i]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    State<N> out{};
    for (std::size_t k = 0; k < N; ++k)
      out[k] = h00 * y[i][k] + h10 * h * dy[i][k] + h01 * y[i + 1][k] + h11 * h * dy[i + 1][k];
    return out;
  }
};

/// Adaptive Dormand-Prince 5(4) from t0 towards t1 (t1 > t0). Every accepted
/// step is recorded. `stop(t, y, dy)` is evaluated after each accepted step;
/// returning true ends the run with Status::Stopped (the step is kept).
template <std::size_t N, class Rhs, class Stop>
Trajectory<N> integrate(Rhs&& rhs, State<N> y, double t0, double t1, const Options& opt, Stop&& stop) {
  namespace odeint = boost::numeric::odeint;
  using Stepper = odeint::runge_kutta_dopri5<State<N>>;
  auto ctrl = odeint::make_controlled(opt.abs_tol, opt.rel_tol, opt.max_dt, Stepper());
  auto sys = [&](const State<N>& x, State<N>& dx, double t) { rhs(x, dx, t); };

  Trajectory<N> tr;
  State<N> dy{};
  rhs(y, dy, t0);
  tr.t.push_back(t0);
  tr.y.push_back(y);
  tr.dy.push_back(dy);

  double t = t0;
  double dt = std::min(opt.initial_dt, t1 - t0);
  long steps = 0;
  while (t < t1) {
    if (++steps > opt.max_steps) {
      tr.status = Status::StepLimit;
      return tr;
    }
    const bool last = t + dt >= t1;
    if (last) dt = t1 - t;
    const State<N> y_prev = y, dy_prev = dy;
    const double t_prev = t;
    const auto res = ctrl.try_step(sys, y, dy, t, dt);
    if (res == odeint::fail) {
      if (dt < opt.min_dt) {
        tr.status = Status::StepUnderflow;
        return tr;
      }
      continue;
    }
    bool finite = std::isfinite(t);
    for (std::size_t k = 0; k < N; ++k) finite = finite && std::isfinite(y[k]) && std::isfinite(dy[k]);
    if (!finite) {
      y = y_prev;
      dy = dy_prev;
      t = t_prev;
      dt *= 0.25;
      if (dt < opt.min_dt) {
        tr.status = Status::NonFinite;
        return tr;
      }
      continue;
    }
    if (last) t = t1;
    tr.t.push_back(t);
    tr.y.push_back(y);
    tr.dy.push_back(dy);
    if (stop(t, y, dy)) {
      tr.status = Status::Stopped;
      return tr;
    }
  }
  tr.status = Status::Reached;
  return tr;
}

template <std::size_t N, class Rhs>
Trajectory<N> integrate(Rhs&& rhs, State<N> y, double t0, double t1, const Options& opt) {
  return integrate<N>(rhs, y, t0, t1, opt, [](double, const State<N>&, const State<N>&) { return false; });
}

/// State at t1 starting from (t0, y), integrated without recording.
template <std::size_t N, class Rhs>
State<N> advance(Rhs&& rhs, State<N> y, double t0, double t1, const Options& opt) {
  if (t1 == t0) return y;
  if (t1 < t0) {
    auto back = [&](const State<N>& x, State<N>& dx, double t) {
      rhs(x, dx, -t);
      for (auto& v : dx) v = -v;
    };
    auto tr = integrate<N>(back, y, -t0, -t1, opt);
    if (tr.status != Status::Reached) throw Error(ErrorKind::NonFinite, "backward advance failed");
    return tr.y.back();
  }
  auto tr = integrate<N>(rhs, y, t0, t1, opt);
  if (tr.status != Status::Reached) throw Error(ErrorKind::NonFinite, "advance failed");
  return tr.y.back();
}

}  // namespace phimin::ode
