#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "phimin/error.hpp"

namespace phimin {

using Vec3 = Eigen::Vector3d;

enum class Signature { Euclidean, Lorentzian };

inline const char* to_string(Signature s) { return s == Signature::Euclidean ? "euclidean" : "lorentzian"; }

/// Triangle mesh with per-vertex normals. When the mesh comes from a
/// parametrization, `params` holds the parameter of each vertex.
struct SurfaceMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<Vec3> normals;
  Signature signature = Signature::Euclidean;
  std::vector<Eigen::Vector2d> params;
  std::vector<char> skip;  ///< vertices excluded from curvature diagnostics

  std::size_t size() const { return vertices.size(); }

  /// Lorentzian inner product when the signature asks for it.
  double dot(const Vec3& a, const Vec3& b) const {
    return signature == Signature::Euclidean ? a.dot(b) : a.x() * b.x() + a.y() * b.y() - a.z() * b.z();
  }

  void validate() const {
    const int n = static_cast<int>(vertices.size());
    for (const auto& f : faces)
      for (int v : f)
        if (v < 0 || v >= n) throw Error(ErrorKind::InvalidData, "face index out of range");
    if (normals.size() != vertices.size()) throw Error(ErrorKind::InvalidData, "one normal per vertex expected");
    for (const auto& nv : normals) {
      const double q = dot(nv, nv);
      const double want = signature == Signature::Euclidean ? 1.0 : -1.0;
      if (!(std::abs(q - want) < 1e-9)) throw Error(ErrorKind::InvalidData, "normals are not unit");
    }
  }

  /// Boundary flags; throws NonManifold if an edge has more than two faces.
  std::vector<char> boundary_vertices() const {
    std::map<std::pair<int, int>, int> edges;
    for (const auto& f : faces)
      for (int k = 0; k < 3; ++k) {
        int a = f[k], b = f[(k + 1) % 3];
        if (a > b) std::swap(a, b);
        ++edges[{a, b}];
      }
    std::vector<char> bd(vertices.size(), 0);
    for (const auto& [e, c] : edges) {
      if (c > 2) throw Error(ErrorKind::NonManifold, "edge shared by more than two faces");
      if (c == 1) bd[e.first] = bd[e.second] = 1;
    }
    return bd;
  }

  /// V - E + F.
  long euler_characteristic() const {
    std::map<std::pair<int, int>, int> edges;
    for (const auto& f : faces)
      for (int k = 0; k < 3; ++k) {
        int a = f[k], b = f[(k + 1) % 3];
        if (a > b) std::swap(a, b);
        ++edges[{a, b}];
      }
    return static_cast<long>(vertices.size()) - static_cast<long>(edges.size()) + static_cast<long>(faces.size());
  }
};

/// Heights u(x_i, y_j) on a uniform rectangular grid; u(i, j) with i along x.
struct GraphPatch {
  std::vector<double> x, y;
  Eigen::MatrixXd u;
  Signature signature = Signature::Euclidean;

  int nx() const { return static_cast<int>(x.size()); }
  int ny() const { return static_cast<int>(y.size()); }
  double hx() const { return x[1] - x[0]; }
  double hy() const { return y[1] - y[0]; }

  void validate() const {
    if (x.size() < 3 || y.size() < 3) throw Error(ErrorKind::DegenerateRange, "grid needs at least 3 nodes per axis");
    if (u.rows() != nx() || u.cols() != ny()) throw Error(ErrorKind::InvalidData, "height array does not match the grid");
    for (const auto* g : {&x, &y}) {
      const double h = (*g)[1] - (*g)[0];
      if (!(h > 0.0)) throw Error(ErrorKind::DegenerateRange, "grid spacing must be positive");
      for (std::size_t i = 1; i < g->size(); ++i)
        if (std::abs(((*g)[i] - (*g)[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h)) + 1e-12)
          throw Error(ErrorKind::InvalidData, "grid is not uniform");
    }
  }
};

inline std::vector<double> linspace(double a, double b, int n) {
  if (n < 2) throw Error(ErrorKind::DegenerateRange, "need at least two nodes");
  if (!(b > a)) throw Error(ErrorKind::DegenerateRange, "empty range");
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

inline GraphPatch sample_graph(const std::function<double(double, double)>& f, double x0, double x1, int nx,
                               double y0, double y1, int ny, Signature sig = Signature::Euclidean) {
  GraphPatch p;
  p.x = linspace(x0, x1, nx);
  p.y = linspace(y0, y1, ny);
  p.u.resize(nx, ny);
  p.signature = sig;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) p.u(i, j) = f(p.x[i], p.y[j]);
  p.validate();
  return p;
}

/// Central-difference derivatives at an interior node.
struct Jet2 {
  double ux, uy, uxx, uyy, uxy;
};

inline Jet2 central_jet(const GraphPatch& p, int i, int j) {
  const auto& u = p.u;
  const double hx = p.hx(), hy = p.hy();
  return {(u(i + 1, j) - u(i - 1, j)) / (2 * hx), (u(i, j + 1) - u(i, j - 1)) / (2 * hy),
          (u(i + 1, j) - 2 * u(i, j) + u(i - 1, j)) / (hx * hx),
          (u(i, j + 1) - 2 * u(i, j) + u(i, j - 1)) / (hy * hy),
          (u(i + 1, j + 1) - u(i + 1, j - 1) - u(i - 1, j + 1) + u(i - 1, j - 1)) / (4 * hx * hy)};
}

/// Tensor Lagrange interpolation of a grid field (order points per axis,
/// stencil shifted inwards near the boundary).
inline double interpolate(const std::vector<double>& gx, const std::vector<double>& gy, const Eigen::MatrixXd& f,
                          double x, double y, int order = 6) {
  const int nx = static_cast<int>(gx.size()), ny = static_cast<int>(gy.size());
  order = std::min({order, nx, ny});
  auto stencil = [order](const std::vector<double>& g, int n, double t, std::vector<double>& w) {
    const double h = g[1] - g[0];
    const double pos = (t - g[0]) / h;
    int start = static_cast<int>(std::floor(pos)) - (order / 2 - 1);
    start = std::clamp(start, 0, n - order);
    w.assign(order, 1.0);
    for (int a = 0; a < order; ++a)
      for (int b = 0; b < order; ++b)
        if (a != b) w[a] *= (pos - (start + b)) / static_cast<double>(a - b);
    return start;
  };
  std::vector<double> wx, wy;
  const int sx = stencil(gx, nx, x, wx), sy = stencil(gy, ny, y, wy);
  double v = 0.0;
  for (int a = 0; a < order; ++a) {
    double row = 0.0;
    for (int b = 0; b < order; ++b) row += wy[b] * f(sx + a, sy + b);
    v += wx[a] * row;
  }
  return v;
}

namespace detail {

/// d/dx (axis 0) or d/dy (axis 1), fourth order everywhere (second order
/// when the axis has fewer than five nodes).
template <class M>
M grid_diff(const M& f, double h, int axis) {
  const M g = axis == 0 ? f : M(f.transpose());
  const int n = static_cast<int>(g.rows()), m = static_cast<int>(g.cols());
  M d(n, m);
  for (int j = 0; j < m; ++j) {
    auto c = g.col(j);
    if (n < 5) {
      for (int i = 0; i < n; ++i) {
        const int a = std::max(i - 1, 0), b = std::min(i + 1, n - 1);
        d(i, j) = (c(b) - c(a)) / (static_cast<double>(b - a) * h);
      }
      continue;
    }
    for (int i = 2; i + 2 < n; ++i) d(i, j) = (c(i - 2) - 8.0 * c(i - 1) + 8.0 * c(i + 1) - c(i + 2)) / (12.0 * h);
    d(0, j) = (-25.0 * c(0) + 48.0 * c(1) - 36.0 * c(2) + 16.0 * c(3) - 3.0 * c(4)) / (12.0 * h);
    d(1, j) = (-3.0 * c(0) - 10.0 * c(1) + 18.0 * c(2) - 6.0 * c(3) + c(4)) / (12.0 * h);
    d(n - 1, j) = (25.0 * c(n - 1) - 48.0 * c(n - 2) + 36.0 * c(n - 3) - 16.0 * c(n - 4) + 3.0 * c(n - 5)) / (12.0 * h);
    d(n - 2, j) = (3.0 * c(n - 1) + 10.0 * c(n - 2) - 18.0 * c(n - 3) + 6.0 * c(n - 4) - c(n - 5)) / (12.0 * h);
  }
  return axis == 0 ? d : M(d.transpose());
}

/// Cumulative trapezoid with the Euler-Maclaurin end correction.
template <class M>
M cumulative(const M& f, double h, int axis) {
  const M df = grid_diff(f, h, axis);
  M F(f.rows(), f.cols());
  if (axis == 0) {
    for (int j = 0; j < f.cols(); ++j) {
      F(0, j) = 0;
      for (int i = 1; i < f.rows(); ++i) F(i, j) = F(i - 1, j) + 0.5 * h * (f(i - 1, j) + f(i, j));
      for (int i = 1; i < f.rows(); ++i) F(i, j) -= h * h / 12.0 * (df(i, j) - df(0, j));
    }
  } else {
    for (int i = 0; i < f.rows(); ++i) {
      F(i, 0) = 0;
      for (int j = 1; j < f.cols(); ++j) F(i, j) = F(i, j - 1) + 0.5 * h * (f(i, j - 1) + f(i, j));
      for (int j = 1; j < f.cols(); ++j) F(i, j) -= h * h / 12.0 * (df(i, j) - df(i, 0));
    }
  }
  return F;
}

}  // namespace detail

}  // namespace phimin
