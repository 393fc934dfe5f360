#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "phimin/error.hpp"
#include "phimin/geometry.hpp"
#include "phimin/parallel.hpp"
#include "phimin/profile_curve.hpp"
#include "phimin/weight_profile.hpp"

namespace phimin {

/// Graph curve with n samples at uniform abscissae in [x_lo, x_hi].
inline ProfileCurve resample_graph(const ProfileCurve& c, double x_lo, double x_hi, int n) {
  if (!c.is_graph()) throw Error(ErrorKind::InvalidData, "curve is not a graph");
  if (n < 2 || !(x_hi > x_lo)) throw Error(ErrorKind::DegenerateRange, "empty resampling range");
  ProfileCurve out = c;
  out.samples.clear();
  for (double x : linspace(x_lo, x_hi, n)) {
    const auto j = c.graph_jet(x);
    const double th = std::atan(j[1]), ct = std::cos(th);
    const double dth_dx = j[2] * ct * ct;
    if (c.arc_length())
      out.samples.push_back({kNaN, x, j[0], th, dth_dx * ct});
    else
      out.samples.push_back({x, x, j[0], th, dth_dx});
  }
  if (c.arc_length()) {
    // Arc length is not tracked through resampling in x.
    double s = 0.0;
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
      if (i > 0) s += std::hypot(out.samples[i].x - out.samples[i - 1].x, out.samples[i].z - out.samples[i - 1].z);
      out.samples[i].s = s;
    }
  }
  return out;
}

/// Arc-length curve with n samples at uniform s in [s_lo, s_hi].
inline ProfileCurve resample_arclength(const ProfileCurve& c, double s_lo, double s_hi, int n) {
  if (n < 2 || !(s_hi > s_lo)) throw Error(ErrorKind::DegenerateRange, "empty resampling range");
  ProfileCurve out = c;
  out.samples.clear();
  for (double s : linspace(s_lo, s_hi, n)) out.samples.push_back(c.point_at(s));
  return out;
}

namespace detail {

/// Quads of a structured rows x cols vertex grid split along alternating
/// diagonals; `wrap` closes the column direction.
inline void grid_faces(SurfaceMesh& m, int rows, int cols, bool wrap, int offset = 0) {
  const int cmax = wrap ? cols : cols - 1;
  for (int i = 0; i + 1 < rows; ++i)
    for (int j = 0; j < cmax; ++j) {
      const int j1 = (j + 1) % cols;
      const int a = offset + i * cols + j, b = offset + (i + 1) * cols + j;
      const int c = offset + (i + 1) * cols + j1, d = offset + i * cols + j1;
      if ((i + j) % 2 == 0) {
        m.faces.push_back({a, b, c});
        m.faces.push_back({a, c, d});
      } else {
        m.faces.push_back({a, b, d});
        m.faces.push_back({b, c, d});
      }
    }
}

}  // namespace detail

/// The cylinder {(x, y, u(x))} over the curve samples and ny values of y.
/// Normals point downwards: (u', 0, -1) / W.
inline SurfaceMesh extrude_cylinder(const ProfileCurve& curve, Interval y_range, int ny) {
  if (!curve.is_graph()) throw Error(ErrorKind::InvalidData, "extrusion needs a graph curve");
  if (ny < 2 || !(y_range.hi > y_range.lo) || !y_range.finite())
    throw Error(ErrorKind::DegenerateRange, "extrusion needs ny >= 2 and a bounded nonempty y range");
  if (curve.samples.size() < 2) throw Error(ErrorKind::DegenerateRange, "curve has fewer than two samples");
  SurfaceMesh m;
  const auto ys = linspace(y_range.lo, y_range.hi, ny);
  for (const auto& s : curve.samples) {
    const double up = std::tan(s.theta), w = std::sqrt(1.0 + up * up);
    for (double y : ys) {
      m.vertices.emplace_back(s.x, y, s.z);
      m.normals.emplace_back(up / w, 0.0, -1.0 / w);
      m.params.emplace_back(s.x, y);
    }
  }
  detail::grid_faces(m, static_cast<int>(curve.samples.size()), ny, false);
  m.skip.assign(m.size(), 0);
  return m;
}

/// Surface of revolution (x cos t, x sin t, z) with the inner normal
/// (-z' cos t, -z' sin t, x'). A sample on the axis becomes one fan vertex;
/// it and its first ring are excluded from curvature diagnostics.
inline SurfaceMesh revolve(const ProfileCurve& curve, int nt) {
  if (nt < 3) throw Error(ErrorKind::DegenerateRange, "revolution needs nt >= 3");
  if (curve.samples.size() < 2) throw Error(ErrorKind::DegenerateRange, "curve has fewer than two samples");
  for (const auto& s : curve.samples)
    if (s.x < 0.0) throw Error(ErrorKind::InvalidParameter, "negative radius in the generating curve");
  SurfaceMesh m;
  std::size_t first = 0;
  const bool fan = curve.samples.front().x == 0.0;
  if (fan) {
    const auto& s = curve.samples.front();
    m.vertices.emplace_back(0.0, 0.0, s.z);
    m.normals.emplace_back(-std::sin(s.theta), 0.0, std::cos(s.theta));
    m.params.emplace_back(s.s, 0.0);
    first = 1;
  }
  const int off = fan ? 1 : 0;
  for (std::size_t i = first; i < curve.samples.size(); ++i) {
    const auto& s = curve.samples[i];
    for (int k = 0; k < nt; ++k) {
      const double t = 2.0 * std::numbers::pi * k / nt, ct = std::cos(t), st = std::sin(t);
      m.vertices.emplace_back(s.x * ct, s.x * st, s.z);
      m.normals.emplace_back(-std::sin(s.theta) * ct, -std::sin(s.theta) * st, std::cos(s.theta));
      m.params.emplace_back(s.s, t);
    }
  }
  if (fan)
    for (int k = 0; k < nt; ++k) m.faces.push_back({0, off + k, off + (k + 1) % nt});
  detail::grid_faces(m, static_cast<int>(curve.samples.size() - first), nt, true, off);
  m.skip.assign(m.size(), 0);
  if (fan)
    for (int k = 0; k <= nt; ++k) m.skip[k] = 1;  // fan vertex and its ring
  return m;
}

/// Rotation about the x axis by theta followed by dilation 1/cos(theta):
/// (x, y, z) -> (x / c, y - tan(theta) z, z + tan(theta) y).
inline SurfaceMesh tilt_mesh(const SurfaceMesh& in, double theta) {
  if (!(theta >= 0.0 && theta < std::numbers::pi / 2))
    throw Error(ErrorKind::OutOfRange, "tilt angle must lie in [0, pi/2)");
  const double c = std::cos(theta), s = std::sin(theta), t = std::tan(theta);
  SurfaceMesh m = in;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const Vec3& p = in.vertices[i];
    m.vertices[i] = Vec3(p.x() / c, p.y() - t * p.z(), p.z() + t * p.y());
    const Vec3& n = in.normals[i];
    const Vec3 e1(1.0, 0.0, 0.0);
    m.normals[i] = c * n + (1.0 - c) * n.x() * e1 + s * e1.cross(n);
  }
  return m;
}

/// Tilted catenary cylinder over y_range.
inline SurfaceMesh tilt_cylinder(const ProfileCurve& curve, double theta, Interval y_range = {-0.5, 0.5}, int ny = 101) {
  if (!(theta > 0.0 && theta < std::numbers::pi / 2)) throw Error(ErrorKind::OutOfRange, "tilt angle must lie in (0, pi/2)");
  if (curve.kind != CurveKind::CatenaryGraph) throw Error(ErrorKind::InvalidData, "tilt needs a catenary curve");
  return tilt_mesh(extrude_cylinder(curve, y_range, ny), theta);
}

/// Residual of the Euclidean graph equation at interior nodes (NaN on the
/// boundary).
inline Eigen::MatrixXd fe_residual(const GraphPatch& patch, const WeightProfile& p) {
  patch.validate();
  if (patch.signature != Signature::Euclidean) throw Error(ErrorKind::InvalidData, "fe_residual needs a Euclidean patch");
  Eigen::MatrixXd r = Eigen::MatrixXd::Constant(patch.nx(), patch.ny(), kNaN);
  for (int i = 1; i + 1 < patch.nx(); ++i)
    for (int j = 1; j + 1 < patch.ny(); ++j) {
      const Jet2 d = central_jet(patch, i, j);
      const double w2 = 1.0 + d.ux * d.ux + d.uy * d.uy;
      r(i, j) = (1 + d.ux * d.ux) * d.uyy + (1 + d.uy * d.uy) * d.uxx - 2 * d.ux * d.uy * d.uxy -
                p.dphi(patch.u(i, j)) * w2;
    }
  return r;
}

/// Lorentzian graph residual without the spacelike precondition (for
/// diagnostics of invalid input).
inline Eigen::MatrixXd lfe_residual_unchecked(const GraphPatch& patch, const WeightProfile& p) {
  patch.validate();
  Eigen::MatrixXd r = Eigen::MatrixXd::Constant(patch.nx(), patch.ny(), kNaN);
  for (int i = 1; i + 1 < patch.nx(); ++i)
    for (int j = 1; j + 1 < patch.ny(); ++j) {
      const Jet2 d = central_jet(patch, i, j);
      const double w2 = 1.0 - d.ux * d.ux - d.uy * d.uy;
      r(i, j) = (1 - d.ux * d.ux) * d.uyy + (1 - d.uy * d.uy) * d.uxx + 2 * d.ux * d.uy * d.uxy +
                p.dphi(patch.u(i, j)) * w2;
    }
  return r;
}

/// Largest |grad u| over interior nodes (central differences).
inline double max_slope(const GraphPatch& patch) {
  double m = 0.0;
  for (int i = 1; i + 1 < patch.nx(); ++i)
    for (int j = 1; j + 1 < patch.ny(); ++j) {
      const Jet2 d = central_jet(patch, i, j);
      m = std::max(m, std::hypot(d.ux, d.uy));
    }
  return m;
}

inline Eigen::MatrixXd lfe_residual(const GraphPatch& patch, const WeightProfile& p) {
  patch.validate();
  if (patch.signature != Signature::Lorentzian) throw Error(ErrorKind::InvalidData, "lfe_residual needs a Lorentzian patch");
  for (int i = 1; i + 1 < patch.nx(); ++i)
    for (int j = 1; j + 1 < patch.ny(); ++j) {
      const Jet2 d = central_jet(patch, i, j);
      if (!(d.ux * d.ux + d.uy * d.uy < 1.0))
        throw Error(ErrorKind::SpacelikeViolation,
                    "graph is not spacelike at (" + std::to_string(patch.x[i]) + ", " + std::to_string(patch.y[j]) + ")");
    }
  return lfe_residual_unchecked(patch, p);
}

namespace detail {

struct CotanData {
  std::vector<Vec3> laplacian;  ///< discrete Laplace-Beltrami of the position
  std::vector<double> area;
  std::vector<char> boundary;
};

inline CotanData cotan_laplacian(const SurfaceMesh& m) {
  m.validate();
  CotanData d;
  d.boundary = m.boundary_vertices();
  const std::size_t n = m.size();
  d.laplacian.assign(n, Vec3::Zero());
  d.area.assign(n, 0.0);
  for (const auto& f : m.faces) {
    const Vec3* P[3] = {&m.vertices[f[0]], &m.vertices[f[1]], &m.vertices[f[2]]};
    const double tri = 0.5 * (*P[1] - *P[0]).cross(*P[2] - *P[0]).norm();
    if (!(tri > 0.0)) continue;
    double cot[3];
    for (int k = 0; k < 3; ++k) {
      const Vec3 a = *P[(k + 1) % 3] - *P[k], b = *P[(k + 2) % 3] - *P[k];
      cot[k] = a.dot(b) / a.cross(b).norm();
    }
    for (int k = 0; k < 3; ++k) {
      const int i = f[(k + 1) % 3], j = f[(k + 2) % 3];
      const Vec3 e = m.vertices[j] - m.vertices[i];
      d.laplacian[i] += cot[k] * e;
      d.laplacian[j] -= cot[k] * e;
    }
    // Mixed Voronoi areas.
    const bool obtuse = cot[0] < 0 || cot[1] < 0 || cot[2] < 0;
    for (int k = 0; k < 3; ++k) {
      if (!obtuse) {
        const Vec3 a = *P[(k + 1) % 3] - *P[k], b = *P[(k + 2) % 3] - *P[k];
        d.area[f[k]] += (a.squaredNorm() * cot[(k + 2) % 3] + b.squaredNorm() * cot[(k + 1) % 3]) / 8.0;
      } else {
        d.area[f[k]] += cot[k] < 0 ? tri / 2.0 : tri / 4.0;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    d.laplacian[i] = d.area[i] > 0.0 ? Vec3(d.laplacian[i] / (2.0 * d.area[i])) : Vec3::Constant(kNaN);
  return d;
}

}  // namespace detail

/// Signed mean curvature <Delta psi, N> (sum of principal curvatures) per
/// vertex, NaN on the boundary and at skipped vertices.
inline std::vector<double> mean_curvature(const SurfaceMesh& m) {
  const auto d = detail::cotan_laplacian(m);
  std::vector<double> h(m.size(), kNaN);
  for (std::size_t i = 0; i < m.size(); ++i)
    if (!d.boundary[i] && !(i < m.skip.size() && m.skip[i])) h[i] = d.laplacian[i].dot(m.normals[i]);
  return h;
}

/// H - phi'(z) <N, e3> per vertex.
inline std::vector<double> mean_curvature_residual(const SurfaceMesh& m, const WeightProfile& p) {
  if (m.signature != Signature::Euclidean) throw Error(ErrorKind::InvalidData, "mean curvature residual needs a Euclidean mesh");
  auto h = mean_curvature(m);
  for (std::size_t i = 0; i < m.size(); ++i)
    if (!std::isnan(h[i])) h[i] -= p.dphi(m.vertices[i].z()) * m.normals[i].z();
  return h;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v)
    if (!std::isnan(x)) m = std::max(m, std::abs(x));
  return m;
}

inline double max_abs(const Eigen::MatrixXd& v) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!std::isnan(v(i))) m = std::max(m, std::abs(v(i)));
  return m;
}

struct ShapeOperatorNorms {
  std::vector<double> norm;   ///< |S|
  std::vector<double> ratio;  ///< |S| / phi'(z)
  double max_ratio = 0.0;
  double max_norm = 0.0;
};

/// |S| from a local quadric fit over the two-ring of each interior vertex.
inline ShapeOperatorNorms second_fundamental_norm(const SurfaceMesh& m, const WeightProfile& p) {
  m.validate();
  const auto bd = m.boundary_vertices();
  std::vector<std::vector<int>> nb(m.size());
  for (const auto& f : m.faces)
    for (int k = 0; k < 3; ++k) {
      nb[f[k]].push_back(f[(k + 1) % 3]);
      nb[f[k]].push_back(f[(k + 2) % 3]);
    }
  for (auto& v : nb) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  ShapeOperatorNorms out;
  out.norm.assign(m.size(), kNaN);
  out.ratio.assign(m.size(), kNaN);
  parallel_for(m.size(), [&](std::size_t i) {
    if (bd[i] || (i < m.skip.size() && m.skip[i])) return;
    std::vector<int> ring = nb[i];
    for (int j : nb[i]) ring.insert(ring.end(), nb[j].begin(), nb[j].end());
    std::sort(ring.begin(), ring.end());
    ring.erase(std::unique(ring.begin(), ring.end()), ring.end());
    const Vec3 n = m.normals[i].normalized();
    Vec3 t1 = (std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY()).cross(n).normalized();
    Vec3 t2 = n.cross(t1);
    Eigen::MatrixXd A(ring.size(), 5);
    Eigen::VectorXd b(ring.size());
    int r = 0;
    for (int j : ring) {
      if (j == static_cast<int>(i)) continue;
      const Vec3 q = m.vertices[j] - m.vertices[i];
      const double x = q.dot(t1), y = q.dot(t2);
      A.row(r) << x * x, x * y, y * y, x, y;
      b(r) = q.dot(n);
      ++r;
    }
    if (r < 5) return;
    const Eigen::VectorXd c = A.topRows(r).colPivHouseholderQr().solve(b.head(r));
    const Eigen::Vector2d g(c(3), c(4));
    Eigen::Matrix2d hess;
    hess << 2 * c(0), c(1), c(1), 2 * c(2);
    const Eigen::Matrix2d S =
        (Eigen::Matrix2d::Identity() + g * g.transpose()).inverse() * hess / std::sqrt(1.0 + g.squaredNorm());
    out.norm[i] = std::sqrt(std::abs((S * S).trace()));
    out.ratio[i] = out.norm[i] / p.dphi(m.vertices[i].z());
  });
  out.max_norm = max_abs(out.norm);
  out.max_ratio = max_abs(out.ratio);
  return out;
}

/// Height field of a cylinder u(x) over a grid.
inline GraphPatch cylinder_patch(const ProfileCurve& curve, double x0, double x1, int nx, double y0, double y1, int ny) {
  return sample_graph([&](double x, double) { return curve.height_at(x); }, x0, x1, nx, y0, y1, ny);
}

/// Height field of a rotational graph u(r) over a grid.
inline GraphPatch rotational_patch(const ProfileCurve& curve, double x0, double x1, int nx, double y0, double y1, int ny) {
  if (!curve.is_graph() || curve.samples.front().x != 0.0)
    throw Error(ErrorKind::InvalidData, "rotational patch needs a graph curve starting on the axis");
  return sample_graph([&](double x, double y) { return curve.height_at(std::hypot(x, y)); }, x0, x1, nx, y0, y1, ny);
}

/// Triangulated graph patch with downward (Euclidean) or future-pointing
/// timelike (Lorentzian) unit normals from central differences.
inline SurfaceMesh patch_mesh(const GraphPatch& patch) {
  patch.validate();
  SurfaceMesh m;
  m.signature = patch.signature;
  const int nx = patch.nx(), ny = patch.ny();
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const int i0 = std::max(i - 1, 0), i1 = std::min(i + 1, nx - 1);
      const int j0 = std::max(j - 1, 0), j1 = std::min(j + 1, ny - 1);
      const double ux = (patch.u(i1, j) - patch.u(i0, j)) / (patch.x[i1] - patch.x[i0]);
      const double uy = (patch.u(i, j1) - patch.u(i, j0)) / (patch.y[j1] - patch.y[j0]);
      m.vertices.emplace_back(patch.x[i], patch.y[j], patch.u(i, j));
      m.params.emplace_back(patch.x[i], patch.y[j]);
      if (patch.signature == Signature::Euclidean) {
        const double w = std::sqrt(1 + ux * ux + uy * uy);
        m.normals.emplace_back(ux / w, uy / w, -1.0 / w);
      } else {
        const double w2 = 1 - ux * ux - uy * uy;
        if (!(w2 > 0.0)) throw Error(ErrorKind::SpacelikeViolation, "graph is not spacelike");
        const double w = std::sqrt(w2);
        m.normals.emplace_back(ux / w, uy / w, 1.0 / w);
      }
    }
  detail::grid_faces(m, nx, ny, false);
  m.skip.assign(m.size(), 0);
  return m;
}

}  // namespace phimin
