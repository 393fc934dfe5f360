#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace phimin::geom {

using Point2 = std::array<double, 2>;

/// Sign of the orientation determinant of (a, b, c): +1 counter-clockwise,
/// -1 clockwise, 0 collinear. Floating-point evaluation with an error bound;
/// undecided cases are recomputed exactly with rationals.
inline int orient2d(const Point2& a, const Point2& b, const Point2& c) {
  const double l = (b[0] - a[0]) * (c[1] - a[1]);
  const double r = (b[1] - a[1]) * (c[0] - a[0]);
  const double det = l - r;
  const double bound = 3.3306690738754716e-16 * (std::abs(l) + std::abs(r));
  if (det > bound) return 1;
  if (-det > bound) return -1;
  using Q = boost::multiprecision::cpp_rational;
  const Q ax(a[0]), ay(a[1]), bx(b[0]), by(b[1]), cx(c[0]), cy(c[1]);
  const Q e = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
  return e > 0 ? 1 : (e < 0 ? -1 : 0);
}

inline bool on_segment(const Point2& a, const Point2& b, const Point2& p) {
  return std::min(a[0], b[0]) <= p[0] && p[0] <= std::max(a[0], b[0]) && std::min(a[1], b[1]) <= p[1] &&
         p[1] <= std::max(a[1], b[1]);
}

/// Closed segments [a,b] and [c,d] share at least one point.
inline bool segments_intersect(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  const int o1 = orient2d(a, b, c), o2 = orient2d(a, b, d);
  const int o3 = orient2d(c, d, a), o4 = orient2d(c, d, b);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

/// Number of intersecting pairs of non-adjacent segments of an open polyline.
inline std::size_t count_self_intersections(const std::vector<Point2>& pts) {
  if (pts.size() < 4) return 0;
  const std::size_t m = pts.size() - 1;
  struct Box {
    double x0, x1, y0, y1;
  };
  std::vector<Box> box(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& p = pts[i];
    const auto& q = pts[i + 1];
    box[i] = {std::min(p[0], q[0]), std::max(p[0], q[0]), std::min(p[1], q[1]), std::max(p[1], q[1])};
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return box[a].x0 < box[b].x0; });
  std::size_t count = 0;
  for (std::size_t oi = 0; oi < m; ++oi) {
    const std::size_t i = order[oi];
    for (std::size_t oj = oi + 1; oj < m && box[order[oj]].x0 <= box[i].x1; ++oj) {
      const std::size_t j = order[oj];
      if (std::max(i, j) - std::min(i, j) <= 1) continue;
      if (box[j].y0 > box[i].y1 || box[i].y0 > box[j].y1) continue;
      if (segments_intersect(pts[i], pts[i + 1], pts[j], pts[j + 1])) ++count;
    }
  }
  return count;
}

}  // namespace phimin::geom
