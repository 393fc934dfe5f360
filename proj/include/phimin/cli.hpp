#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "phimin/bjorling.hpp"
#include "phimin/calabi.hpp"
#include "phimin/config.hpp"
#include "phimin/io.hpp"
#include "phimin/profile_solvers.hpp"
#include "phimin/surface_builder.hpp"
#include "phimin/weierstrass.hpp"

namespace phimin::cli {

using io::json;

/// Everything a command needs: settings, output directory, format.
struct Context {
  std::string command;
  RunConfig config;
  std::string out = ".";

  std::string hash() const { return config.hash(); }
  json meta() const { return {{"command", command}, {"config_hash", hash()}}; }
  std::string path(const std::string& name) const { return out + "/" + name; }
  io::MeshFormat format() const { return io::mesh_format(config.str("format", "obj")); }
  double tol(double fallback) const { return config.positive("tol", fallback); }
  std::pair<int, int> grid(std::pair<int, int> fallback) const { return config.grid("grid", fallback); }
  int count(const std::string& key, int fallback, int min = 3) const {
    const int n = config.integer(key, fallback);
    if (n < min) throw Error(ErrorKind::InvalidParameter, key + " must be at least " + std::to_string(min));
    return n;
  }

  void write_table(const std::string& name, const io::Table& t) const { io::write_text(path(name), io::to_csv(t)); }
  void write_report(const std::string& name, json body) const {
    body["command"] = command;
    body["config_hash"] = hash();
    body["status"] = body.value("status", "ok");
    io::write_json(path(name), body);
  }
};

namespace detail {

inline double default_start(const WeightProfile& p, double preferred = 0.0) {
  if (p.domain().contains(preferred)) return preferred;
  return 1.0;
}

/// Largest |value| over interior entries excluding `margin` rings.
inline double interior_max(const Eigen::MatrixXd& r, int margin) {
  double m = 0.0;
  for (int i = margin; i < r.rows() - margin; ++i)
    for (int j = margin; j < r.cols() - margin; ++j)
      if (!std::isnan(r(i, j))) m = std::max(m, std::abs(r(i, j)));
  return m;
}

/// Max |H - phi'(z) N3| at vertices with radius (distance to the z axis)
/// at least r_min.
inline double mesh_residual(const SurfaceMesh& m, const WeightProfile& p, double r_min = 0.0) {
  const auto r = mean_curvature_residual(m, p);
  double out = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (!std::isnan(r[i]) && std::hypot(m.vertices[i].x(), m.vertices[i].y()) >= r_min)
      out = std::max(out, std::abs(r[i]));
  return out;
}

inline SurfaceMesh merge(const SurfaceMesh& a, const SurfaceMesh& b) {
  SurfaceMesh m = a;
  const int off = static_cast<int>(a.size());
  m.vertices.insert(m.vertices.end(), b.vertices.begin(), b.vertices.end());
  m.normals.insert(m.normals.end(), b.normals.begin(), b.normals.end());
  m.params.insert(m.params.end(), b.params.begin(), b.params.end());
  m.skip.insert(m.skip.end(), b.skip.begin(), b.skip.end());
  for (auto f : b.faces) m.faces.push_back({f[0] + off, f[1] + off, f[2] + off});
  return m;
}

/// Half-width of the catenary sampling window: a fraction of Lambda when
/// finite.
inline double catenary_extent(const RunConfig& c, const WeightProfile& p, double u0, double fraction = 0.92) {
  if (c.has("x_max")) return c.positive("x_max", 1.0);
  const auto lam = compute_lambda(p, u0);
  return lam.finite ? fraction * lam.lambda_u0 : 5.0;
}

/// Apex height used for the k-family bowls: 0 for k = 1, else 1.
inline double default_start_for_family(double k) { return k == 1.0 ? 0.0 : 1.0; }

}  // namespace detail

// ---- commands ------------------------------------------------------------

inline int cmd_profile(const Context& ctx) {
  const auto& c = ctx.config;
  const WeightProfile p = c.profile();
  const double u0 = c.num("u0", detail::default_start(p));
  const double tol = ctx.tol(1e-10);
  const double x_max = detail::catenary_extent(c, p, u0, 0.85);
  const int n = ctx.count("n", 4001);
  const ProfileCurve raw = solve_catenary(p, u0, x_max * 1.001 + 1e-9, tol);
  const ProfileCurve curve = resample_graph(raw, -x_max, x_max, n);
  json meta = ctx.meta();
  meta["u0"] = u0;
  ctx.write_table("profile.csv", io::curve_table(curve, meta));
  const auto lam = compute_lambda(p, u0);
  ctx.write_report("profile.json", {{"u0", u0},
                                    {"x_max", io::num(x_max)},
                                    {"samples", n},
                                    {"lambda", io::num(lam.lambda_u0)},
                                    {"lambda_finite", lam.finite},
                                    {"first_integral_drift", io::num(first_integral_drift(raw, p))},
                                    {"termination", to_string(raw.termination)},
                                    {"profile", io::to_json(p.spec())}});
  return 0;
}

inline int cmd_lambda(const Context& ctx) {
  const auto& c = ctx.config;
  const WeightProfile p = c.profile();
  const double u0 = c.num("u0", detail::default_start(p));
  const auto r = compute_lambda(p, u0, ctx.tol(1e-10));
  json fitted = json::object();
  for (const auto& [k, v] : r.fitted_constants) fitted[k] = io::num(v);
  ctx.write_report("lambda.json", {{"u0", u0},
                                   {"lambda", io::num(r.lambda_u0)},
                                   {"finite", r.finite},
                                   {"fitted_constants", fitted},
                                   {"profile", io::to_json(p.spec())}});
  return 0;
}

inline int cmd_bowl(const Context& ctx) {
  const auto& c = ctx.config;
  const WeightProfile p = c.profile();
  const double z0 = c.num("z0", detail::default_start(p));
  const double s_max = c.positive("s_max", 5.0);
  const double tol = ctx.tol(1e-10);
  const auto [ns, nt] = ctx.grid({201, 96});
  const ProfileCurve curve = solve_bowl(p, z0, s_max, tol);
  const double s_end = curve.samples.back().s;
  json meta = ctx.meta();
  meta["z0"] = z0;
  ctx.write_table("bowl_curve.csv", io::curve_table(curve, meta));
  const SurfaceMesh mesh = revolve(resample_arclength(curve, 0.0, s_end, ns), nt);
  const std::string mesh_name = io::write_mesh(ctx.out, "bowl", mesh, ctx.format(), meta);
  json diag = json::object();
  for (const auto& [k, v] : curve.diagnostics) diag[k] = io::num(v);
  ctx.write_report("bowl.json", {{"z0", z0},
                                 {"s_end", s_end},
                                 {"termination", to_string(curve.termination)},
                                 {"diagnostics", diag},
                                 {"max_mean_curvature_residual", detail::mesh_residual(mesh, p, 0.5)},
                                 {"mesh", mesh_name},
                                 {"profile", io::to_json(p.spec())}});
  return 0;
}

inline int cmd_catenoid(const Context& ctx) {
  const auto& c = ctx.config;
  const WeightProfile p = c.profile();
  const double x0 = c.positive("x0", 1.0);
  const double z0 = c.num("z0", detail::default_start(p));
  const double s_max = c.positive("s_max", 6.0);
  const double tol = ctx.tol(1e-10);
  const auto [ns, nt] = ctx.grid({201, 96});
  const auto [right, left] = solve_catenoid(p, x0, z0, s_max, tol);
  json meta = ctx.meta();
  meta["x0"] = x0;
  meta["z0"] = z0;
  ctx.write_table("catenoid_right.csv", io::curve_table(right, meta));
  ctx.write_table("catenoid_left.csv", io::curve_table(left, meta));
  const SurfaceMesh mesh =
      detail::merge(revolve(resample_arclength(right, 0.0, right.samples.back().s, ns), nt),
                    revolve(resample_arclength(left, 0.0, left.samples.back().s, ns), nt));
  const std::string mesh_name = io::write_mesh(ctx.out, "catenoid", mesh, ctx.format(), meta);
  json diag = json::object();
  for (const auto& [k, v] : right.diagnostics) diag[k] = io::num(v);
  ctx.write_report("catenoid.json", {{"x0", x0},
                                     {"z0", z0},
                                     {"diagnostics", diag},
                                     {"mesh", mesh_name},
                                     {"profile", io::to_json(p.spec())}});
  return 0;
}

inline int cmd_tilt(const Context& ctx) {
  const auto& c = ctx.config;
  const WeightProfile p = c.profile();
  const double u0 = c.num("u0", detail::default_start(p));
  const double angle = c.num("angle", std::numbers::pi / 4);
  const double tol = ctx.tol(1e-10);
  const double x_max = detail::catenary_extent(c, p, u0);
  const double h = c.positive("h", 1e-2);
  const int nx = std::max(3, static_cast<int>(std::lround(2.0 * x_max / h)) + 1);
  const double y_half = c.positive("y_half", 0.5);
  const int ny = std::max(3, static_cast<int>(std::lround(2.0 * y_half / h)) + 1);
  const ProfileCurve raw = solve_catenary(p, u0, x_max * 1.001 + 1e-9, tol);
  const ProfileCurve curve = resample_graph(raw, -x_max, x_max, nx);
  const SurfaceMesh mesh =
      angle == 0.0 ? extrude_cylinder(curve, {-y_half, y_half}, ny) : tilt_cylinder(curve, angle, {-y_half, y_half}, ny);
  json meta = ctx.meta();
  meta["angle"] = angle;
  const std::string mesh_name = io::write_mesh(ctx.out, "tilt", mesh, ctx.format(), meta);
  ctx.write_report("tilt.json", {{"angle", angle},
                                 {"u0", u0},
                                 {"h", h},
                                 {"max_mean_curvature_residual", detail::mesh_residual(mesh, p)},
                                 {"mesh", mesh_name},
                                 {"profile", io::to_json(p.spec())}});
  return 0;
}

namespace detail {

/// Source patch for the transform commands: a CSV given by `input`, or a
/// catenary cylinder / rotational bowl sampled on a square.
inline std::pair<GraphPatch, WeightProfile> source_patch(const Context& ctx) {
  const auto& c = ctx.config;
  if (c.has("input")) {
    const io::Table t = io::read_csv(c.str("input", ""));
    if (t.meta.value("artifact", "") != "patch") throw Error(ErrorKind::InvalidData, "input is not a patch artifact");
    return {io::patch_from_table(t), make_profile(io::spec_from_json(t.meta.at("profile")))};
  }
  const WeightProfile p = c.profile();
  const std::string src = c.str("source", "catenary");
  const double tol = ctx.tol(1e-10);
  if (src == "catenary") {
    const double u0 = c.num("u0", default_start(p));
    const double L = c.positive("extent", 1.2);
    const auto [nx, ny] = ctx.grid({121, 121});
    const ProfileCurve curve = solve_catenary(p, u0, L * 1.001, tol);
    return {cylinder_patch(curve, -L, L, nx, -L, L, ny), p};
  }
  if (src == "bowl") {
    const double z0 = c.num("z0", default_start(p));
    const double L = c.positive("extent", 1.0);
    const auto [nx, ny] = ctx.grid({101, 101});
    const ProfileCurve curve = solve_bowl(p, z0, L * std::numbers::sqrt2 * 1.5 + 0.1, tol);
    return {rotational_patch(curve, -L, L, nx, -L, L, ny), p};
  }
  throw Error(ErrorKind::InvalidParameter, "unknown source " + src + " (catenary or bowl)");
}

inline TransformOptions transform_options(const RunConfig& c) {
  TransformOptions o;
  o.nx = c.integer("out_nx", 0);
  o.ny = c.integer("out_ny", 0);
  o.fold_eps = c.positive("fold_eps", o.fold_eps);
  o.integrability_tol = c.positive("integrability_tol", o.integrability_tol);
  if (c.has("theta_base")) o.theta_base = c.num("theta_base", 0.0);
  return o;
}

inline double patch_residual(const GraphPatch& patch, const WeightProfile& p, int margin = 2) {
  return interior_max(patch.signature == Signature::Euclidean ? fe_residual(patch, p) : lfe_residual_unchecked(patch, p),
                      margin);
}

/// Sup |a - b| over the nodes of `a` inside the grid of `b` (b interpolated).
inline std::pair<double, int> common_difference(const GraphPatch& a, const GraphPatch& b) {
  double d = 0.0;
  int n = 0;
  for (int i = 0; i < a.nx(); ++i)
    for (int j = 0; j < a.ny(); ++j) {
      const double x = a.x[i], y = a.y[j];
      if (x < b.x.front() || x > b.x.back() || y < b.y.front() || y > b.y.back()) continue;
      d = std::max(d, std::abs(a.u(i, j) - interpolate(b.x, b.y, b.u, x, y)));
      ++n;
    }
  return {d, n};
}

}  // namespace detail

inline int cmd_calabi_to_l3(const Context& ctx) {
  auto [src, p] = detail::source_patch(ctx);
  if (src.signature != Signature::Euclidean) throw Error(ErrorKind::InvalidData, "calabi-to-l3 needs a Euclidean patch");
  const TransformResult r = to_lorentz(src, p, detail::transform_options(ctx.config));
  json meta = ctx.meta();
  ctx.write_table("source.csv", io::patch_table(src, p.spec(), meta));
  meta["source"] = "source.csv";
  ctx.write_table("lorentz.csv", io::patch_table(r.patch, r.profile.spec(), meta));
  const std::string mesh_name = io::write_mesh(ctx.out, "lorentz", patch_mesh(r.patch), ctx.format(), meta);
  ctx.write_report("calabi-to-l3.json", {{"report", io::to_json(r.report)},
                                         {"source_h", src.hx()},
                                         {"output_h", r.patch.hx()},
                                         {"output_extent", {r.patch.x.front(), r.patch.x.back(), r.patch.y.front(), r.patch.y.back()}},
                                         {"input_profile", io::to_json(p.spec())},
                                         {"output_profile", io::to_json(r.profile.spec())},
                                         {"mesh", mesh_name}});
  return 0;
}

inline int cmd_calabi_to_r3(const Context& ctx) {
  const auto& c = ctx.config;
  const std::string input = c.str("input", "");
  io::Table t;
  GraphPatch src;
  std::optional<WeightProfile> prof;
  json meta = ctx.meta();
  if (!input.empty()) {
    t = io::read_csv(input);
    if (t.meta.value("artifact", "") != "patch") throw Error(ErrorKind::InvalidData, "input is not a patch artifact");
    src = io::patch_from_table(t);
    prof = make_profile(io::spec_from_json(t.meta.at("profile")));
  } else if (c.str("source", "") == "lorentz-grim-reaper") {
    // -log cosh x, translating for the weight w on the Lorentzian side
    const double L = c.positive("extent", 1.5);
    const auto [nx, ny] = ctx.grid({121, 121});
    src = sample_graph([](double x, double) { return -std::log(std::cosh(x)); }, -L, L, nx, -L, L, ny,
                       Signature::Lorentzian);
    prof = make_builtin(ProfileKind::Linear, {1.0});
    ctx.write_table("source.csv", io::patch_table(src, prof->spec(), meta));
  } else {
    throw Error(ErrorKind::InvalidParameter,
                "calabi-to-r3 needs input = <lorentzian patch csv> or source = lorentz-grim-reaper");
  }
  if (src.signature != Signature::Lorentzian) throw Error(ErrorKind::InvalidData, "calabi-to-r3 needs a Lorentzian patch");
  const WeightProfile& p = *prof;
  const TransformResult r = from_lorentz(src, p, detail::transform_options(c));
  ctx.write_table("euclidean.csv", io::patch_table(r.patch, r.profile.spec(), meta));
  const std::string mesh_name = io::write_mesh(ctx.out, "euclidean", patch_mesh(r.patch), ctx.format(), meta);
  json body{{"report", io::to_json(r.report)},
            {"input_profile", io::to_json(p.spec())},
            {"output_profile", io::to_json(r.profile.spec())},
            {"output_h", r.patch.hx()},
            {"mesh", mesh_name}};
  std::string ref = c.str("reference", "");
  if (ref.empty() && !input.empty() && t.meta.contains("source"))
    ref = (std::filesystem::path(input).parent_path() / t.meta.at("source").get<std::string>()).string();
  if (!ref.empty()) {
    const GraphPatch orig = io::patch_from_table(io::read_csv(ref));
    const auto [d, n] = detail::common_difference(r.patch, orig);
    const double h = orig.hx();
    body["round_trip"] = {{"reference", std::filesystem::path(ref).filename().string()},
                          {"sup_difference", io::num(d)},
                          {"common_nodes", n},
                          {"reference_h", h},
                          {"bound", 10.0 * h},
                          {"pass", n > 0 && d <= 10.0 * h}};
  }
  ctx.write_report("calabi-to-r3.json", body);
  return 0;
}

inline int cmd_weierstrass(const Context& ctx) {
  const auto& c = ctx.config;
  const double tol = ctx.tol(1e-10);
  GaussField field;
  std::vector<Vec3> reference;
  RepresentationOptions opt;
  opt.path_tol = c.positive("path_tol", opt.path_tol);
  if (c.has("input")) {
    field = io::gauss_from_table(io::read_csv(c.str("input", "")));
  } else {
    const double k = c.num("k", 1.0);
    const WeightProfile p = family_profile(k);
    const std::string src = c.str("source", "catenary");
    const auto [nu, nv] = ctx.grid({201, 201});
    ConformalSample cs;
    if (src == "catenary") {
      const double u0 = c.num("u0", detail::default_start(p));
      const double L = c.positive("extent", 1.0);
      const double x_max = detail::catenary_extent(c, p, u0);
      const ProfileCurve curve = solve_catenary(p, u0, x_max, tol);
      cs = cylinder_gauss_field(curve, {-L, L}, nu, {-L, L}, nv, k);
    } else if (src == "bowl") {
      const double z0 = c.num("z0", detail::default_start_for_family(k));
      const double s_lo = c.positive("s_lo", 0.5), s_hi = c.positive("s_hi", 2.5);
      const ProfileCurve curve = solve_bowl(p, z0, s_hi + 0.5, tol);
      cs = rotational_gauss_field(curve, {s_lo, s_hi}, nu, {-1.0, 1.0}, nv, k);
    } else {
      throw Error(ErrorKind::InvalidParameter, "unknown source " + src + " (catenary or bowl)");
    }
    field = cs.field;
    reference = cs.positions;
    if (k != 1.0) {
      const int bi = field.nu() / 2, bj = field.nv() / 2;
      opt.base = cplx(field.u[bi], field.v[bj]);
      opt.pin = reference[static_cast<std::size_t>(bi) * field.nv() + bj];
    }
  }
  const Representation rep = integrate_representation(field, opt);
  json meta = ctx.meta();
  ctx.write_table("gauss.csv", io::gauss_table(field, meta));
  const std::string mesh_name = io::write_mesh(ctx.out, "weierstrass", rep.mesh, ctx.format(), meta);
  json body{{"report", io::to_json(rep.report)},
            {"k", io::num(field.k)},
            {"pde_residual", io::num(max_abs(gauss_pde_residual(field)))},
            {"h", std::max(field.hu(), field.hv())},
            {"mesh", mesh_name}};
  if (!reference.empty()) body["reference_distance"] = io::num(translated_distance(rep.mesh.vertices, reference));
  ctx.write_report("weierstrass.json", body);
  return 0;
}

inline int cmd_bjorling(const Context& ctx) {
  const auto& c = ctx.config;
  const double k = c.num("k", 1.0);
  const int degree = ctx.count("degree", 12, 1);
  const double hw = c.positive("halfwidth", 0.1);
  const WeightProfile p = family_profile(k);
  const std::string kind = c.str("data", "circle");
  BjorlingData data;
  std::optional<SurfaceMesh> reference;
  const auto [ns, nv] = ctx.grid({201, 201});
  if (kind == "circle") {
    const double r0 = c.positive("r0", 1.0);
    const double apex = c.num("apex", detail::default_start_for_family(k));
    const ProfileCurve bowl = solve_bowl(p, apex, r0 + 1.0 + 2.0 * hw * r0, ctx.tol(1e-10));
    const double z0 = c.num("z0", bowl.height_at(r0));
    const double theta = c.num("theta", std::atan(bowl.slope_at(r0)));
    data = circle_data(r0, z0, theta, degree);
  } else if (kind == "line") {
    data = line_data(c.num("z0", k == 1.0 ? 0.0 : 1.0), c.num("alpha", 0.5), degree);
  } else if (kind == "file") {
    data = io::bjorling_from_json(io::read_json(c.str("data_file", "")));
    data.degree = degree;
  } else {
    throw Error(ErrorKind::InvalidParameter, "unknown data " + kind + " (circle, line or file)");
  }
  BjorlingOptions bo;
  bo.ns = ns;
  bo.nv = nv;
  bo.tol = c.positive("residual_tol", bo.tol);
  if (c.has("s_lo")) bo.s_lo = c.num("s_lo", 0.0);
  if (c.has("s_hi")) bo.s_hi = c.num("s_hi", 0.0);
  const BjorlingSolution sol = solve_bjorling(data, k, hw, bo);
  const Representation rep = bjorling_surface(sol);
  json meta = ctx.meta();
  ctx.write_table("gauss.csv", io::gauss_table(sol.field, meta));
  const std::string mesh_name = io::write_mesh(ctx.out, "bjorling", rep.mesh, ctx.format(), meta);
  json doc = io::to_json(data);
  doc["k"] = io::num(k);
  doc["config_hash"] = ctx.hash();
  doc["field_coefficients"] = json::array();
  for (const auto& gn : sol.coefficients) {
    json row = json::array();
    for (const auto& z : gn) row.push_back({io::num(z.real()), io::num(z.imag())});
    doc["field_coefficients"].push_back(row);
  }
  doc["field_abscissae"] = sol.field.u;
  io::write_json(ctx.path("bjorling_data.json"), doc);
  json body{{"report", io::to_json(rep.report)},
            {"k", io::num(k)},
            {"degree", degree},
            {"halfwidth", hw},
            {"pde_residual", io::num(sol.pde_residual)},
            {"initial_gap", io::num(sol.initial_gap)},
            {"series_tail", io::num(sol.tail)},
            {"mesh", mesh_name}};
  if (kind == "circle") {
    // distance of every vertex to the rotational bowl through the same circle
    const double apex = c.num("apex", detail::default_start_for_family(k));
    const ProfileCurve bowl = solve_bowl(p, apex, c.positive("r0", 1.0) + 1.0 + 2.0 * hw, ctx.tol(1e-10));
    double d = 0.0;
    for (const auto& v : rep.mesh.vertices) {
      const double r = std::hypot(v.x(), v.y());
      if (r <= bowl.x_max()) d = std::max(d, std::abs(v.z() - bowl.height_at(r)));
      else d = kInf;
    }
    body["bowl_distance"] = io::num(d);
  }
  ctx.write_report("bjorling.json", body);
  return 0;
}

// ---- verify --------------------------------------------------------------

namespace detail {

/// Relative residual of u'' = phi'(u)(1 + u'^2) on a sampled graph.
inline double catenary_residual(const io::Table& t, const WeightProfile& p) {
  const int cx = t.column("x"), cu = t.column("u");
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < t.rows.size(); ++i) {
    const double x0 = t.rows[i - 1][cx], x1 = t.rows[i][cx], x2 = t.rows[i + 1][cx];
    const double u0 = t.rows[i - 1][cu], u1 = t.rows[i][cu], u2 = t.rows[i + 1][cu];
    const double h0 = x1 - x0, h1 = x2 - x1;
    if (!(h0 > 0) || !(h1 > 0)) throw Error(ErrorKind::InvalidData, "abscissae are not increasing");
    const double d1 = (u2 - u1) / h1 * h0 / (h0 + h1) + (u1 - u0) / h0 * h1 / (h0 + h1);
    const double d2 = 2.0 * ((u2 - u1) / h1 - (u1 - u0) / h0) / (h0 + h1);
    const double rhs = p.dphi(u1) * (1.0 + d1 * d1);
    worst = std::max(worst, std::abs(d2 - rhs) / (std::abs(d2) + std::abs(rhs) + 1e-300));
    if (std::isnan(d2 - rhs)) return kInf;
  }
  return worst;
}

/// Relative residual of theta' = phi'(z) cos(theta) - sin(theta) / x along
/// an arc-length curve, with x' = cos(theta), z' = sin(theta). Samples on
/// the axis are skipped.
inline double rotational_residual(const io::Table& t, const WeightProfile& p) {
  const int cs = t.column("s"), cx = t.column("x"), cz = t.column("z"), ct = t.column("theta");
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < t.rows.size(); ++i) {
    const auto &a = t.rows[i - 1], &b = t.rows[i], &c = t.rows[i + 1];
    if (b[cx] < 1e-2) continue;
    const double h = c[cs] - a[cs];
    if (!(h > 0)) throw Error(ErrorKind::InvalidData, "arc length is not increasing");
    const double th = b[ct];
    const double dth = (c[ct] - a[ct]) / h, dx = (c[cx] - a[cx]) / h, dz = (c[cz] - a[cz]) / h;
    const double rhs = p.dphi(b[cz]) * std::cos(th) - std::sin(th) / b[cx];
    const double r1 = std::abs(dth - rhs) / (std::abs(dth) + std::abs(rhs) + 1.0);
    const double r2 = std::max(std::abs(dx - std::cos(th)), std::abs(dz - std::sin(th)));
    const double r = std::max(r1, r2);
    if (std::isnan(r)) return kInf;
    worst = std::max(worst, r);
  }
  return worst;
}

}  // namespace detail

/// Recomputes the residual oracles of a CSV artifact (curve, patch or
/// Gauss field) and writes verify.json. Returns 1 when a residual exceeds
/// its threshold.
inline int cmd_verify(const Context& ctx) {
  const auto& c = ctx.config;
  if (!c.has("input")) throw Error(ErrorKind::InvalidParameter, "verify needs an input artifact");
  const std::string input = c.str("input", "");
  const io::Table t = io::read_csv(input);
  const std::string artifact = t.meta.value("artifact", "");
  json body{{"input", std::filesystem::path(input).filename().string()}, {"artifact", artifact}};
  if (t.meta.contains("config_hash")) body["artifact_hash"] = t.meta.at("config_hash");
  double residual = kNaN, threshold = kNaN;
  std::string oracle;
  if (artifact == "curve") {
    const WeightProfile p = make_profile(io::spec_from_json(t.meta.at("profile")));
    if (t.meta.value("curve_kind", "") == "catenary") {
      oracle = "catenary-equation";
      residual = detail::catenary_residual(t, p);
      threshold = ctx.tol(1e-3);
    } else {
      oracle = "rotational-equation";
      residual = detail::rotational_residual(t, p);
      threshold = ctx.tol(1e-2);
    }
  } else if (artifact == "patch") {
    const GraphPatch patch = io::patch_from_table(t);
    const WeightProfile p = make_profile(io::spec_from_json(t.meta.at("profile")));
    oracle = patch.signature == Signature::Euclidean ? "graph-equation" : "lorentzian-graph-equation";
    if (patch.signature == Signature::Lorentzian) {
      const double slope = detail::interior_max(
          [&] {
            Eigen::MatrixXd s = Eigen::MatrixXd::Zero(patch.nx(), patch.ny());
            for (int i = 1; i + 1 < patch.nx(); ++i)
              for (int j = 1; j + 1 < patch.ny(); ++j) {
                const auto d = central_jet(patch, i, j);
                s(i, j) = std::hypot(d.ux, d.uy);
              }
            return s;
          }(),
          1);
      body["max_slope"] = io::num(slope);
      body["spacelike"] = slope < 1.0;
    }
    residual = detail::patch_residual(patch, p);
    threshold = ctx.tol(1e-2);
    if (patch.signature == Signature::Lorentzian && !body["spacelike"].get<bool>()) residual = kInf;
  } else if (artifact == "gauss-field") {
    const GaussField f = io::gauss_from_table(t);
    oracle = "gauss-map-equation";
    residual = max_abs(gauss_pde_residual(f));
    threshold = ctx.tol(1e-4);
  } else {
    throw Error(ErrorKind::InvalidData, "cannot verify artifact type '" + artifact + "'");
  }
  const bool pass = residual <= threshold;
  body["oracle"] = oracle;
  body["max_residual"] = io::num(residual);
  body["threshold"] = io::num(threshold);
  body["pass"] = pass;
  body["status"] = pass ? "ok" : "failed";
  ctx.write_report("verify.json", body);
  return pass ? 0 : 1;
}

// ---- gallery -------------------------------------------------------------

struct Preset {
  std::string name;
  std::string description;
  std::string command;
  std::map<std::string, std::string> settings;
};

inline std::vector<Preset> gallery_presets() {
  return {
      {"grim-reaper", "catenary cylinder, phi' = 1", "tilt",
       {{"profile.kind", "linear"}, {"profile.params", "1"}, {"u0", "0"}, {"angle", "0"}, {"h", "0.02"}}},
      {"catenary-power-minus2", "catenary cylinder, phi' = 1/u^2", "tilt",
       {{"profile.kind", "power"}, {"profile.params", "-2"}, {"u0", "1"}, {"angle", "0"}, {"h", "0.02"}}},
      {"tilted-grim-reaper", "tilted catenary cylinder, phi' = 1", "tilt",
       {{"profile.kind", "linear"}, {"profile.params", "1"}, {"u0", "0"}, {"angle", "0.7853981633974483"}, {"h", "0.02"}}},
      {"tilted-power-minus3", "tilted catenary cylinder, phi' = 1/u^3", "tilt",
       {{"profile.kind", "power"}, {"profile.params", "-3"}, {"u0", "1"}, {"angle", "0.7853981633974483"}, {"h", "0.02"}}},
      {"bowl-exp-inverse", "bowl, phi' = exp(-1/u)", "bowl",
       {{"profile.kind", "exp-inverse"}, {"z0", "1"}, {"s_max", "6"}}},
      {"bowl-power-2", "bowl, phi' = u^2", "bowl", {{"profile.kind", "power"}, {"profile.params", "2"}, {"z0", "1"}, {"s_max", "3"}}},
      {"catenoid-exp-inverse", "winglike catenoid, phi' = exp(-1/u)", "catenoid",
       {{"profile.kind", "exp-inverse"}, {"x0", "1"}, {"z0", "1"}, {"s_max", "8"}}},
      {"calabi-grim-reaper", "grim reaper and its Lorentzian image", "calabi-to-l3",
       {{"profile.kind", "linear"}, {"profile.params", "1"}, {"source", "catenary"}, {"extent", "1.2"}, {"grid", "121x121"}}},
      {"calabi-bowl", "bowl soliton and its Lorentzian image", "calabi-to-l3",
       {{"profile.kind", "linear"}, {"profile.params", "1"}, {"source", "bowl"}, {"z0", "0"}, {"extent", "1"}, {"grid", "101x101"}}},
      {"calabi-lorentz-grim-reaper", "Lorentzian grim reaper and its Euclidean image", "calabi-to-r3",
       {{"source", "lorentz-grim-reaper"}, {"extent", "1.5"}, {"grid", "121x121"}}},
  };
}

int run(const std::string& command, RunConfig config, const std::string& out_dir);

inline int cmd_gallery(const Context& ctx) {
  json index = json::array();
  int worst = 0;
  for (const auto& pr : gallery_presets()) {
    RunConfig c;
    for (const auto& [k, v] : pr.settings) c.set(k, v);
    c.set("format", ctx.config.str("format", "obj"));
    const std::string dir = ctx.path(pr.name);
    const int code = run(pr.command, c, dir);
    worst = std::max(worst, code);
    json settings = json::object();
    for (const auto& [k, v] : pr.settings) settings[k] = v;
    index.push_back({{"name", pr.name},
                     {"description", pr.description},
                     {"command", pr.command},
                     {"settings", settings},
                     {"config_hash", c.hash()},
                     {"exit_code", code}});
  }
  ctx.write_report("gallery.json", {{"presets", index}, {"status", worst == 0 ? "ok" : "failed"}});
  return worst;
}

// ---- dispatch ------------------------------------------------------------

inline const std::map<std::string, std::function<int(const Context&)>>& commands() {
  static const std::map<std::string, std::function<int(const Context&)>> table{
      {"profile", cmd_profile},       {"lambda", cmd_lambda},           {"bowl", cmd_bowl},
      {"catenoid", cmd_catenoid},     {"tilt", cmd_tilt},               {"calabi-to-l3", cmd_calabi_to_l3},
      {"calabi-to-r3", cmd_calabi_to_r3}, {"weierstrass", cmd_weierstrass}, {"bjorling", cmd_bjorling},
      {"verify", cmd_verify},         {"gallery", cmd_gallery},
  };
  return table;
}

/// Runs one command. Exit status: 0 ok, 1 validation failure (or a failed
/// verification), 2 numerical failure. Errors are written to error.json.
inline int run(const std::string& command, RunConfig config, const std::string& out_dir) {
  Context ctx{command, std::move(config), out_dir};
  ctx.config.set("command", command);
  try {
    std::filesystem::create_directories(out_dir);
    auto it = commands().find(command);
    if (it == commands().end()) throw Error(ErrorKind::InvalidParameter, "unknown command " + command);
    return it->second(ctx);
  } catch (const Error& e) {
    const int code = is_validation_error(e.kind()) ? 1 : 2;
    try {
      io::write_json(ctx.path("error.json"), io::error_report(e, command, ctx.hash()));
    } catch (const std::exception&) {
    }
    std::cerr << "phimin " << command << ": " << e.what() << "\n";
    return code;
  } catch (const nlohmann::json::exception& e) {
    const Error wrapped(ErrorKind::InvalidData, e.what());
    try {
      io::write_json(ctx.path("error.json"), io::error_report(wrapped, command, ctx.hash()));
    } catch (const std::exception&) {
    }
    std::cerr << "phimin " << command << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    const Error wrapped(ErrorKind::NonFinite, e.what());
    try {
      io::write_json(ctx.path("error.json"), io::error_report(wrapped, command, ctx.hash()));
    } catch (const std::exception&) {
    }
    std::cerr << "phimin " << command << ": " << e.what() << "\n";
    return 2;
  }
}

}  // namespace phimin::cli
