#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "phimin/bjorling.hpp"
#include "phimin/calabi.hpp"
#include "phimin/error.hpp"
#include "phimin/geometry.hpp"
#include "phimin/profile_curve.hpp"
#include "phimin/weierstrass.hpp"

namespace phimin::io {

using json = nlohmann::json;

/// 17 significant digits, lowercase scientific; "nan", "inf", "-inf".
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

inline double parse_number(const std::string& s) {
  if (s == "nan") return kNaN;
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw Error(ErrorKind::InvalidData, "not a number: " + s);
  return v;
}

/// Numbers that JSON cannot hold (nan, inf) become strings.
inline json num(double v) { return std::isfinite(v) ? json(v) : json(fmt(v)); }

inline double num_of(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_number(j.get<std::string>());
  if (j.is_null()) return kNaN;
  throw Error(ErrorKind::InvalidData, "expected a number in metadata");
}

inline json to_json(const ProfileSpec& s) {
  json j;
  j["kind"] = to_string(s.kind);
  j["params"] = json::array();
  for (double p : s.params) j["params"].push_back(num(p));
  j["domain"] = {num(s.domain.lo), num(s.domain.hi)};
  if (s.base) j["base"] = to_json(*s.base);
  return j;
}

inline ProfileSpec spec_from_json(const json& j) {
  ProfileSpec s;
  const auto kind = profile_kind_from_string(j.at("kind").get<std::string>());
  if (!kind) throw Error(ErrorKind::InvalidData, "unknown profile kind in metadata");
  s.kind = *kind;
  for (const auto& p : j.at("params")) s.params.push_back(num_of(p));
  s.domain = {num_of(j.at("domain").at(0)), num_of(j.at("domain").at(1))};
  if (j.contains("base")) s.base = std::make_shared<ProfileSpec>(spec_from_json(j.at("base")));
  return s;
}

inline json to_json(const TransformReport& r) {
  return {{"potential_discrepancy", num(r.potential_discrepancy)},
          {"equation_residual", num(r.equation_residual)},
          {"gauss_map_error", num(r.gauss_map_error)},
          {"conformal_error", num(r.conformal_error)},
          {"mean_curvature_error", num(r.mean_curvature_error)},
          {"gauss_curvature_error", num(r.gauss_curvature_error)},
          {"min_w", num(r.min_w)},
          {"max_slope", num(r.max_slope)}};
}

inline json to_json(const RepresentationReport& r) {
  return {{"path_discrepancy", num(r.path_discrepancy)},
          {"conformal_error", num(r.conformal_error)},
          {"gauss_map_error", num(r.gauss_map_error)},
          {"decomposition_error", num(r.decomposition_error)},
          {"isotropy_error", num(r.isotropy_error)},
          {"mean_curvature_residual", num(r.mean_curvature_residual)},
          {"min_guard", num(r.min_guard)}};
}

inline json to_json(const RealSeries& s) {
  json j{{"basis", to_string(s.basis)}, {"param", num(s.param)}, {"a", json::array()}, {"b", json::array()}};
  for (double v : s.a) j["a"].push_back(num(v));
  for (double v : s.b) j["b"].push_back(num(v));
  return j;
}

inline RealSeries series_from_json(const json& j) {
  RealSeries s;
  const auto b = j.at("basis").get<std::string>();
  if (b == "taylor") s.basis = SeriesBasis::Taylor;
  else if (b == "fourier") s.basis = SeriesBasis::Fourier;
  else throw Error(ErrorKind::InvalidData, "unknown series basis " + b);
  s.param = num_of(j.at("param"));
  for (const auto& v : j.at("a")) s.a.push_back(num_of(v));
  if (j.contains("b"))
    for (const auto& v : j.at("b")) s.b.push_back(num_of(v));
  return s;
}

inline json to_json(const BjorlingData& d) {
  json j{{"degree", d.degree}, {"beta", json::array()}, {"V", json::array()}};
  for (int c = 0; c < 3; ++c) {
    j["beta"].push_back(to_json(d.beta[c]));
    j["V"].push_back(to_json(d.V[c]));
  }
  return j;
}

inline BjorlingData bjorling_from_json(const json& j) {
  BjorlingData d;
  d.degree = j.value("degree", 12);
  if (j.at("beta").size() != 3 || j.at("V").size() != 3)
    throw Error(ErrorKind::InvalidData, "beta and V need three components");
  for (int c = 0; c < 3; ++c) {
    d.beta[c] = series_from_json(j.at("beta").at(c));
    d.V[c] = series_from_json(j.at("V").at(c));
  }
  return d;
}

/// Pretty JSON with sorted keys and a trailing newline.
inline void write_json(const std::string& path, const json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::InvalidParameter, "cannot write " + path);
  f << j.dump(2) << "\n";
}

inline json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::InvalidParameter, "cannot read " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidData, path + ": " + e.what());
  }
}

// ---- CSV -----------------------------------------------------------------

/// Tabular artifact: a "# {json}" metadata line, a header, numeric rows.
struct Table {
  json meta = json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return static_cast<int>(i);
    throw Error(ErrorKind::InvalidData, "missing column " + name);
  }
};

inline std::string to_csv(const Table& t) {
  std::string out = "# " + t.meta.dump() + "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      out += fmt(r[i]);
    }
    out += '\n';
  }
  return out;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::InvalidParameter, "cannot write " + path);
  f << text;
}

inline Table parse_csv(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (!header && t.meta.empty() && line.size() > 2) {
        try {
          t.meta = json::parse(line.substr(1));
        } catch (const json::exception&) {
          throw Error(ErrorKind::InvalidData, "malformed metadata line");
        }
      }
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    if (!header) {
      t.columns = cells;
      header = true;
      continue;
    }
    if (cells.size() != t.columns.size())
      throw Error(ErrorKind::InvalidData, "line " + std::to_string(no) + ": wrong number of fields");
    std::vector<double> r;
    for (const auto& s : cells) r.push_back(parse_number(s));
    t.rows.push_back(std::move(r));
  }
  if (!header) throw Error(ErrorKind::InvalidData, "CSV has no header");
  return t;
}

inline Table read_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::InvalidParameter, "cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_csv(ss.str());
}

/// Graphs as (x, u); other curves as (s, x, z, theta).
inline Table curve_table(const ProfileCurve& c, json meta) {
  Table t;
  meta["artifact"] = "curve";
  meta["curve_kind"] = to_string(c.kind);
  meta["profile"] = to_json(c.profile);
  meta["termination"] = to_string(c.termination);
  t.meta = std::move(meta);
  if (c.kind == CurveKind::CatenaryGraph) {
    t.columns = {"x", "u"};
    for (const auto& s : c.samples) t.rows.push_back({s.x, s.z});
  } else {
    t.columns = {"s", "x", "z", "theta"};
    for (const auto& s : c.samples) t.rows.push_back({s.s, s.x, s.z, s.theta});
  }
  return t;
}

inline Table patch_table(const GraphPatch& p, const ProfileSpec& spec, json meta) {
  Table t;
  meta["artifact"] = "patch";
  meta["signature"] = to_string(p.signature);
  meta["profile"] = to_json(spec);
  meta["nx"] = p.nx();
  meta["ny"] = p.ny();
  t.meta = std::move(meta);
  t.columns = {"x", "y", "u"};
  for (int i = 0; i < p.nx(); ++i)
    for (int j = 0; j < p.ny(); ++j) t.rows.push_back({p.x[i], p.y[j], p.u(i, j)});
  return t;
}

inline Table gauss_table(const GaussField& f, json meta) {
  Table t;
  meta["artifact"] = "gauss-field";
  meta["k"] = num(f.k);
  meta["nu"] = f.nu();
  meta["nv"] = f.nv();
  t.meta = std::move(meta);
  t.columns = {"u", "v", "re_g", "im_g"};
  for (int i = 0; i < f.nu(); ++i)
    for (int j = 0; j < f.nv(); ++j) t.rows.push_back({f.u[i], f.v[j], f.G(i, j).real(), f.G(i, j).imag()});
  return t;
}

namespace detail {

/// Distinct grid values of a row-major (i outer, j inner) grid table.
inline std::pair<std::vector<double>, std::vector<double>> grid_axes(const Table& t, int ca, int cb) {
  if (t.rows.empty()) throw Error(ErrorKind::InvalidData, "empty grid");
  std::vector<double> b;
  for (const auto& r : t.rows) {
    if (!b.empty() && r[ca] != t.rows.front()[ca]) break;
    b.push_back(r[cb]);
  }
  if (t.rows.size() % b.size() != 0) throw Error(ErrorKind::InvalidData, "grid rows are not rectangular");
  std::vector<double> a;
  for (std::size_t i = 0; i < t.rows.size(); i += b.size()) a.push_back(t.rows[i][ca]);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      const auto& r = t.rows[i * b.size() + j];
      if (r[ca] != a[i] || r[cb] != b[j]) throw Error(ErrorKind::InvalidData, "grid rows are not in grid order");
    }
  return {a, b};
}

}  // namespace detail

inline GraphPatch patch_from_table(const Table& t) {
  const int cx = t.column("x"), cy = t.column("y"), cu = t.column("u");
  GraphPatch p;
  std::tie(p.x, p.y) = detail::grid_axes(t, cx, cy);
  p.u.resize(p.nx(), p.ny());
  for (int i = 0; i < p.nx(); ++i)
    for (int j = 0; j < p.ny(); ++j) p.u(i, j) = t.rows[static_cast<std::size_t>(i) * p.ny() + j][cu];
  const std::string sig = t.meta.value("signature", "euclidean");
  if (sig != "euclidean" && sig != "lorentzian") throw Error(ErrorKind::InvalidData, "unknown signature " + sig);
  p.signature = sig == "euclidean" ? Signature::Euclidean : Signature::Lorentzian;
  p.validate();
  return p;
}

inline GaussField gauss_from_table(const Table& t) {
  const int cu = t.column("u"), cv = t.column("v"), cr = t.column("re_g"), ci = t.column("im_g");
  GaussField f;
  std::tie(f.u, f.v) = detail::grid_axes(t, cu, cv);
  f.G.resize(f.nu(), f.nv());
  for (int i = 0; i < f.nu(); ++i)
    for (int j = 0; j < f.nv(); ++j) {
      const auto& r = t.rows[static_cast<std::size_t>(i) * f.nv() + j];
      f.G(i, j) = cplx(r[cr], r[ci]);
    }
  f.k = t.meta.contains("k") ? num_of(t.meta.at("k")) : 1.0;
  f.validate();
  return f;
}

// ---- meshes --------------------------------------------------------------

inline std::string to_obj(const SurfaceMesh& m, const json& meta) {
  std::string out = "# " + meta.dump() + "\n";
  out += "# signature " + std::string(to_string(m.signature)) + "\n";
  for (const auto& v : m.vertices) out += "v " + fmt(v.x()) + " " + fmt(v.y()) + " " + fmt(v.z()) + "\n";
  for (const auto& n : m.normals) out += "vn " + fmt(n.x()) + " " + fmt(n.y()) + " " + fmt(n.z()) + "\n";
  const bool with_n = m.normals.size() == m.vertices.size();
  for (const auto& f : m.faces) {
    out += "f";
    for (int v : f) out += " " + std::to_string(v + 1) + (with_n ? "//" + std::to_string(v + 1) : "");
    out += "\n";
  }
  return out;
}

inline std::string to_ply(const SurfaceMesh& m, const json& meta) {
  const bool with_n = m.normals.size() == m.vertices.size();
  std::string out = "ply\nformat ascii 1.0\n";
  out += "comment " + meta.dump() + "\n";
  out += "comment signature " + std::string(to_string(m.signature)) + "\n";
  out += "element vertex " + std::to_string(m.vertices.size()) + "\n";
  out += "property double x\nproperty double y\nproperty double z\n";
  if (with_n) out += "property double nx\nproperty double ny\nproperty double nz\n";
  out += "element face " + std::to_string(m.faces.size()) + "\n";
  out += "property list uchar int vertex_indices\nend_header\n";
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    const auto& v = m.vertices[i];
    out += fmt(v.x()) + " " + fmt(v.y()) + " " + fmt(v.z());
    if (with_n) out += " " + fmt(m.normals[i].x()) + " " + fmt(m.normals[i].y()) + " " + fmt(m.normals[i].z());
    out += "\n";
  }
  for (const auto& f : m.faces)
    out += "3 " + std::to_string(f[0]) + " " + std::to_string(f[1]) + " " + std::to_string(f[2]) + "\n";
  return out;
}

/// Vertex positions as CSV (x, y, z) followed by nothing else; faces are
/// implicit in the grid metadata.
inline Table mesh_table(const SurfaceMesh& m, json meta) {
  Table t;
  meta["artifact"] = "mesh-vertices";
  meta["signature"] = to_string(m.signature);
  t.meta = std::move(meta);
  t.columns = {"x", "y", "z"};
  for (const auto& v : m.vertices) t.rows.push_back({v.x(), v.y(), v.z()});
  return t;
}

enum class MeshFormat { Obj, Ply, Csv };

inline MeshFormat mesh_format(const std::string& s) {
  if (s == "obj") return MeshFormat::Obj;
  if (s == "ply") return MeshFormat::Ply;
  if (s == "csv") return MeshFormat::Csv;
  throw Error(ErrorKind::InvalidParameter, "unknown format " + s + " (obj, ply or csv)");
}

inline const char* extension(MeshFormat f) {
  switch (f) {
    case MeshFormat::Obj: return ".obj";
    case MeshFormat::Ply: return ".ply";
    case MeshFormat::Csv: return ".csv";
  }
  return "";
}

/// Writes `stem` + extension; returns the file name.
inline std::string write_mesh(const std::string& dir, const std::string& stem, const SurfaceMesh& m, MeshFormat f,
                              json meta) {
  meta["artifact"] = "mesh";
  const std::string name = stem + extension(f);
  const std::string path = dir + "/" + name;
  switch (f) {
    case MeshFormat::Obj: write_text(path, to_obj(m, meta)); break;
    case MeshFormat::Ply: write_text(path, to_ply(m, meta)); break;
    case MeshFormat::Csv: write_text(path, to_csv(mesh_table(m, meta))); break;
  }
  return name;
}

inline json error_report(const Error& e, const std::string& command, const std::string& hash) {
  return {{"status", "error"},
          {"command", command},
          {"config_hash", hash},
          {"kind", to_string(e.kind())},
          {"validation", is_validation_error(e.kind())},
          {"message", e.what()},
          {"estimate", num(e.estimate())}};
}

}  // namespace phimin::io
