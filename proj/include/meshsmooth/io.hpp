#pragma once

// OBJ/OFF mesh reading and writing plus machine-readable smoothing reports
// (JSON or CSV). Coordinates are emitted with 17 significant digits so a
// write/read round trip reproduces every double exactly. OBJ understands only
// `v`/`f` records (anything else is skipped with a warning); faces must have
// 3 or 4 vertices. Flat files read back as 2D meshes unless forced.

#include <json.hpp>

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "meshsmooth/core.hpp"
#include "meshsmooth/smooth_result.hpp"

namespace meshsmooth {

enum class MeshFormat { Obj, Off };
enum class DimMode { Auto, Force2d, Force3d };
enum class ReportFormat { Json, Csv };

inline MeshFormat format_from_path(const std::string& path) {
  const auto dot = path.find_last_of('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == "obj") return MeshFormat::Obj;
  if (ext == "off") return MeshFormat::Off;
  throw std::invalid_argument("cannot infer mesh format from '" + path +
                              "' (expected .obj or .off)");
}

namespace detail {

// 17 significant digits, locale independent: round trips binary64 exactly.
inline std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline bool parse_double(std::string_view tok, double& value) {
  const char* end = tok.data() + tok.size();
  const auto res = std::from_chars(tok.data(), end, value);
  return res.ec == std::errc{} && res.ptr == end;
}

inline bool parse_int(std::string_view tok, int& value) {
  const char* end = tok.data() + tok.size();
  const auto res = std::from_chars(tok.data(), end, value);
  return res.ec == std::errc{} && res.ptr == end;
}

[[noreturn]] inline void parse_fail(const std::string& path, int line, const std::string& msg) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + msg);
}

// Collapses an always-3D parse result to the requested dimensionality. Auto
// mode drops z when every vertex lies in one z = const plane (within 1e-12).
inline Mesh resolve_dim(std::vector<double> xyz, std::vector<Element> elements, DimMode mode) {
  Mesh mesh;
  mesh.elements = std::move(elements);
  const std::size_t n = xyz.size() / 3;
  bool flat = true;
  if (mode == DimMode::Auto) {
    double zmin = 0.0, zmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = xyz[3 * i + 2];
      if (i == 0) zmin = zmax = z;
      zmin = std::min(zmin, z);
      zmax = std::max(zmax, z);
    }
    flat = (zmax - zmin) <= 1e-12;
  }
  if (mode == DimMode::Force3d || (mode == DimMode::Auto && !flat)) {
    mesh.dim = 3;
    mesh.coords = std::move(xyz);
  } else {
    mesh.dim = 2;
    mesh.coords.resize(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      mesh.coords[2 * i + 0] = xyz[3 * i + 0];
      mesh.coords[2 * i + 1] = xyz[3 * i + 1];
    }
  }
  return mesh;
}

inline Mesh read_obj(std::istream& in, const std::string& path, DimMode mode,
                     std::vector<std::string>* warnings) {
  std::vector<double> xyz;
  std::vector<Element> elements;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tokens = split_ws(line);
    if (tokens.empty() || tokens[0][0] == '#') continue;
    if (tokens[0] == "v") {
      if (tokens.size() < 4) parse_fail(path, lineno, "vertex needs 3 coordinates");
      for (int k = 1; k <= 3; ++k) {
        double v = 0.0;
        if (!parse_double(tokens[k], v))
          parse_fail(path, lineno, "bad coordinate '" + std::string(tokens[k]) + "'");
        xyz.push_back(v);
      }
    } else if (tokens[0] == "f") {
      const int arity = static_cast<int>(tokens.size()) - 1;
      if (arity != 3 && arity != 4)
        parse_fail(path, lineno,
                   "face " + std::to_string(elements.size()) + ": unsupported face arity " +
                       std::to_string(arity));
      int ids[4] = {0, 0, 0, 0};
      for (int k = 0; k < arity; ++k) {
        std::string_view tok = tokens[k + 1];
        if (const auto slash = tok.find('/'); slash != std::string_view::npos)
          tok = tok.substr(0, slash);  // vertex part of v/vt/vn references
        int idx = 0;
        if (!parse_int(tok, idx) || idx < 1)
          parse_fail(path, lineno, "bad face index '" + std::string(tokens[k + 1]) + "'");
        ids[k] = idx - 1;
      }
      elements.push_back(arity == 3 ? Element::tri(ids[0], ids[1], ids[2])
                                    : Element::quad(ids[0], ids[1], ids[2], ids[3]));
    } else if (warnings) {
      warnings->push_back(path + ":" + std::to_string(lineno) + ": skipped '" +
                          std::string(tokens[0]) + "' record");
    }
  }
  return resolve_dim(std::move(xyz), std::move(elements), mode);
}

inline Mesh read_off(std::istream& in, const std::string& path, DimMode mode) {
  std::string line;
  int lineno = 0;
  auto next_tokens = [&](const char* what) {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto tokens = split_ws(line);
      if (tokens.empty() || tokens[0][0] == '#') continue;
      return tokens;
    }
    parse_fail(path, lineno, std::string("unexpected end of file, expected ") + what);
  };

  if (const auto header = next_tokens("OFF header"); header[0] != "OFF")
    parse_fail(path, lineno, "missing OFF header");
  const auto counts = next_tokens("vertex/face counts");
  int nv = 0, nf = 0;
  if (counts.size() < 2 || !parse_int(counts[0], nv) || !parse_int(counts[1], nf) || nv < 0 ||
      nf < 0)
    parse_fail(path, lineno, "bad counts line");

  std::vector<double> xyz;
  xyz.reserve(3 * static_cast<std::size_t>(nv));
  for (int i = 0; i < nv; ++i) {
    const auto tokens = next_tokens("vertex line");
    if (tokens.size() < 3) parse_fail(path, lineno, "vertex needs 3 coordinates");
    for (int k = 0; k < 3; ++k) {
      double v = 0.0;
      if (!parse_double(tokens[k], v))
        parse_fail(path, lineno, "bad coordinate '" + std::string(tokens[k]) + "'");
      xyz.push_back(v);
    }
  }
  std::vector<Element> elements;
  elements.reserve(nf);
  for (int f = 0; f < nf; ++f) {
    const auto tokens = next_tokens("face line");
    int arity = 0;
    if (!parse_int(tokens[0], arity)) parse_fail(path, lineno, "bad face line");
    if (arity != 3 && arity != 4)
      parse_fail(path, lineno,
                 "face " + std::to_string(f) + ": unsupported face arity " + std::to_string(arity));
    if (static_cast<int>(tokens.size()) < 1 + arity)
      parse_fail(path, lineno, "face line is missing indices");
    int ids[4] = {0, 0, 0, 0};
    for (int k = 0; k < arity; ++k)
      if (!parse_int(tokens[k + 1], ids[k]) || ids[k] < 0)
        parse_fail(path, lineno, "bad face index '" + std::string(tokens[k + 1]) + "'");
    elements.push_back(arity == 3 ? Element::tri(ids[0], ids[1], ids[2])
                                  : Element::quad(ids[0], ids[1], ids[2], ids[3]));
  }
  return resolve_dim(std::move(xyz), std::move(elements), mode);
}

}  // namespace detail

inline Mesh read_mesh(const std::string& path, MeshFormat format, DimMode mode = DimMode::Auto,
                      std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  Mesh mesh = format == MeshFormat::Obj ? detail::read_obj(in, path, mode, warnings)
                                        : detail::read_off(in, path, mode);
  if (const std::string err = structural_error(mesh); !err.empty())
    throw std::runtime_error(path + ": " + err);
  return mesh;
}

inline void write_mesh(const Mesh& mesh, const std::string& path, MeshFormat format) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  const int n = mesh.node_count();
  if (format == MeshFormat::Obj) {
    for (int i = 0; i < n; ++i) {
      const Vec3 p = mesh.node(i);
      out << "v " << detail::format_double(p.x) << ' ' << detail::format_double(p.y) << ' '
          << detail::format_double(p.z) << '\n';
    }
    for (const Element& el : mesh.elements) {
      out << 'f';
      for (int s = 0; s < el.size(); ++s) out << ' ' << el.nodes[s] + 1;
      out << '\n';
    }
  } else {
    out << "OFF\n" << n << ' ' << mesh.elements.size() << " 0\n";
    for (int i = 0; i < n; ++i) {
      const Vec3 p = mesh.node(i);
      out << detail::format_double(p.x) << ' ' << detail::format_double(p.y) << ' '
          << detail::format_double(p.z) << '\n';
    }
    for (const Element& el : mesh.elements) {
      out << el.size();
      for (int s = 0; s < el.size(); ++s) out << ' ' << el.nodes[s];
      out << '\n';
    }
  }
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

/// One row of a smoothing report; per-type quality fields are null for
/// element types the mesh does not contain.
struct ReportRecord {
  int iter = 0;
  std::optional<double> mq_tri, mse_tri, mq_quad, mse_quad;
  double max_disp = 0.0;
  int inversions_recovered = 0;

  bool operator==(const ReportRecord&) const = default;
};

/// Initial-state record (iter 0) followed by one record per iteration.
inline std::vector<ReportRecord> make_report(const QualitySummary& initial,
                                             const std::vector<IterationStats>& history) {
  std::vector<ReportRecord> records;
  records.reserve(history.size() + 1);
  auto to_record = [](int iter, const QualitySummary& q, double max_disp, int inversions) {
    ReportRecord r;
    r.iter = iter;
    r.mq_tri = q.mq_tri;
    r.mse_tri = q.mse_tri;
    r.mq_quad = q.mq_quad;
    r.mse_quad = q.mse_quad;
    r.max_disp = max_disp;
    r.inversions_recovered = inversions;
    return r;
  };
  records.push_back(to_record(0, initial, 0.0, 0));
  for (std::size_t i = 0; i < history.size(); ++i)
    records.push_back(to_record(static_cast<int>(i) + 1, history[i].quality,
                                history[i].max_displacement, history[i].inversions_recovered));
  return records;
}

namespace detail {

inline nlohmann::json to_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace detail

inline void write_report(const std::vector<ReportRecord>& history, const std::string& path,
                         ReportFormat format) {
  if (history.empty()) throw std::invalid_argument("report history is empty");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  if (format == ReportFormat::Json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const ReportRecord& r : history) {
      arr.push_back({{"iter", r.iter},
                     {"mq_tri", detail::to_json(r.mq_tri)},
                     {"mse_tri", detail::to_json(r.mse_tri)},
                     {"mq_quad", detail::to_json(r.mq_quad)},
                     {"mse_quad", detail::to_json(r.mse_quad)},
                     {"max_disp", r.max_disp},
                     {"inversions_recovered", r.inversions_recovered}});
    }
    out << arr.dump(2) << '\n';
  } else {
    auto cell = [](const std::optional<double>& v) {
      return v ? detail::format_double(*v) : std::string{};
    };
    out << "iter,mq_tri,mse_tri,mq_quad,mse_quad,max_disp,inversions_recovered\n";
    for (const ReportRecord& r : history)
      out << r.iter << ',' << cell(r.mq_tri) << ',' << cell(r.mse_tri) << ',' << cell(r.mq_quad)
          << ',' << cell(r.mse_quad) << ',' << detail::format_double(r.max_disp) << ','
          << r.inversions_recovered << '\n';
  }
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

inline std::vector<ReportRecord> read_report(const std::string& path, ReportFormat format) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::vector<ReportRecord> records;
  if (format == ReportFormat::Json) {
    nlohmann::json arr = nlohmann::json::parse(in);
    for (const auto& item : arr) {
      ReportRecord r;
      r.iter = item.at("iter").get<int>();
      auto opt = [&](const char* key) -> std::optional<double> {
        const auto& v = item.at(key);
        return v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
      };
      r.mq_tri = opt("mq_tri");
      r.mse_tri = opt("mse_tri");
      r.mq_quad = opt("mq_quad");
      r.mse_quad = opt("mse_quad");
      r.max_disp = item.at("max_disp").get<double>();
      r.inversions_recovered = item.at("inversions_recovered").get<int>();
      records.push_back(r);
    }
    return records;
  }
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 || line.empty()) continue;  // header
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (cells.size() != 7) detail::parse_fail(path, lineno, "expected 7 CSV cells");
    ReportRecord r;
    auto opt = [&](const std::string& cell) -> std::optional<double> {
      if (cell.empty()) return std::nullopt;
      double v = 0.0;
      if (!detail::parse_double(cell, v)) detail::parse_fail(path, lineno, "bad number");
      return v;
    };
    if (!detail::parse_int(cells[0], r.iter)) detail::parse_fail(path, lineno, "bad iter");
    r.mq_tri = opt(cells[1]);
    r.mse_tri = opt(cells[2]);
    r.mq_quad = opt(cells[3]);
    r.mse_quad = opt(cells[4]);
    double disp = 0.0;
    if (!detail::parse_double(cells[5], disp)) detail::parse_fail(path, lineno, "bad max_disp");
    r.max_disp = disp;
    if (!detail::parse_int(cells[6], r.inversions_recovered))
      detail::parse_fail(path, lineno, "bad inversion count");
    records.push_back(r);
  }
  return records;
}

}  // namespace meshsmooth
