#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "latdist/distance_matrix.hpp"

namespace latdist {

// A named lattice parsed from a CIF-subset or JSON document.
struct LatticeRecord {
  enum class Source { cif, json };
  std::string id;
  Source source = Source::json;
  LatticeBasis basis;
  std::optional<CellParameters> raw_cell;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

inline std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

inline std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.emplace_back(text.substr(start));
      break;
    }
    lines.emplace_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  for (auto& l : lines)
    if (!l.empty() && l.back() == '\r') l.pop_back();
  return lines;
}

// Parses a full numeric token, stripping a CIF standard-uncertainty suffix
// such as "7.3(2)".
inline double parse_cif_number(const std::string& token, std::size_t line) {
  std::string body = token;
  if (const auto paren = body.find('('); paren != std::string::npos) {
    if (body.back() != ')')
      throw malformed_number_error("malformed number '" + token + "'", line);
    body = body.substr(0, paren);
  }
  if (body.empty())
    throw malformed_number_error("malformed number '" + token + "'", line);
  char* end = nullptr;
  const double value = std::strtod(body.c_str(), &end);
  if (end != body.c_str() + body.size() || !std::isfinite(value))
    throw malformed_number_error("malformed number '" + token + "'", line);
  return value;
}

inline std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline void check_id_charset(const std::string& id) {
  if (id.empty()) throw parse_error("record id must be non-empty");
  if (id.find_first_of(",\n\r") != std::string::npos)
    throw parse_error("record id '" + id +
                      "' contains a reserved character (comma or newline)");
}

} // namespace detail

// Parses the six cell tags of a CIF document into one lattice record; the id
// comes from the data_ block header, falling back to `fallback_id`. Loops,
// atom sites and any other content are skipped.
inline LatticeRecord parse_cif_cell(std::string_view text,
                                    const std::string& fallback_id = "cif") {
  static const char* kTags[6] = {"_cell_length_a",    "_cell_length_b",
                                 "_cell_length_c",    "_cell_angle_alpha",
                                 "_cell_angle_beta",  "_cell_angle_gamma"};
  std::optional<double> values[6];
  std::string id;

  const auto lines = detail::split_lines(text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::string line = detail::trim(lines[li]);
    if (line.empty() || line[0] == '#') continue;
    if (id.empty() && line.rfind("data_", 0) == 0)
      id = detail::trim(line.substr(5));
    if (line[0] != '_') continue;

    const auto ws = line.find_first_of(" \t");
    const std::string tag =
        detail::to_lower(ws == std::string::npos ? line : line.substr(0, ws));
    for (int t = 0; t < 6; ++t) {
      if (tag != kTags[t] || values[t]) continue;
      if (ws == std::string::npos)
        throw malformed_number_error("tag " + tag + " has no value", li + 1);
      const std::string token = detail::trim(line.substr(ws));
      values[t] = detail::parse_cif_number(token, li + 1);
    }
  }
  for (int t = 0; t < 6; ++t)
    if (!values[t]) throw missing_tag_error(kTags[t]);

  const CellParameters cell{*values[0], *values[1], *values[2],
                            *values[3], *values[4], *values[5]};
  LatticeRecord rec{id.empty() ? fallback_id : id, LatticeRecord::Source::cif,
                    basis_from_cell_parameters(cell), cell};
  detail::check_id_charset(rec.id);
  return rec;
}

// JSON dataset: an array of {"id": str, "basis": [[x,y,z]*3]} or
// {"id": str, "cell": [a,b,c,alpha,beta,gamma]} objects.
inline std::vector<LatticeRecord> parse_lattice_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw parse_error("top-level JSON value must be an array");

  std::vector<LatticeRecord> records;
  std::vector<std::string> seen;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& item = doc[i];
    const std::string where = "record #" + std::to_string(i + 1);
    if (!item.is_object()) throw parse_error(where + ": not an object");
    if (!item.contains("id") || !item["id"].is_string())
      throw parse_error(where + ": missing string field 'id'");
    const std::string id = item["id"].get<std::string>();
    detail::check_id_charset(id);
    if (std::find(seen.begin(), seen.end(), id) != seen.end())
      throw parse_error("record '" + id + "': duplicate id");
    seen.push_back(id);

    const bool has_basis = item.contains("basis");
    const bool has_cell = item.contains("cell");
    if (has_basis == has_cell)
      throw parse_error("record '" + id +
                        "': exactly one of 'basis' or 'cell' is required");
    try {
      if (has_basis) {
        const auto& rows = item["basis"];
        if (!rows.is_array() || rows.size() != 3)
          throw parse_error("'basis' must be a 3x3 array of numbers");
        Vec3 v[3];
        for (int r = 0; r < 3; ++r) {
          if (!rows[r].is_array() || rows[r].size() != 3)
            throw parse_error("'basis' must be a 3x3 array of numbers");
          for (int c = 0; c < 3; ++c) {
            if (!rows[r][c].is_number())
              throw parse_error("'basis' must be a 3x3 array of numbers");
            v[r][c] = rows[r][c].get<double>();
          }
        }
        records.push_back({id, LatticeRecord::Source::json,
                           LatticeBasis(v[0], v[1], v[2]), std::nullopt});
      } else {
        const auto& cell = item["cell"];
        if (!cell.is_array() || cell.size() != 6)
          throw parse_error("'cell' must be [a,b,c,alpha,beta,gamma]");
        double x[6];
        for (int c = 0; c < 6; ++c) {
          if (!cell[c].is_number())
            throw parse_error("'cell' must be [a,b,c,alpha,beta,gamma]");
          x[c] = cell[c].get<double>();
        }
        const CellParameters p{x[0], x[1], x[2], x[3], x[4], x[5]};
        records.push_back({id, LatticeRecord::Source::json,
                           basis_from_cell_parameters(p), p});
      }
    } catch (const parse_error&) {
      throw;
    } catch (const error& e) {
      throw parse_error("record '" + id + "': " + e.what());
    }
  }
  return records;
}

// CSV layout: the top-left cell holds "<metric>:<grid_n>" (e.g. "dH:3"), the
// rest of the first row and first column are ids, values are written with 9
// significant digits.
inline std::string write_matrix_csv(const DistanceMatrix& m) {
  for (const auto& id : m.ids) detail::check_id_charset(id);
  std::string out = std::string(metric_label(m.metric)) + ":" +
                    std::to_string(m.grid_n);
  for (const auto& id : m.ids) out += "," + id;
  out += "\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += m.ids[i];
    for (std::size_t j = 0; j < m.size(); ++j)
      out += "," + detail::format_g9(m.at(i, j));
    out += "\n";
  }
  return out;
}

inline DistanceMatrix read_matrix_csv(std::string_view text) {
  auto lines = detail::split_lines(text);
  while (!lines.empty() && detail::trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw parse_error("empty matrix document");

  auto split_csv = [](const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      if (comma == std::string::npos) {
        cells.push_back(line.substr(start));
        break;
      }
      cells.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    return cells;
  };

  const auto header = split_csv(lines[0]);
  if (header.size() < 2) throw parse_error("matrix header has no ids", 1);

  DistanceMatrix m;
  const std::string corner = detail::trim(header[0]);
  if (!corner.empty()) {
    const auto colon = corner.find(':');
    const std::string label = corner.substr(0, colon);
    if (label == "dH") {
      m.metric = Metric::hausdorff;
    } else if (label == "dS") {
      m.metric = Metric::scale;
    } else {
      throw parse_error("unrecognized matrix label '" + corner + "'", 1);
    }
    if (colon != std::string::npos) {
      const std::string tail = corner.substr(colon + 1);
      char* end = nullptr;
      m.grid_n = static_cast<int>(std::strtol(tail.c_str(), &end, 10));
      if (end != tail.c_str() + tail.size())
        throw parse_error("unrecognized matrix label '" + corner + "'", 1);
    }
  }
  m.ids.assign(header.begin() + 1, header.end());
  const std::size_t n = m.ids.size();
  if (lines.size() != n + 1)
    throw parse_error("expected " + std::to_string(n) + " matrix rows, found " +
                      std::to_string(lines.size() - 1));

  m.values.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto cells = split_csv(lines[i + 1]);
    if (cells.size() != n + 1)
      throw parse_error("row has " + std::to_string(cells.size() - 1) +
                            " values, expected " + std::to_string(n),
                        i + 2);
    if (cells[0] != m.ids[i])
      throw parse_error("row id '" + cells[0] + "' does not match column id '" +
                            m.ids[i] + "'",
                        i + 2);
    for (std::size_t j = 0; j < n; ++j) {
      const std::string token = detail::trim(cells[j + 1]);
      char* end = nullptr;
      const double v = std::strtod(token.c_str(), &end);
      if (token.empty() || end != token.c_str() + token.size() ||
          !std::isfinite(v))
        throw malformed_number_error("malformed number '" + token + "'", i + 2);
      m.at(i, j) = v;
    }
  }

  double vmax = 0;
  for (double v : m.values) vmax = std::max(vmax, std::abs(v));
  const double tol = 1e-9 * std::max(1.0, vmax);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(m.at(i, i)) > tol)
      throw parse_error("nonzero diagonal at id '" + m.ids[i] + "'");
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(m.at(i, j) - m.at(j, i)) > tol)
        throw symmetry_violation_error("matrix is not symmetric at (" +
                                       m.ids[i] + ", " + m.ids[j] + ")");
  }
  return m;
}

// Square grayscale image with byte intensities, row-major.
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;
};

// Linear map of all matrix values onto [0,255]: min -> 0, max -> 255,
// rounded half away from zero; a constant matrix maps to all zeros.
inline GrayImage scale_to_gray(const DistanceMatrix& m) {
  GrayImage img{m.size(), m.size(), {}};
  img.pixels.reserve(m.values.size());
  double vmin = std::numeric_limits<double>::infinity();
  double vmax = -std::numeric_limits<double>::infinity();
  for (double v : m.values) {
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  const double span = vmax - vmin;
  for (double v : m.values) {
    long g = span > 0 ? std::lround(255.0 * (v - vmin) / span) : 0;
    img.pixels.push_back(static_cast<std::uint8_t>(std::clamp(g, 0L, 255L)));
  }
  return img;
}

// Binary PGM (P5), maxval 255.
inline std::string write_pgm(const GrayImage& img) {
  std::string out = "P5\n" + std::to_string(img.width) + " " +
                    std::to_string(img.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.pixels.data()),
             img.pixels.size());
  return out;
}

// Wavefront OBJ: one v-line per vertex (9 significant digits), one f-line per
// face with 1-based indices in stored winding order.
inline std::string export_cell_obj(const ConvexPolyhedron& p) {
  std::string out;
  for (const Vec3& v : p.vertices)
    out += "v " + detail::format_g9(v.x()) + " " + detail::format_g9(v.y()) +
           " " + detail::format_g9(v.z()) + "\n";
  for (const auto& f : p.faces) {
    out += "f";
    for (int idx : f) out += " " + std::to_string(idx + 1);
    out += "\n";
  }
  return out;
}

} // namespace latdist
