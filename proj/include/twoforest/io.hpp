#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "twoforest/graph.hpp"
#include "twoforest/planar.hpp"

namespace twoforest::io {

using Json = nlohmann::ordered_json;

/// Edge list: one edge per line, "u v [c]"; blank lines and text after '#'
/// are ignored. Vertex names are arbitrary tokens.
inline WeightedGraph parse_edge_list(std::istream& in, const std::string& boundary) {
  std::vector<LabeledEdge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string t; fields >> t;) tokens.push_back(t);
    if (tokens.empty()) continue;
    if (tokens.size() < 2 || tokens.size() > 3)
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected 'u v [c]'");
    LabeledEdge e{tokens[0], tokens[1], 1.0};
    if (tokens.size() == 3) {
      std::size_t used = 0;
      try {
        e.c = std::stod(tokens[2], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tokens[2].size())
        throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": bad conductance '" + tokens[2] + "'");
    }
    edges.push_back(std::move(e));
  }
  return build_graph(std::span<const LabeledEdge>(edges), boundary);
}

inline double json_conductance(const Json& edge) {
  if (edge.size() < 3) return 1.0;
  if (!edge[2].is_number()) throw Error(ErrorKind::ParseError, "conductance must be a number");
  return edge[2].get<double>();
}

inline std::vector<Edge> json_edges(const Json& doc) {
  if (!doc.contains("edges") || !doc["edges"].is_array()) throw Error(ErrorKind::ParseError, "missing 'edges' array");
  std::vector<Edge> edges;
  for (const Json& e : doc["edges"]) {
    if (!e.is_array() || e.size() < 2 || e.size() > 3 || !e[0].is_number_unsigned() || !e[1].is_number_unsigned())
      throw Error(ErrorKind::ParseError, "edges must be [u, v] or [u, v, c] with vertex ids");
    edges.push_back({e[0].get<Vertex>(), e[1].get<Vertex>(), json_conductance(e)});
  }
  return edges;
}

inline std::size_t json_count(const Json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_number_unsigned())
    throw Error(ErrorKind::ParseError, std::string("missing non-negative integer '") + key + "'");
  return doc[key].get<std::size_t>();
}

/// {"vertices": n, "boundary": b, "edges": [[u, v, c], ...]}
inline WeightedGraph parse_graph_json(const Json& doc) {
  const std::size_t n = json_count(doc, "vertices");
  const Vertex b = doc.contains("boundary") ? json_count(doc, "boundary") : 0;
  return build_graph(n, json_edges(doc), b);
}

/// {"vertices": n, "edges": [...], "rotation": [[dart, ...] per vertex],
///  "outer_dart": d, "boundary": b (optional)}. Dart 2e runs u -> v along
/// edge e = [u, v], dart 2e+1 runs back.
inline PlanarEmbedding parse_map_json(const Json& doc) {
  const std::size_t n = json_count(doc, "vertices");
  const Vertex b = doc.contains("boundary") ? json_count(doc, "boundary") : 0;
  WeightedGraph g = build_graph(n, json_edges(doc), b);
  if (!doc.contains("rotation") || !doc["rotation"].is_array())
    throw Error(ErrorKind::ParseError, "missing 'rotation' array");
  std::vector<std::vector<Dart>> rotation;
  for (const Json& around : doc["rotation"]) {
    if (!around.is_array()) throw Error(ErrorKind::ParseError, "rotation entries must be dart lists");
    std::vector<Dart> darts;
    for (const Json& d : around) {
      if (!d.is_number_unsigned()) throw Error(ErrorKind::ParseError, "dart ids must be non-negative integers");
      darts.push_back(d.get<Dart>());
    }
    rotation.push_back(std::move(darts));
  }
  return PlanarEmbedding(std::move(g), std::move(rotation), json_count(doc, "outer_dart"));
}

inline Json map_to_json(const PlanarEmbedding& map) {
  const WeightedGraph& g = map.graph();
  Json edges = Json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.u, e.v, e.c});
  Json rotation = Json::array();
  for (const auto& around : map.rotation()) rotation.push_back(around);
  return Json{{"vertices", g.vertex_count()},
              {"boundary", g.boundary()},
              {"edges", std::move(edges)},
              {"rotation", std::move(rotation)},
              {"outer_dart", map.outer_dart()}};
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline bool looks_like_json(const std::string& text) {
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) continue;
    return ch == '{';
  }
  return false;
}

inline Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

/// Load a graph from an edge-list or JSON file. For JSON, a non-empty
/// `boundary` (a vertex id) overrides the file's boundary.
inline WeightedGraph load_graph(const std::string& path, const std::string& boundary) {
  const std::string text = read_file(path);
  if (looks_like_json(text)) {
    WeightedGraph g = parse_graph_json(parse_json_text(text));
    if (boundary.empty()) return g;
    std::size_t used = 0;
    Vertex b = 0;
    try {
      b = std::stoul(boundary, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != boundary.size()) throw Error(ErrorKind::InvalidBoundary, "boundary must be a vertex id for JSON input");
    return g.with_boundary(b);
  }
  if (boundary.empty()) throw Error(ErrorKind::InvalidBoundary, "edge-list input needs a boundary vertex");
  std::istringstream in(text);
  return parse_edge_list(in, boundary);
}

inline PlanarEmbedding load_map(const std::string& path) { return parse_map_json(parse_json_text(read_file(path))); }

/// Number with 17 significant digits (integers print exactly).
inline std::string format_double(double x) {
  if (std::isnan(x)) return "NaN";
  if (std::isinf(x)) return x > 0 ? "Infinity" : "-Infinity";
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", x);
  return buffer;
}

namespace detail {

inline void write_string(std::string& out, const std::string& s) {
  out += Json(s).dump();
}

inline void write(std::string& out, const Json& value, int indent, int depth) {
  const std::string pad = indent > 0 ? "\n" + std::string(std::size_t(indent * (depth + 1)), ' ') : "";
  const std::string close = indent > 0 ? "\n" + std::string(std::size_t(indent * depth), ' ') : "";
  switch (value.type()) {
    case Json::value_t::object: {
      if (value.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = value.begin(); it != value.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += pad;
        write_string(out, it.key());
        out += indent > 0 ? ": " : ":";
        write(out, it.value(), indent, depth + 1);
      }
      out += close;
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (value.empty()) {
        out += "[]";
        return;
      }
      const bool flat = std::all_of(value.begin(), value.end(), [](const Json& v) { return v.is_primitive(); });
      out += '[';
      bool first = true;
      for (const Json& v : value) {
        if (!first) out += flat ? ", " : ",";
        first = false;
        if (!flat) out += pad;
        write(out, v, indent, depth + 1);
      }
      if (!flat) out += close;
      out += ']';
      return;
    }
    case Json::value_t::number_float: {
      const double x = value.get<double>();
      out += std::isfinite(x) ? format_double(x) : "null";
      return;
    }
    default: out += value.dump();
  }
}

}  // namespace detail

/// Canonical JSON text: key order as inserted, floats with 17 significant
/// digits, short scalar arrays on one line.
inline std::string dump(const Json& value, int indent = 2) {
  std::string out;
  detail::write(out, value, indent, 0);
  out += '\n';
  return out;
}

/// CSV row with 17-digit floats.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(const std::vector<std::string>& columns) {
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
  }

  template <class... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(fields), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string cell(double x) { return format_double(x); }
  static std::string cell(std::size_t x) { return std::to_string(x); }
  static std::string cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char ch : s) {
      if (ch == '"') quoted += '"';
      quoted += ch;
    }
    return quoted + '"';
  }
  static std::string cell(const char* s) { return cell(std::string(s)); }

  std::ostream& out_;
};

}  // namespace twoforest::io
