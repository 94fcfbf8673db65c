#ifndef WWL_DATASET_IO_HPP
#define WWL_DATASET_IO_HPP

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "wwl/error.hpp"
#include "wwl/graph.hpp"
#include "wwl/version.hpp"

namespace wwl {

// ---------------------------------------------------------------------------
// TU benchmark format
// ---------------------------------------------------------------------------

struct TuOptions {
  /// When false, a missing DS_graph_labels.txt is tolerated and every graph
  /// gets class label 0 (Dataset::has_class_labels is cleared).
  bool require_graph_labels = true;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos
                                                                          : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::int64_t parse_int(std::string_view field, const std::string& where) {
  const std::string s(field);
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || errno != 0 || *end != '\0') {
    throw Error(where + ": expected an integer, got '" + s + "'");
  }
  return v;
}

inline double parse_double(std::string_view field, const std::string& where) {
  const std::string s(field);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || errno == ERANGE || *end != '\0') {
    throw Error(where + ": expected a number, got '" + s + "'");
  }
  return v;
}

/// Non-empty lines of a file, each split into comma-separated fields.
inline std::vector<std::vector<std::string_view>> read_rows(const std::filesystem::path& path,
                                                            std::string& storage) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  storage = buf.str();

  std::vector<std::vector<std::string_view>> rows;
  std::string_view text(storage);
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = trim(text.substr(pos, nl - pos));
    if (!line.empty()) rows.push_back(split_fields(line));
    pos = nl + 1;
  }
  return rows;
}

}  // namespace detail

/// Reads DS_A.txt, DS_graph_indicator.txt, DS_graph_labels.txt and the
/// optional DS_node_labels.txt, DS_node_attributes.txt, DS_edge_attributes.txt
/// from `dir`. Graphs are returned in ascending graph-id order with node
/// indices rebased to 0; each undirected edge is stored once.
inline Dataset parse_tu(const std::filesystem::path& dir, const std::string& name,
                        const TuOptions& options = {}) {
  namespace fs = std::filesystem;
  const auto file = [&](const char* suffix) { return dir / (name + suffix); };
  for (const char* required : {"_A.txt", "_graph_indicator.txt"}) {
    if (!fs::exists(file(required))) {
      throw IoError("dataset " + name + ": missing required file " + file(required).string());
    }
  }
  const bool have_graph_labels = fs::exists(file("_graph_labels.txt"));
  if (!have_graph_labels && options.require_graph_labels) {
    throw IoError("dataset " + name + ": missing required file " +
                  file("_graph_labels.txt").string());
  }

  std::string storage;
  const auto indicator_rows = detail::read_rows(file("_graph_indicator.txt"), storage);
  const std::size_t total_nodes = indicator_rows.size();
  std::vector<std::size_t> node_graph(total_nodes);
  std::int64_t max_gid = 0;
  for (std::size_t i = 0; i < total_nodes; ++i) {
    const auto gid = detail::parse_int(indicator_rows[i].at(0),
                                       name + "_graph_indicator.txt line " + std::to_string(i + 1));
    if (gid < 1) throw Error(name + "_graph_indicator.txt: graph ids must start at 1");
    node_graph[i] = static_cast<std::size_t>(gid - 1);
    max_gid = std::max(max_gid, gid);
  }
  const auto graph_count = static_cast<std::size_t>(max_gid);

  Dataset ds;
  ds.name = name;
  ds.graphs.resize(graph_count);
  std::vector<std::size_t> local(total_nodes);
  for (std::size_t i = 0; i < total_nodes; ++i) {
    local[i] = ds.graphs[node_graph[i]].node_count++;
  }
  for (std::size_t g = 0; g < graph_count; ++g) {
    if (ds.graphs[g].node_count == 0) {
      throw Error(name + "_graph_indicator.txt: graph ids are not contiguous (id " +
                  std::to_string(g + 1) + " has no nodes)");
    }
  }

  if (have_graph_labels) {
    const auto rows = detail::read_rows(file("_graph_labels.txt"), storage);
    if (rows.size() != graph_count) {
      throw Error(name + "_graph_labels.txt: row-count mismatch (" + std::to_string(rows.size()) +
                  " rows for " + std::to_string(graph_count) + " graphs)");
    }
    ds.graph_labels.reserve(graph_count);
    for (std::size_t g = 0; g < graph_count; ++g) {
      ds.graph_labels.push_back(detail::parse_int(
          rows[g].at(0), name + "_graph_labels.txt line " + std::to_string(g + 1)));
    }
  } else {
    ds.graph_labels.assign(graph_count, 0);
    ds.has_class_labels = false;
  }

  if (fs::exists(file("_node_labels.txt"))) {
    const auto rows = detail::read_rows(file("_node_labels.txt"), storage);
    if (rows.size() != total_nodes) {
      throw Error(name + "_node_labels.txt: row-count mismatch (" + std::to_string(rows.size()) +
                  " rows for " + std::to_string(total_nodes) + " nodes)");
    }
    for (auto& g : ds.graphs) g.node_labels = std::vector<Label>(g.node_count);
    for (std::size_t i = 0; i < total_nodes; ++i) {
      (*ds.graphs[node_graph[i]].node_labels)[local[i]] =
          detail::parse_int(rows[i].at(0), name + "_node_labels.txt line " + std::to_string(i + 1));
    }
  }

  if (fs::exists(file("_node_attributes.txt"))) {
    const auto rows = detail::read_rows(file("_node_attributes.txt"), storage);
    if (rows.size() != total_nodes) {
      throw Error(name + "_node_attributes.txt: row-count mismatch (" +
                  std::to_string(rows.size()) + " rows for " + std::to_string(total_nodes) +
                  " nodes)");
    }
    const std::size_t m = rows.empty() ? 0 : rows.front().size();
    for (auto& g : ds.graphs) g.node_attributes = RowMatrix(g.node_count, m);
    for (std::size_t i = 0; i < total_nodes; ++i) {
      const std::string where = name + "_node_attributes.txt line " + std::to_string(i + 1);
      if (rows[i].size() != m) throw Error(where + ": inconsistent attribute dimension");
      RowMatrix& attrs = *ds.graphs[node_graph[i]].node_attributes;
      for (std::size_t c = 0; c < m; ++c) {
        attrs(local[i], c) = detail::parse_double(rows[i][c], where);
      }
    }
  }

  const auto edge_rows = detail::read_rows(file("_A.txt"), storage);
  std::optional<std::vector<double>> edge_weights;
  if (fs::exists(file("_edge_attributes.txt"))) {
    std::string attr_storage;
    const auto rows = detail::read_rows(file("_edge_attributes.txt"), attr_storage);
    if (rows.size() != edge_rows.size()) {
      throw Error(name + "_edge_attributes.txt: row-count mismatch (" +
                  std::to_string(rows.size()) + " rows for " + std::to_string(edge_rows.size()) +
                  " edge rows)");
    }
    edge_weights.emplace();
    edge_weights->reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const std::string where = name + "_edge_attributes.txt line " + std::to_string(r + 1);
      if (rows[r].size() != 1) {
        throw Error(where + ": only one-dimensional edge attributes are supported as weights");
      }
      edge_weights->push_back(detail::parse_double(rows[r][0], where));
    }
  }

  std::vector<std::map<std::pair<std::size_t, std::size_t>, char>> seen(graph_count);
  for (std::size_t r = 0; r < edge_rows.size(); ++r) {
    const std::string where = name + "_A.txt line " + std::to_string(r + 1);
    if (edge_rows[r].size() != 2) throw Error(where + ": expected two node ids");
    const auto a = detail::parse_int(edge_rows[r][0], where);
    const auto b = detail::parse_int(edge_rows[r][1], where);
    if (a < 1 || b < 1 || static_cast<std::size_t>(a) > total_nodes ||
        static_cast<std::size_t>(b) > total_nodes) {
      throw Error(where + ": node id out of range");
    }
    const auto ga = node_graph[a - 1], gb = node_graph[b - 1];
    if (ga != gb) throw Error(where + ": edge crosses graphs " + std::to_string(ga + 1) +
                              " and " + std::to_string(gb + 1));
    std::size_t u = local[a - 1], v = local[b - 1];
    if (u > v) std::swap(u, v);
    if (seen[ga].emplace(std::make_pair(u, v), 1).second) {
      ds.graphs[ga].edges.push_back({u, v, edge_weights ? (*edge_weights)[r] : 1.0});
    }
  }

  for (std::size_t g = 0; g < graph_count; ++g) {
    try {
      validate(ds.graphs[g]);
    } catch (const Error& e) {
      throw Error("dataset " + name + ", graph " + std::to_string(g + 1) + ": " + e.what());
    }
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Matrix artifacts
// ---------------------------------------------------------------------------

enum class MatrixKind { kernel, distance };

inline const char* to_string(MatrixKind k) {
  return k == MatrixKind::kernel ? "kernel" : "distance";
}

struct MatrixMetadata {
  std::optional<std::string> scheme;           // categorical | continuous
  std::optional<int> h;
  std::optional<double> lambda;
  std::optional<std::string> ground_distance;  // hamming | euclidean
  std::optional<std::string> solver;           // exact | sinkhorn
  std::optional<double> gamma;
  std::string dataset;
  std::string version = kVersion;

  friend bool operator==(const MatrixMetadata&, const MatrixMetadata&) = default;
};

struct MatrixArtifact {
  RowMatrix values;
  MatrixKind kind = MatrixKind::distance;
  MatrixMetadata metadata;
};

/// Throws unless the matrix is square, finite and symmetric within `tol`;
/// distance matrices additionally need a zero diagonal and no negative entry.
inline void validate(const MatrixArtifact& artifact, double tol = 1e-9) {
  const RowMatrix& v = artifact.values;
  if (v.rows() != v.cols()) throw Error("invariant violation: matrix is not square");
  if (!v.allFinite()) throw Error("invariant violation: non-finite entry");
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < v.cols(); ++j) {
      if (std::abs(v(i, j) - v(j, i)) > tol) {
        throw Error("invariant violation: asymmetric at (" + std::to_string(i) + ", " +
                    std::to_string(j) + ")");
      }
    }
  }
  if (artifact.kind == MatrixKind::distance) {
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      if (std::abs(v(i, i)) > tol) {
        throw Error("invariant violation: nonzero diagonal at " + std::to_string(i));
      }
    }
    if ((v.array() < 0.0).any()) throw Error("invariant violation: negative distance entry");
  }
}

inline nlohmann::json to_json(const MatrixArtifact& a) {
  nlohmann::json j;
  const auto opt = [](const auto& o) -> nlohmann::json {
    if (o) return *o;
    return nullptr;
  };
  const MatrixMetadata& m = a.metadata;
  j["kind"] = to_string(a.kind);
  j["scheme"] = opt(m.scheme);
  j["h"] = opt(m.h);
  j["lambda"] = opt(m.lambda);
  j["ground_distance"] = opt(m.ground_distance);
  j["solver"] = opt(m.solver);
  j["gamma"] = opt(m.gamma);
  j["dataset"] = m.dataset;
  j["version"] = m.version;
  return j;
}

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".meta.json");
}

/// Writes one matrix row per line as space-separated 17-significant-digit
/// decimals, plus `path`.meta.json holding the metadata.
inline void write_matrix(const MatrixArtifact& artifact, const std::filesystem::path& path) {
  validate(artifact);
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    const RowMatrix& v = artifact.values;
    std::string line;
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      line.clear();
      for (Eigen::Index j = 0; j < v.cols(); ++j) {
        if (j) line += ' ';
        line += format_double(v(i, j));
      }
      line += '\n';
      out << line;
    }
    if (!out) throw IoError("write failed: " + path.string());
  }
  std::ofstream meta(sidecar_path(path), std::ios::binary);
  if (!meta) throw IoError("cannot write " + sidecar_path(path).string());
  meta << to_json(artifact).dump(2) << '\n';
  if (!meta) throw IoError("write failed: " + sidecar_path(path).string());
}

inline MatrixArtifact read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    std::vector<double> row;
    std::istringstream fields(line);
    std::string tok;
    while (fields >> tok) {
      row.push_back(detail::parse_double(tok, path.string() + " line " + std::to_string(lineno)));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(path.string() + ": non-rectangular matrix at line " + std::to_string(lineno));
    }
    rows.push_back(std::move(row));
  }

  MatrixArtifact a;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto m = rows.empty() ? Eigen::Index{0} : static_cast<Eigen::Index>(rows.front().size());
  a.values.resize(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) a.values(i, j) = rows[i][j];
  }

  std::ifstream meta_in(sidecar_path(path), std::ios::binary);
  if (!meta_in) throw IoError("cannot open " + sidecar_path(path).string());
  nlohmann::json j;
  try {
    meta_in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(sidecar_path(path).string() + ": " + e.what());
  }
  const auto kind = j.value("kind", std::string{});
  if (kind == "kernel") {
    a.kind = MatrixKind::kernel;
  } else if (kind == "distance") {
    a.kind = MatrixKind::distance;
  } else {
    throw Error(sidecar_path(path).string() + ": unknown kind '" + kind + "'");
  }
  const auto get = [&](const char* key, auto& field) {
    if (j.contains(key) && !j[key].is_null()) {
      field = j[key].get<typename std::decay_t<decltype(field)>::value_type>();
    }
  };
  MatrixMetadata& md = a.metadata;
  get("scheme", md.scheme);
  get("h", md.h);
  get("lambda", md.lambda);
  get("ground_distance", md.ground_distance);
  get("solver", md.solver);
  get("gamma", md.gamma);
  md.dataset = j.value("dataset", std::string{});
  md.version = j.value("version", std::string{});

  validate(a);
  return a;
}

}  // namespace wwl

#endif  // WWL_DATASET_IO_HPP
