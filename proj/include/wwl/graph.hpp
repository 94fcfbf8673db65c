#ifndef WWL_GRAPH_HPP
#define WWL_GRAPH_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wwl/error.hpp"

namespace wwl {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Label = std::int64_t;

struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
  double weight = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected graph with optional categorical node labels and optional
/// real-valued node attributes (one row per node).
struct Graph {
  std::size_t node_count = 0;
  std::vector<Edge> edges;
  std::optional<std::vector<Label>> node_labels;
  std::optional<RowMatrix> node_attributes;
};

struct Dataset {
  std::string name;
  std::vector<Graph> graphs;
  std::vector<Label> graph_labels;
  /// False when the source carried no class labels (graph_labels are then 0).
  bool has_class_labels = true;
};

/// Checks every Graph invariant and stores each edge with u <= v.
/// Self-loops are accepted; parallel edges are rejected.
inline void validate(Graph& graph) {
  const std::size_t n = graph.node_count;
  for (std::size_t i = 0; i < graph.edges.size(); ++i) {
    Edge& e = graph.edges[i];
    if (e.u >= n || e.v >= n) {
      throw Error("edges[" + std::to_string(i) + "]: endpoint out of range (" +
                  std::to_string(e.u) + ", " + std::to_string(e.v) + ") for " +
                  std::to_string(n) + " nodes");
    }
    if (!std::isfinite(e.weight)) {
      throw Error("edges[" + std::to_string(i) + "]: non-finite weight");
    }
    if (e.u > e.v) std::swap(e.u, e.v);
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(graph.edges.size());
  for (const Edge& e : graph.edges) pairs.emplace_back(e.u, e.v);
  std::sort(pairs.begin(), pairs.end());
  auto dup = std::adjacent_find(pairs.begin(), pairs.end());
  if (dup != pairs.end()) {
    throw Error("edges: parallel edge (" + std::to_string(dup->first) + ", " +
                std::to_string(dup->second) + ")");
  }

  if (graph.node_labels) {
    const auto& labels = *graph.node_labels;
    if (labels.size() != n) {
      throw Error("node_labels: length mismatch (" + std::to_string(labels.size()) +
                  " labels for " + std::to_string(n) + " nodes)");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] < 0) {
        throw Error("node_labels[" + std::to_string(i) + "]: negative label");
      }
    }
  }
  if (graph.node_attributes) {
    const RowMatrix& attrs = *graph.node_attributes;
    if (static_cast<std::size_t>(attrs.rows()) != n) {
      throw Error("node_attributes: length mismatch (" + std::to_string(attrs.rows()) +
                  " rows for " + std::to_string(n) + " nodes)");
    }
    if (attrs.cols() < 1) throw Error("node_attributes: zero attribute dimension");
    for (Eigen::Index r = 0; r < attrs.rows(); ++r) {
      for (Eigen::Index c = 0; c < attrs.cols(); ++c) {
        if (!std::isfinite(attrs(r, c))) {
          throw Error("node_attributes[" + std::to_string(r) + "][" + std::to_string(c) +
                      "]: non-finite value");
        }
      }
    }
  }
}

/// Neighbour lists with edge weights. A self-loop contributes its node once.
inline std::vector<std::vector<std::pair<std::size_t, double>>> adjacency(const Graph& graph) {
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(graph.node_count);
  for (const Edge& e : graph.edges) {
    adj[e.u].emplace_back(e.v, e.weight);
    if (e.u != e.v) adj[e.v].emplace_back(e.u, e.weight);
  }
  return adj;
}

inline std::vector<std::size_t> degrees(const Graph& graph) {
  std::vector<std::size_t> deg(graph.node_count, 0);
  for (const Edge& e : graph.edges) {
    ++deg[e.u];
    if (e.u != e.v) ++deg[e.v];
  }
  return deg;
}

/// Relabels nodes: old node i becomes node perm[i].
inline Graph permute(const Graph& graph, const std::vector<std::size_t>& perm) {
  const std::size_t n = graph.node_count;
  if (perm.size() != n) throw Error("permutation: size does not match node count");
  std::vector<char> seen(n, 0);
  for (std::size_t p : perm) {
    if (p >= n || seen[p]) throw Error("permutation: not a bijection");
    seen[p] = 1;
  }

  Graph out;
  out.node_count = n;
  out.edges.reserve(graph.edges.size());
  for (const Edge& e : graph.edges) {
    std::size_t u = perm[e.u], v = perm[e.v];
    if (u > v) std::swap(u, v);
    out.edges.push_back({u, v, e.weight});
  }
  if (graph.node_labels) {
    std::vector<Label> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[perm[i]] = (*graph.node_labels)[i];
    out.node_labels = std::move(labels);
  }
  if (graph.node_attributes) {
    const RowMatrix& src = *graph.node_attributes;
    RowMatrix attrs(src.rows(), src.cols());
    for (std::size_t i = 0; i < n; ++i) attrs.row(perm[i]) = src.row(i);
    out.node_attributes = std::move(attrs);
  }
  return out;
}

inline std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

/// G(n, p): every unordered pair {i, j}, i < j, is an edge with probability p.
inline Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  if (n < 1) throw Error("erdos_renyi: n must be at least 1");
  if (!(p >= 0.0 && p <= 1.0)) throw Error("erdos_renyi: p must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Graph g;
  g.node_count = n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (coin(rng) < p) g.edges.push_back({i, j, 1.0});
    }
  }
  return g;
}

/// Removes round(noise * |E|) uniformly chosen edges (round half up).
/// Surviving edges keep their relative order.
inline Graph perturb_edges(const Graph& graph, double noise, std::uint64_t seed) {
  if (!(noise >= 0.0 && noise <= 1.0)) throw Error("perturb_edges: noise must lie in [0, 1]");
  const std::size_t m = graph.edges.size();
  const auto remove = static_cast<std::size_t>(std::floor(noise * static_cast<double>(m) + 0.5));

  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < remove; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, m - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  std::vector<char> drop(m, 0);
  for (std::size_t i = 0; i < remove; ++i) drop[idx[i]] = 1;

  Graph out = graph;
  out.edges.clear();
  for (std::size_t i = 0; i < m; ++i) {
    if (!drop[i]) out.edges.push_back(graph.edges[i]);
  }
  return out;
}

/// Replaces node attributes with the n x 1 matrix of neighbour counts.
inline Graph degree_as_attribute(const Graph& graph) {
  Graph out = graph;
  const auto deg = degrees(graph);
  RowMatrix attrs(graph.node_count, 1);
  for (std::size_t i = 0; i < graph.node_count; ++i) attrs(i, 0) = static_cast<double>(deg[i]);
  out.node_attributes = std::move(attrs);
  return out;
}

/// Replaces node labels with node degrees.
inline Graph degree_as_label(const Graph& graph) {
  Graph out = graph;
  const auto deg = degrees(graph);
  out.node_labels = std::vector<Label>(deg.begin(), deg.end());
  return out;
}

/// Z-scores every attribute dimension using the mean and population standard
/// deviation pooled over all nodes of all graphs. Constant dimensions become 0.
inline Dataset standardize_attributes(const Dataset& dataset) {
  std::optional<Eigen::Index> dim;
  for (std::size_t g = 0; g < dataset.graphs.size(); ++g) {
    const Graph& graph = dataset.graphs[g];
    if (!graph.node_attributes) {
      throw Error("standardize_attributes: graph " + std::to_string(g) + " has no attributes");
    }
    const Eigen::Index cols = graph.node_attributes->cols();
    if (dim && *dim != cols) {
      throw Error("standardize_attributes: attribute dimension mismatch at graph " +
                  std::to_string(g));
    }
    dim = cols;
  }
  Dataset out = dataset;
  if (!dim) return out;

  const Eigen::Index m = *dim;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(m);
  double count = 0.0;
  for (const Graph& graph : dataset.graphs) {
    sum += graph.node_attributes->colwise().sum().transpose();
    count += static_cast<double>(graph.node_attributes->rows());
  }
  if (count == 0.0) return out;
  const Eigen::VectorXd mean = sum / count;
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(m);
  for (const Graph& graph : dataset.graphs) {
    const RowMatrix centered = graph.node_attributes->rowwise() - mean.transpose();
    sq += centered.array().square().colwise().sum().matrix().transpose();
  }
  Eigen::VectorXd sd = (sq / count).cwiseSqrt();

  for (Graph& graph : out.graphs) {
    RowMatrix& attrs = *graph.node_attributes;
    for (Eigen::Index c = 0; c < m; ++c) {
      if (sd(c) > 0.0) {
        attrs.col(c) = (attrs.col(c).array() - mean(c)) / sd(c);
      } else {
        attrs.col(c).setZero();
      }
    }
  }
  return out;
}

}  // namespace wwl

#endif  // WWL_GRAPH_HPP
