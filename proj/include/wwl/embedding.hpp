#ifndef WWL_EMBEDDING_HPP
#define WWL_EMBEDDING_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "wwl/error.hpp"
#include "wwl/graph.hpp"

namespace wwl {

enum class Scheme { categorical, continuous };

inline const char* to_string(Scheme s) {
  return s == Scheme::categorical ? "categorical" : "continuous";
}

inline Scheme parse_scheme(const std::string& s) {
  if (s == "categorical") return Scheme::categorical;
  if (s == "continuous") return Scheme::continuous;
  throw Error("unknown scheme '" + s + "'");
}

/// Node features of one graph for iterations 0..H, concatenated column-block
/// wise (iteration 0 first). Row i belongs to node i. Categorical entries are
/// integer label ids stored exactly.
struct EmbeddingMatrix {
  std::size_t graph_id = 0;
  Scheme scheme = Scheme::categorical;
  int iterations = 0;         // H
  Eigen::Index feature_dim = 1;  // m, width of one iteration block
  RowMatrix values;

  Eigen::Index node_count() const { return values.rows(); }
};

/// Perfect hash for WL relabelling, shared by every graph of a dataset.
/// Initial labels are remapped first-come to 0..k-1; compressed labels are
/// then handed out consecutively from k.
class LabelDictionary {
 public:
  Label initial(Label raw) {
    auto [it, inserted] = initial_.try_emplace(raw, next_id_);
    if (inserted) ++next_id_;
    return it->second;
  }

  /// `neighbours` must already be sorted ascending.
  Label compress(Label own, const std::vector<Label>& neighbours) {
    auto [it, inserted] = compressed_.try_emplace(std::make_pair(own, neighbours), next_id_);
    if (inserted) ++next_id_;
    return it->second;
  }

  Label next_id() const { return next_id_; }
  std::size_t size() const { return initial_.size() + compressed_.size(); }

 private:
  std::map<Label, Label> initial_;
  std::map<std::pair<Label, std::vector<Label>>, Label> compressed_;
  Label next_id_ = 0;
};

/// WL labelling scheme over a whole dataset with one shared dictionary.
/// Each iteration sweeps graphs then nodes in ascending order, so the
/// assigned ids are deterministic.
inline std::vector<EmbeddingMatrix> wl_refine_categorical(const Dataset& dataset, int iterations) {
  if (iterations < 0) throw Error("wl_refine_categorical: H must be nonnegative");
  const std::size_t count = dataset.graphs.size();
  const auto blocks = static_cast<Eigen::Index>(iterations) + 1;

  std::vector<EmbeddingMatrix> out(count);
  std::vector<std::vector<std::vector<std::pair<std::size_t, double>>>> adj(count);
  std::vector<std::vector<Label>> current(count);
  LabelDictionary dict;

  for (std::size_t g = 0; g < count; ++g) {
    const Graph& graph = dataset.graphs[g];
    if (!graph.node_labels) {
      throw Error("dataset " + dataset.name + ": graph " + std::to_string(g) +
                  " has no node labels (categorical scheme)");
    }
    adj[g] = adjacency(graph);
    auto& labels = current[g];
    labels.resize(graph.node_count);
    for (std::size_t v = 0; v < graph.node_count; ++v) labels[v] = dict.initial((*graph.node_labels)[v]);

    EmbeddingMatrix& e = out[g];
    e.graph_id = g;
    e.scheme = Scheme::categorical;
    e.iterations = iterations;
    e.feature_dim = 1;
    e.values.resize(static_cast<Eigen::Index>(graph.node_count), blocks);
    for (std::size_t v = 0; v < graph.node_count; ++v) e.values(v, 0) = static_cast<double>(labels[v]);
  }

  std::vector<Label> neighbours;
  for (int h = 1; h <= iterations; ++h) {
    for (std::size_t g = 0; g < count; ++g) {
      const auto& prev = current[g];
      std::vector<Label> next(prev.size());
      for (std::size_t v = 0; v < prev.size(); ++v) {
        neighbours.clear();
        for (const auto& [u, w] : adj[g][v]) neighbours.push_back(prev[u]);
        std::sort(neighbours.begin(), neighbours.end());
        next[v] = dict.compress(prev[v], neighbours);
        out[g].values(v, h) = static_cast<double>(next[v]);
      }
      current[g] = std::move(next);
    }
  }
  return out;
}

/// Continuous propagation: each step halves the node's own attributes with
/// the weighted neighbourhood average. Isolated nodes keep their attributes.
inline EmbeddingMatrix propagate_continuous(const Graph& graph, int iterations,
                                            std::size_t graph_id = 0) {
  if (iterations < 0) throw Error("propagate_continuous: H must be nonnegative");
  if (!graph.node_attributes) {
    throw Error("graph " + std::to_string(graph_id) + " has no node attributes (continuous scheme)");
  }
  const RowMatrix& a0 = *graph.node_attributes;
  const Eigen::Index n = a0.rows(), m = a0.cols();
  const auto adj = adjacency(graph);

  EmbeddingMatrix e;
  e.graph_id = graph_id;
  e.scheme = Scheme::continuous;
  e.iterations = iterations;
  e.feature_dim = m;
  e.values.resize(n, m * (iterations + 1));
  e.values.leftCols(m) = a0;

  RowMatrix cur = a0, next(n, m);
  for (int h = 1; h <= iterations; ++h) {
    for (Eigen::Index v = 0; v < n; ++v) {
      const auto& nb = adj[v];
      if (nb.empty()) {
        next.row(v) = cur.row(v);
        continue;
      }
      Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(m);
      for (const auto& [u, w] : nb) acc += w * cur.row(static_cast<Eigen::Index>(u));
      next.row(v) = 0.5 * (cur.row(v) + acc / static_cast<double>(nb.size()));
    }
    std::swap(cur, next);
    e.values.middleCols(m * h, m) = cur;
  }
  return e;
}

inline std::vector<EmbeddingMatrix> embed(const Dataset& dataset, Scheme scheme, int iterations) {
  if (scheme == Scheme::categorical) return wl_refine_categorical(dataset, iterations);

  std::vector<EmbeddingMatrix> out;
  out.reserve(dataset.graphs.size());
  for (std::size_t g = 0; g < dataset.graphs.size(); ++g) {
    if (!dataset.graphs[g].node_attributes) {
      throw Error("dataset " + dataset.name + ": graph " + std::to_string(g) +
                  " has no node attributes (continuous scheme)");
    }
    out.push_back(propagate_continuous(dataset.graphs[g], iterations, g));
  }
  return out;
}

}  // namespace wwl

#endif  // WWL_EMBEDDING_HPP
