#ifndef WWL_NETWORK_SIMPLEX_HPP
#define WWL_NETWORK_SIMPLEX_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "wwl/graph.hpp"

namespace wwl::detail {

/// Primal network simplex for the uncapacitated transportation problem on a
/// complete bipartite graph: every row node supplies `row_supply` units,
/// every column node demands `col_demand` units, arc (i, j) costs cost(i, j).
///
/// The spanning tree is rooted at an artificial node connected to every node
/// by an artificial arc, which makes the initial tree strongly feasible. The
/// leaving-arc rule keeps it strongly feasible, so degenerate pivots cannot
/// cycle. Flows are integral throughout.
class TransportSimplex {
 public:
  enum class Status { optimal, max_pivots, infeasible };

  TransportSimplex(const RowMatrix& cost, std::int64_t row_supply, std::int64_t col_demand)
      : cost_(cost),
        rows_(static_cast<std::int64_t>(cost.rows())),
        cols_(static_cast<std::int64_t>(cost.cols())),
        real_arcs_(rows_ * cols_),
        node_count_(rows_ + cols_),
        root_(node_count_) {
    const std::int64_t all_nodes = node_count_ + 1;
    const std::int64_t all_arcs = real_arcs_ + node_count_;
    parent_.assign(all_nodes, -1);
    pred_.assign(all_nodes, -1);
    forward_.assign(all_nodes, 0);
    depth_.assign(all_nodes, 0);
    pi_.assign(all_nodes, 0.0);
    tree_adj_.assign(all_nodes, {});
    flow_.assign(all_arcs, 0);
    art_cost_ = (cost.size() ? cost.maxCoeff() : 0.0) + 1.0;
    art_cost_ *= static_cast<double>(node_count_);

    // Artificial arcs: row u -> root (cost 0), root -> column u (big cost).
    for (std::int64_t u = 0; u < node_count_; ++u) {
      const std::int64_t a = real_arcs_ + u;
      parent_[u] = root_;
      pred_[u] = a;
      depth_[u] = 1;
      tree_adj_[u].push_back(a);
      tree_adj_[root_].push_back(a);
      if (u < rows_) {
        forward_[u] = 1;
        flow_[a] = row_supply;
        pi_[u] = 0.0;
      } else {
        forward_[u] = 0;
        flow_[a] = col_demand;
        pi_[u] = art_cost_;
      }
    }
    block_size_ = std::max<std::int64_t>(
        static_cast<std::int64_t>(std::sqrt(static_cast<double>(real_arcs_))), 10);
  }

  Status solve(std::uint64_t max_pivots = 100'000'000) {
    initial_pivots();
    pivots_ = 0;
    while (find_entering_arc()) {
      if (pivots_++ >= max_pivots) return Status::max_pivots;
      pivot();
    }
    for (std::int64_t a = real_arcs_; a < real_arcs_ + node_count_; ++a) {
      if (flow_[a] != 0) return Status::infeasible;
    }
    return Status::optimal;
  }

  /// Integral flow on arc (i, j).
  std::int64_t flow(Eigen::Index i, Eigen::Index j) const { return flow_[i * cols_ + j]; }
  std::uint64_t pivots() const { return pivots_; }

 private:
  std::int64_t source(std::int64_t a) const {
    if (a < real_arcs_) return a / cols_;
    const std::int64_t u = a - real_arcs_;
    return u < rows_ ? u : root_;
  }
  std::int64_t target(std::int64_t a) const {
    if (a < real_arcs_) return rows_ + a % cols_;
    const std::int64_t u = a - real_arcs_;
    return u < rows_ ? root_ : u;
  }
  double arc_cost(std::int64_t a) const {
    if (a < real_arcs_) return cost_.data()[a];
    return a - real_arcs_ < rows_ ? 0.0 : art_cost_;
  }
  double reduced_cost(std::int64_t a) const {
    return arc_cost(a) + pi_[source(a)] - pi_[target(a)];
  }
  bool improving(std::int64_t a, double rc) const {
    const double scale =
        std::max({std::abs(pi_[source(a)]), std::abs(pi_[target(a)]), std::abs(arc_cost(a))});
    return rc < -std::numeric_limits<double>::epsilon() * scale;
  }

  // Block search: scan arcs cyclically, return the best candidate of the
  // first block that contains an improving arc.
  bool find_entering_arc() {
    double best = 0.0;
    std::int64_t best_arc = -1;
    std::int64_t a = next_arc_;
    std::int64_t left = block_size_;
    for (std::int64_t scanned = 0; scanned < real_arcs_; ++scanned, ++a) {
      if (a == real_arcs_) a = 0;
      const double rc = reduced_cost(a);
      if (rc < best) {
        best = rc;
        best_arc = a;
      }
      if (--left == 0) {
        if (best_arc >= 0 && improving(best_arc, best)) {
          entering_ = best_arc;
          next_arc_ = a + 1 == real_arcs_ ? 0 : a + 1;
          return true;
        }
        left = block_size_;
      }
    }
    if (best_arc >= 0 && improving(best_arc, best)) {
      entering_ = best_arc;
      next_arc_ = a >= real_arcs_ ? 0 : a;
      return true;
    }
    return false;
  }

  // Cheapest incoming arc of every column node.
  void initial_pivots() {
    for (std::int64_t j = 0; j < cols_; ++j) {
      std::int64_t best_arc = -1;
      double best = std::numeric_limits<double>::infinity();
      for (std::int64_t i = 0; i < rows_; ++i) {
        const std::int64_t a = i * cols_ + j;
        if (cost_.data()[a] < best) {
          best = cost_.data()[a];
          best_arc = a;
        }
      }
      if (best_arc < 0) continue;
      const double rc = reduced_cost(best_arc);
      if (improving(best_arc, rc)) {
        entering_ = best_arc;
        pivot();
      }
    }
  }

  void pivot() {
    const std::int64_t first = source(entering_);
    const std::int64_t second = target(entering_);

    std::int64_t u = first, v = second;
    while (u != v) {
      if (depth_[u] >= depth_[v]) {
        u = parent_[u];
      } else {
        v = parent_[v];
      }
    }
    const std::int64_t join = u;

    // Leaving arc: the last blocking arc met when walking the cycle in its
    // orientation starting from the join node.
    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
    std::int64_t delta = kInf, u_out = -1;
    int side = 0;
    for (std::int64_t w = first; w != join; w = parent_[w]) {
      const std::int64_t d = forward_[w] ? flow_[pred_[w]] : kInf;
      if (d < delta) {
        delta = d;
        u_out = w;
        side = 1;
      }
    }
    for (std::int64_t w = second; w != join; w = parent_[w]) {
      const std::int64_t d = forward_[w] ? kInf : flow_[pred_[w]];
      if (d <= delta) {
        delta = d;
        u_out = w;
        side = 2;
      }
    }
    // An uncapacitated transportation cycle always has a decreasing arc.
    const std::int64_t u_in = side == 1 ? first : second;
    const std::int64_t v_in = side == 1 ? second : first;

    if (delta > 0) {
      flow_[entering_] += delta;
      for (std::int64_t w = first; w != join; w = parent_[w]) {
        flow_[pred_[w]] += forward_[w] ? -delta : delta;
      }
      for (std::int64_t w = second; w != join; w = parent_[w]) {
        flow_[pred_[w]] += forward_[w] ? delta : -delta;
      }
    }

    const std::int64_t leaving = pred_[u_out];
    erase_tree_arc(u_out, leaving);
    erase_tree_arc(parent_[u_out], leaving);
    tree_adj_[first].push_back(entering_);
    tree_adj_[second].push_back(entering_);
    rehang(u_in, v_in, entering_);
  }

  void erase_tree_arc(std::int64_t node, std::int64_t arc) {
    auto& adj = tree_adj_[node];
    auto it = std::find(adj.begin(), adj.end(), arc);
    *it = adj.back();
    adj.pop_back();
  }

  // Hangs the subtree containing `top` below `new_parent` via `arc` and
  // recomputes parent pointers, depths and potentials inside it.
  void rehang(std::int64_t top, std::int64_t new_parent, std::int64_t arc) {
    attach(top, new_parent, arc);
    stack_.clear();
    stack_.push_back(top);
    while (!stack_.empty()) {
      const std::int64_t w = stack_.back();
      stack_.pop_back();
      for (std::int64_t a : tree_adj_[w]) {
        if (a == pred_[w]) continue;
        const std::int64_t child = source(a) == w ? target(a) : source(a);
        attach(child, w, a);
        stack_.push_back(child);
      }
    }
  }

  void attach(std::int64_t node, std::int64_t par, std::int64_t arc) {
    parent_[node] = par;
    pred_[node] = arc;
    depth_[node] = depth_[par] + 1;
    const bool fwd = source(arc) == node;
    forward_[node] = fwd;
    pi_[node] = fwd ? pi_[par] - arc_cost(arc) : pi_[par] + arc_cost(arc);
  }

  const RowMatrix& cost_;
  std::int64_t rows_, cols_, real_arcs_, node_count_, root_;
  double art_cost_ = 0.0;

  std::vector<std::int64_t> parent_, pred_, depth_;
  std::vector<char> forward_;
  std::vector<double> pi_;
  std::vector<std::vector<std::int64_t>> tree_adj_;
  std::vector<std::int64_t> flow_;

  std::int64_t block_size_ = 10;
  std::int64_t next_arc_ = 0;
  std::int64_t entering_ = -1;
  std::uint64_t pivots_ = 0;
  std::vector<std::int64_t> stack_;
};

}  // namespace wwl::detail

#endif  // WWL_NETWORK_SIMPLEX_HPP
