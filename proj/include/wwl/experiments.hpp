#ifndef WWL_EXPERIMENTS_HPP
#define WWL_EXPERIMENTS_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <vector>

#include "wwl/embedding.hpp"
#include "wwl/graph.hpp"
#include "wwl/ground_distance.hpp"
#include "wwl/kernel.hpp"
#include "wwl/ot.hpp"

namespace wwl {

/// splitmix64; derives independent stream seeds from (seed, tags).
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return mix_seed(mix_seed(mix_seed(seed) ^ a) ^ (b * 0x632be59bd9b4e019ULL));
}

inline double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Sample standard deviation (n - 1).
inline double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

/// Spearman rank correlation (average ranks for ties).
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double mx = mean(rx), my = mean(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

// ---------------------------------------------------------------------------
// Robustness of the graph distance to edge-removal noise
// ---------------------------------------------------------------------------

struct RobustnessOptions {
  std::size_t nodes = 30;
  double edge_probability = 0.2;
  std::vector<double> noise{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::size_t trials = 50;
  int iterations = 2;  // H for both distances
  std::uint64_t seed = 0;
};

struct RobustnessRow {
  double noise = 0.0;
  double wwl_mean = 0.0, wwl_sd = 0.0;
  double wl_mean = 0.0, wl_sd = 0.0;
  std::size_t resampled = 0;  // reference graphs redrawn because D(G, G'') was 0
};

namespace detail {

// W1 between two graphs: continuous propagation on degree attributes.
inline double wwl_degree_distance(const Graph& a, const Graph& b, int h) {
  const auto ea = propagate_continuous(degree_as_attribute(a), h, 0);
  const auto eb = propagate_continuous(degree_as_attribute(b), h, 1);
  return wasserstein_exact(euclidean_matrix(ea, eb).values, false).distance;
}

// W1 under WL Hamming distance with degrees as categorical labels. The three
// graphs share one label dictionary.
inline std::pair<double, double> wl_degree_distances(const Graph& g, const Graph& perturbed,
                                                     const Graph& reference, int h) {
  Dataset ds;
  ds.name = "robustness";
  ds.graphs = {degree_as_label(g), degree_as_label(perturbed), degree_as_label(reference)};
  ds.graph_labels = {0, 0, 0};
  const auto emb = wl_refine_categorical(ds, h);
  const double near = wasserstein_exact(hamming_matrix(emb[0], emb[1]).values, false).distance;
  const double far = wasserstein_exact(hamming_matrix(emb[0], emb[2]).values, false).distance;
  return {near, far};
}

}  // namespace detail

/// For each trial, draws G and an independent G'' from G(n, p) and a node
/// permutation; for every noise level G' = perturb_edges(permute(G)). The
/// relative distance D(G, G') / D(G, G'') is reported for the continuous
/// WWL distance on degree attributes and for the WL Hamming distance on
/// degree labels. The base graphs of a trial are shared across noise levels
/// and the removal sets are nested.
inline std::vector<RobustnessRow> run_robustness(const RobustnessOptions& opt) {
  std::vector<std::vector<double>> wwl(opt.noise.size()), wl(opt.noise.size());
  std::vector<std::size_t> resampled(opt.noise.size(), 0);

  for (std::size_t t = 0; t < opt.trials; ++t) {
    const Graph g = erdos_renyi(opt.nodes, opt.edge_probability, derive_seed(opt.seed, 1, t));
    const Graph permuted = permute(g, random_permutation(opt.nodes, derive_seed(opt.seed, 2, t)));
    const std::uint64_t removal_seed = derive_seed(opt.seed, 3, t);

    Graph reference;
    double wwl_far = 0.0, wl_far = 0.0;
    std::size_t redraws = 0;
    for (std::uint64_t attempt = 0;; ++attempt) {
      reference = erdos_renyi(opt.nodes, opt.edge_probability,
                              derive_seed(opt.seed, 4, t * 1000 + attempt));
      wwl_far = detail::wwl_degree_distance(g, reference, opt.iterations);
      wl_far = detail::wl_degree_distances(g, g, reference, opt.iterations).second;
      if (wwl_far > 0.0 && wl_far > 0.0) break;
      ++redraws;
    }

    for (std::size_t l = 0; l < opt.noise.size(); ++l) {
      const Graph perturbed = perturb_edges(permuted, opt.noise[l], removal_seed);
      wwl[l].push_back(detail::wwl_degree_distance(g, perturbed, opt.iterations) / wwl_far);
      const auto [near, far] = detail::wl_degree_distances(g, perturbed, reference, opt.iterations);
      wl[l].push_back(near / far);
      resampled[l] += redraws;
    }
  }

  std::vector<RobustnessRow> rows;
  for (std::size_t l = 0; l < opt.noise.size(); ++l) {
    rows.push_back({opt.noise[l], mean(wwl[l]), stddev(wwl[l]), mean(wl[l]), stddev(wl[l]),
                    resampled[l]});
  }
  return rows;
}

inline void write_robustness_table(std::ostream& out, const std::vector<RobustnessRow>& rows) {
  out << "noise\twwl_mean\twwl_sd\twl_mean\twl_sd\tresampled\n";
  for (const auto& r : rows) {
    out << r.noise << '\t' << r.wwl_mean << '\t' << r.wwl_sd << '\t' << r.wl_mean << '\t' << r.wl_sd
        << '\t' << r.resampled << '\n';
  }
}

// ---------------------------------------------------------------------------
// Runtime of exact versus entropic transport on random embeddings
// ---------------------------------------------------------------------------

struct BenchOptions {
  std::size_t graphs = 100;
  std::vector<double> avg_nodes{10, 25, 50, 100, 200};
  double node_sd_fraction = 0.1;  // sd of the node count relative to its mean
  Eigen::Index dim = 8;
  double gamma = 0.5;
  SinkhornOptions sinkhorn;
  std::uint64_t seed = 0;
};

struct BenchRow {
  double avg_nodes = 0.0;
  std::size_t graphs = 0;
  double realised_avg_nodes = 0.0;
  double distance_time = 0.0;       // ground distance matrices, seconds
  double exact_total_time = 0.0;    // distance_time + exact OT
  double sinkhorn_total_time = 0.0; // distance_time + Sinkhorn OT
  double mean_relative_gap = 0.0;   // mean (sinkhorn - exact) / exact
};

inline std::vector<EmbeddingMatrix> random_embeddings(std::size_t graphs, double avg_nodes,
                                                      double sd_fraction, Eigen::Index dim,
                                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> size_dist(avg_nodes, sd_fraction * avg_nodes);
  std::normal_distribution<double> value(0.0, 1.0);
  std::vector<EmbeddingMatrix> out(graphs);
  for (std::size_t g = 0; g < graphs; ++g) {
    const auto n = std::max<Eigen::Index>(1, std::lround(size_dist(rng)));
    EmbeddingMatrix& e = out[g];
    e.graph_id = g;
    e.scheme = Scheme::continuous;
    e.iterations = 0;
    e.feature_dim = dim;
    e.values.resize(n, dim);
    for (Eigen::Index i = 0; i < e.values.size(); ++i) e.values.data()[i] = value(rng);
  }
  return out;
}

/// Single-threaded timing of all pairwise distances for each average size.
inline std::vector<BenchRow> run_bench(const BenchOptions& opt) {
  using clock = std::chrono::steady_clock;
  const auto secs = [](auto a, auto b) { return std::chrono::duration<double>(b - a).count(); };
  std::vector<BenchRow> rows;
  for (std::size_t s = 0; s < opt.avg_nodes.size(); ++s) {
    const auto emb = random_embeddings(opt.graphs, opt.avg_nodes[s], opt.node_sd_fraction, opt.dim,
                                       derive_seed(opt.seed, 7, s));
    BenchRow row;
    row.avg_nodes = opt.avg_nodes[s];
    row.graphs = opt.graphs;
    double nodes = 0.0;
    for (const auto& e : emb) nodes += static_cast<double>(e.node_count());
    row.realised_avg_nodes = emb.empty() ? 0.0 : nodes / static_cast<double>(emb.size());

    double exact_ot = 0.0, sinkhorn_ot = 0.0, gap = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < emb.size(); ++i) {
      for (std::size_t j = i + 1; j < emb.size(); ++j) {
        const auto t0 = clock::now();
        const RowMatrix m = euclidean_matrix(emb[i], emb[j]).values;
        const auto t1 = clock::now();
        const double exact = wasserstein_exact(m, false).distance;
        const auto t2 = clock::now();
        const double approx = wasserstein_sinkhorn(m, opt.gamma, opt.sinkhorn, false).distance;
        const auto t3 = clock::now();
        row.distance_time += secs(t0, t1);
        exact_ot += secs(t1, t2);
        sinkhorn_ot += secs(t2, t3);
        if (exact > 0.0) gap += (approx - exact) / exact;
        ++pairs;
      }
    }
    row.exact_total_time = row.distance_time + exact_ot;
    row.sinkhorn_total_time = row.distance_time + sinkhorn_ot;
    row.mean_relative_gap = pairs ? gap / static_cast<double>(pairs) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

inline void write_bench_table(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "avg_nodes\tgraphs\trealised_avg_nodes\tdistance_time\texact_total_time\t"
         "sinkhorn_total_time\tmean_relative_gap\n";
  for (const auto& r : rows) {
    out << r.avg_nodes << '\t' << r.graphs << '\t' << r.realised_avg_nodes << '\t'
        << r.distance_time << '\t' << r.exact_total_time << '\t' << r.sinkhorn_total_time << '\t'
        << r.mean_relative_gap << '\n';
  }
}

}  // namespace wwl

#endif  // WWL_EXPERIMENTS_HPP
