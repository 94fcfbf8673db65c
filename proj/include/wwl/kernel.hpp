#ifndef WWL_KERNEL_HPP
#define WWL_KERNEL_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "wwl/dataset_io.hpp"
#include "wwl/embedding.hpp"
#include "wwl/error.hpp"
#include "wwl/ground_distance.hpp"
#include "wwl/ot.hpp"

namespace wwl {

struct KernelConfig {
  Scheme scheme = Scheme::categorical;
  int iterations = 3;  // H
  Solver solver = Solver::exact;
  double gamma = 0.0;  // entropic regularisation, sinkhorn only
  SinkhornOptions sinkhorn;
  std::vector<double> lambdas{1.0};
  bool standardize = false;
  unsigned threads = 0;  // 0: hardware concurrency

  GroundKind ground() const { return ground_kind_for(scheme); }
};

inline void validate(const KernelConfig& cfg) {
  if (cfg.iterations < 0) throw Error("config: H must be nonnegative");
  if (cfg.solver == Solver::sinkhorn && !(cfg.gamma > 0.0)) {
    throw Error("config: sinkhorn needs gamma > 0");
  }
  for (double l : cfg.lambdas) {
    if (!(l > 0.0)) throw Error("config: lambda must be positive");
  }
}

/// Wall-clock seconds spent per stage, summed over worker threads for the
/// pairwise stages.
struct StageTimings {
  double embedding = 0.0;
  double ground_distance = 0.0;
  double transport = 0.0;
  double total = 0.0;
};

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("WWL_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i, j) for every pair i < j of [0, n) on `threads` workers.
/// Pairs are claimed from a shared counter; fn must write disjoint outputs.
inline void for_each_pair(std::size_t n, unsigned threads,
                          const std::function<void(std::size_t, std::size_t)>& fn) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n * (n > 0 ? n - 1 : 0) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(pairs.size())));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto work = [&] {
    for (std::size_t p = next++; p < pairs.size(); p = next++) {
      try {
        fn(pairs[p].first, pairs[p].second);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = pairs.size();
      }
    }
  };
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

/// Graph Wasserstein distances between precomputed embeddings. Only the
/// upper triangle is solved; the diagonal is 0 by definition.
inline MatrixArtifact gwd_matrix(const std::vector<EmbeddingMatrix>& embeddings,
                                 const KernelConfig& cfg, const std::string& dataset_name = {},
                                 StageTimings* timings = nullptr) {
  validate(cfg);
  using clock = std::chrono::steady_clock;
  const std::size_t n = embeddings.size();
  const GroundKind kind = cfg.ground();

  MatrixArtifact art;
  art.kind = MatrixKind::distance;
  art.values = RowMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::mutex time_mutex;
  double ground_s = 0.0, ot_s = 0.0;

  for_each_pair(n, resolve_threads(cfg.threads), [&](std::size_t i, std::size_t j) {
    const auto t0 = clock::now();
    const GroundDistanceMatrix m = ground_distance(embeddings[i], embeddings[j], kind);
    const auto t1 = clock::now();
    const double d = wasserstein(m.values, cfg.solver, cfg.gamma, cfg.sinkhorn).distance;
    const auto t2 = clock::now();
    art.values(i, j) = art.values(j, i) = std::max(0.0, d);
    std::lock_guard lock(time_mutex);
    ground_s += std::chrono::duration<double>(t1 - t0).count();
    ot_s += std::chrono::duration<double>(t2 - t1).count();
  });

  MatrixMetadata& md = art.metadata;
  md.scheme = to_string(cfg.scheme);
  md.h = cfg.iterations;
  md.ground_distance = to_string(kind);
  md.solver = to_string(cfg.solver);
  if (cfg.solver == Solver::sinkhorn) md.gamma = cfg.gamma;
  md.dataset = dataset_name;
  if (timings) {
    timings->ground_distance += ground_s;
    timings->transport += ot_s;
  }
  return art;
}

/// Embeds the dataset under `cfg` (standardising attributes first when
/// requested) and returns its GWD matrix.
inline MatrixArtifact gwd_matrix(const Dataset& dataset, const KernelConfig& cfg,
                                 StageTimings* timings = nullptr) {
  validate(cfg);
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  std::vector<EmbeddingMatrix> emb;
  if (cfg.standardize && cfg.scheme == Scheme::continuous) {
    emb = embed(standardize_attributes(dataset), cfg.scheme, cfg.iterations);
  } else {
    emb = embed(dataset, cfg.scheme, cfg.iterations);
  }
  const auto t1 = clock::now();
  if (timings) timings->embedding += std::chrono::duration<double>(t1 - t0).count();
  auto art = gwd_matrix(emb, cfg, dataset.name, timings);
  if (timings) timings->total += std::chrono::duration<double>(clock::now() - t0).count();
  return art;
}

/// Laplacian kernel exp(-lambda * D) of a distance artifact.
inline MatrixArtifact wwl_kernel(const MatrixArtifact& distance, double lambda) {
  if (distance.kind != MatrixKind::distance) throw Error("wwl_kernel: expected a distance matrix");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error("wwl_kernel: lambda must be positive");
  MatrixArtifact k;
  k.kind = MatrixKind::kernel;
  k.values = (-lambda * distance.values.array()).exp().matrix();
  k.values.diagonal().setOnes();
  k.metadata = distance.metadata;
  k.metadata.lambda = lambda;
  return k;
}

// ---------------------------------------------------------------------------
// Baseline kernels
// ---------------------------------------------------------------------------

namespace detail {

template <typename Key>
double histogram_dot(const std::map<Key, double>& a, const std::map<Key, double>& b) {
  double s = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      s += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return s;
}

template <typename Key>
MatrixArtifact histogram_kernel(const std::vector<std::map<Key, double>>& hist,
                                const std::string& dataset_name) {
  const auto n = static_cast<Eigen::Index>(hist.size());
  MatrixArtifact k;
  k.kind = MatrixKind::kernel;
  k.values.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) k.values(i, j) = k.values(j, i) = histogram_dot(hist[i], hist[j]);
  }
  k.metadata.scheme = "categorical";
  k.metadata.dataset = dataset_name;
  return k;
}

inline const std::vector<Label>& require_labels(const Dataset& ds, std::size_t g) {
  if (!ds.graphs[g].node_labels) {
    throw Error("dataset " + ds.name + ": graph " + std::to_string(g) + " has no node labels");
  }
  return *ds.graphs[g].node_labels;
}

inline void require_continuous(const std::vector<EmbeddingMatrix>& emb) {
  for (const auto& e : emb) {
    if (e.scheme != Scheme::continuous) throw Error("baseline kernel: continuous embeddings required");
    if (e.values.cols() != emb.front().values.cols()) {
      throw Error("baseline kernel: embedding dimension mismatch");
    }
  }
}

}  // namespace detail

/// V: dot product of node-label count histograms.
inline MatrixArtifact vertex_histogram_kernel(const Dataset& ds) {
  std::vector<std::map<Label, double>> hist(ds.graphs.size());
  for (std::size_t g = 0; g < ds.graphs.size(); ++g) {
    for (Label l : detail::require_labels(ds, g)) hist[g][l] += 1.0;
  }
  return detail::histogram_kernel(hist, ds.name);
}

/// E: dot product of histograms over sorted endpoint-label pairs.
inline MatrixArtifact edge_histogram_kernel(const Dataset& ds) {
  std::vector<std::map<std::pair<Label, Label>, double>> hist(ds.graphs.size());
  for (std::size_t g = 0; g < ds.graphs.size(); ++g) {
    const auto& labels = detail::require_labels(ds, g);
    for (const Edge& e : ds.graphs[g].edges) {
      const Label a = labels[e.u], b = labels[e.v];
      hist[g][{std::min(a, b), std::max(a, b)}] += 1.0;
    }
  }
  return detail::histogram_kernel(hist, ds.name);
}

/// VH-C: RBF kernel between column sums of the node embeddings. gamma_rbf
/// defaults to 1 / (embedding width).
inline MatrixArtifact vh_c_kernel(const std::vector<EmbeddingMatrix>& emb,
                                  std::optional<double> gamma_rbf = std::nullopt,
                                  const std::string& dataset_name = {}) {
  detail::require_continuous(emb);
  const auto n = static_cast<Eigen::Index>(emb.size());
  const double gamma =
      gamma_rbf.value_or(emb.empty() ? 1.0 : 1.0 / static_cast<double>(emb.front().values.cols()));
  std::vector<Eigen::RowVectorXd> sums;
  for (const auto& e : emb) sums.push_back(e.values.colwise().sum());
  MatrixArtifact k;
  k.kind = MatrixKind::kernel;
  k.values.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      k.values(i, j) = k.values(j, i) = std::exp(-gamma * (sums[i] - sums[j]).squaredNorm());
    }
  }
  k.metadata.scheme = "continuous";
  if (!emb.empty()) k.metadata.h = emb.front().iterations;
  k.metadata.gamma = gamma;
  k.metadata.dataset = dataset_name;
  return k;
}

/// RBF-WL: sum of node-pair RBF similarities between two graphs.
inline MatrixArtifact rbf_wl_kernel(const std::vector<EmbeddingMatrix>& emb,
                                    std::optional<double> gamma_rbf = std::nullopt,
                                    const std::string& dataset_name = {}) {
  detail::require_continuous(emb);
  const auto n = static_cast<Eigen::Index>(emb.size());
  const double gamma =
      gamma_rbf.value_or(emb.empty() ? 1.0 : 1.0 / static_cast<double>(emb.front().values.cols()));
  MatrixArtifact k;
  k.kind = MatrixKind::kernel;
  k.values.resize(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a; b < n; ++b) {
      const RowMatrix& x = emb[a].values;
      const RowMatrix& y = emb[b].values;
      double s = 0.0;
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < y.rows(); ++j) s += std::exp(-gamma * (x.row(i) - y.row(j)).squaredNorm());
      }
      k.values(a, b) = k.values(b, a) = s;
    }
  }
  k.metadata.scheme = "continuous";
  if (!emb.empty()) k.metadata.h = emb.front().iterations;
  k.metadata.gamma = gamma;
  k.metadata.dataset = dataset_name;
  return k;
}

// ---------------------------------------------------------------------------
// Definiteness checks
// ---------------------------------------------------------------------------

struct SpectralReport {
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double tolerance = 1e-8;
  bool passed = false;
};

/// PSD iff lambda_min >= -tol * max(1, lambda_max).
inline SpectralReport psd_check(const RowMatrix& k, double tol = 1e-8) {
  if (k.rows() != k.cols()) throw Error("psd_check: matrix is not square");
  if ((k - k.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
    throw Error("psd_check: matrix is not symmetric");
  }
  SpectralReport rep;
  rep.tolerance = tol;
  if (k.rows() == 0) {
    rep.passed = true;
    return rep;
  }
  const Eigen::MatrixXd sym = 0.5 * (k + k.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("psd_check: eigensolver failed");
  rep.min_eigenvalue = es.eigenvalues().minCoeff();
  rep.max_eigenvalue = es.eigenvalues().maxCoeff();
  rep.passed = rep.min_eigenvalue >= -tol * std::max(1.0, rep.max_eigenvalue);
  return rep;
}

inline SpectralReport psd_check(const MatrixArtifact& k, double tol = 1e-8) {
  if (k.kind != MatrixKind::kernel) throw Error("psd_check: kind mismatch (expected kernel)");
  return psd_check(k.values, tol);
}

/// Conditional negative definiteness via PSD of -1/2 * J D J,
/// J = I - (1/N) 11^T.
inline SpectralReport cnd_check(const RowMatrix& d, double tol = 1e-8) {
  if (d.rows() != d.cols()) throw Error("cnd_check: matrix is not square");
  if ((d - d.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
    throw Error("cnd_check: matrix is not symmetric");
  }
  if (d.rows() && d.diagonal().cwiseAbs().maxCoeff() > 1e-9) {
    throw Error("cnd_check: nonzero diagonal");
  }
  const Eigen::Index n = d.rows();
  if (n == 0) return psd_check(d, tol);
  const Eigen::MatrixXd j =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  const Eigen::MatrixXd dd = d;
  const Eigen::MatrixXd b = -0.5 * j * dd * j;
  return psd_check(RowMatrix(0.5 * (b + b.transpose())), tol);
}

inline SpectralReport cnd_check(const MatrixArtifact& d, double tol = 1e-8) {
  if (d.kind != MatrixKind::distance) throw Error("cnd_check: kind mismatch (expected distance)");
  return cnd_check(d.values, tol);
}

}  // namespace wwl

#endif  // WWL_KERNEL_HPP
