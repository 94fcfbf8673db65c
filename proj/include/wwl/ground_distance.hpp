#ifndef WWL_GROUND_DISTANCE_HPP
#define WWL_GROUND_DISTANCE_HPP

#include <cmath>
#include <string>

#include "wwl/embedding.hpp"
#include "wwl/error.hpp"

namespace wwl {

enum class GroundKind { hamming, euclidean };

inline const char* to_string(GroundKind k) {
  return k == GroundKind::hamming ? "hamming" : "euclidean";
}

inline GroundKind ground_kind_for(Scheme s) {
  return s == Scheme::categorical ? GroundKind::hamming : GroundKind::euclidean;
}

struct GroundDistanceMatrix {
  RowMatrix values;
  GroundKind kind = GroundKind::hamming;
  int iterations = 0;
  Eigen::Index feature_dim = 1;
};

/// Normalised Hamming distance over the H+1 label columns (exact equality).
inline GroundDistanceMatrix hamming_matrix(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
  if (a.scheme != Scheme::categorical || b.scheme != Scheme::categorical) {
    throw Error("hamming_matrix: both embeddings must be categorical");
  }
  if (a.iterations != b.iterations || a.values.cols() != b.values.cols()) {
    throw Error("hamming_matrix: iteration count mismatch");
  }
  const Eigen::Index n = a.values.rows(), k = b.values.rows(), f = a.values.cols();
  GroundDistanceMatrix d;
  d.kind = GroundKind::hamming;
  d.iterations = a.iterations;
  d.feature_dim = 1;
  d.values.resize(n, k);
  const double scale = 1.0 / static_cast<double>(f);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      int differ = 0;
      for (Eigen::Index c = 0; c < f; ++c) differ += a.values(i, c) != b.values(j, c);
      d.values(i, j) = differ * scale;
    }
  }
  return d;
}

/// Discrete metric on a single label column `h`: 0 if equal, 1 otherwise.
inline RowMatrix discrete_matrix(const EmbeddingMatrix& a, const EmbeddingMatrix& b, int h) {
  if (h < 0 || h > a.iterations || h > b.iterations) throw Error("discrete_matrix: bad iteration");
  RowMatrix d(a.values.rows(), b.values.rows());
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    for (Eigen::Index j = 0; j < d.cols(); ++j) d(i, j) = a.values(i, h) != b.values(j, h) ? 1.0 : 0.0;
  }
  return d;
}

/// Euclidean distance between concatenated node embeddings. Differences are
/// formed explicitly so identical rows give exactly 0.
inline GroundDistanceMatrix euclidean_matrix(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
  if (a.values.cols() != b.values.cols() || a.feature_dim != b.feature_dim ||
      a.iterations != b.iterations) {
    throw Error("euclidean_matrix: dimension mismatch (" + std::to_string(a.values.cols()) +
                " vs " + std::to_string(b.values.cols()) + " columns)");
  }
  const Eigen::Index n = a.values.rows(), k = b.values.rows(), f = a.values.cols();
  GroundDistanceMatrix d;
  d.kind = GroundKind::euclidean;
  d.iterations = a.iterations;
  d.feature_dim = a.feature_dim;
  d.values.resize(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* x = a.values.data() + i * f;
    for (Eigen::Index j = 0; j < k; ++j) {
      const double* y = b.values.data() + j * f;
      double s = 0.0;
      for (Eigen::Index c = 0; c < f; ++c) {
        const double t = x[c] - y[c];
        s += t * t;
      }
      d.values(i, j) = std::sqrt(s);
    }
  }
  return d;
}

inline GroundDistanceMatrix ground_distance(const EmbeddingMatrix& a, const EmbeddingMatrix& b,
                                            GroundKind kind) {
  return kind == GroundKind::hamming ? hamming_matrix(a, b) : euclidean_matrix(a, b);
}

}  // namespace wwl

#endif  // WWL_GROUND_DISTANCE_HPP
