#ifndef WWL_LEMMA_HPP
#define WWL_LEMMA_HPP

#include <cmath>
#include <vector>

#include "wwl/embedding.hpp"
#include "wwl/ground_distance.hpp"
#include "wwl/ot.hpp"

namespace wwl {

struct LemmaReport {
  int iterations = 0;
  double optimal_cost = 0.0;  // W1 under the H-iteration Hamming distance

  // Per iteration h = 0..H: cost of the optimal Hamming plan under the
  // discrete metric on column h, and the true minimum (brute force).
  std::vector<double> discrete_plan_cost;
  std::vector<double> discrete_minimum;
  std::vector<bool> discrete_pass;

  // Optimality of the same plan for the (H-1)-iteration Hamming distance.
  // Vacuous (true) when H = 0.
  double previous_plan_cost = 0.0;
  double previous_minimum = 0.0;
  bool previous_pass = true;

  // <P, D_Ham^H> against (1/(H+1)) * sum_h <P, D_disc^h>.
  double decomposition_gap = 0.0;
  bool decomposition_pass = true;

  bool passed() const {
    for (bool ok : discrete_pass) {
      if (!ok) return false;
    }
    return previous_pass && decomposition_pass;
  }
};

/// Checks that the optimal plan for the H-iteration WL Hamming distance is
/// also optimal for the discrete label metric at every iteration h <= H and
/// for the (H-1)-iteration Hamming distance. Minima come from the
/// brute-force oracle, so both graphs must fit its size limits.
inline LemmaReport verify_lemma_optimality(const Graph& first, const Graph& second, int iterations,
                                           double tol = 1e-9) {
  if (iterations < 0) throw Error("verify_lemma_optimality: H must be nonnegative");
  Dataset pair;
  pair.name = "lemma-pair";
  pair.graphs = {first, second};
  pair.graph_labels = {0, 0};
  const auto emb = wl_refine_categorical(pair, iterations);

  LemmaReport rep;
  rep.iterations = iterations;
  const auto ham = hamming_matrix(emb[0], emb[1]);
  const OtResult best = wasserstein_exact(ham.values, true);
  const RowMatrix& plan = best.plan->values;
  rep.optimal_cost = best.distance;

  double sum = 0.0;
  for (int h = 0; h <= iterations; ++h) {
    const RowMatrix disc = discrete_matrix(emb[0], emb[1], h);
    const double cost = frobenius(plan, disc);
    const double minimum = wasserstein_bruteforce(disc).distance;
    rep.discrete_plan_cost.push_back(cost);
    rep.discrete_minimum.push_back(minimum);
    rep.discrete_pass.push_back(std::abs(cost - minimum) <= tol);
    sum += cost;
  }

  if (iterations > 0) {
    EmbeddingMatrix a = emb[0], b = emb[1];
    a.iterations = b.iterations = iterations - 1;
    a.values = emb[0].values.leftCols(iterations);
    b.values = emb[1].values.leftCols(iterations);
    const RowMatrix prev = hamming_matrix(a, b).values;
    rep.previous_plan_cost = frobenius(plan, prev);
    rep.previous_minimum = wasserstein_bruteforce(prev).distance;
    rep.previous_pass = std::abs(rep.previous_plan_cost - rep.previous_minimum) <= tol;
  }

  rep.decomposition_gap = std::abs(frobenius(plan, ham.values) - sum / (iterations + 1));
  rep.decomposition_pass = rep.decomposition_gap <= tol;
  return rep;
}

}  // namespace wwl

#endif  // WWL_LEMMA_HPP
