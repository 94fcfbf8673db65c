#ifndef WWL_OT_HPP
#define WWL_OT_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "wwl/error.hpp"
#include "wwl/ground_distance.hpp"
#include "wwl/network_simplex.hpp"

namespace wwl {

enum class Solver { exact, sinkhorn };

inline const char* to_string(Solver s) { return s == Solver::exact ? "exact" : "sinkhorn"; }

inline Solver parse_solver(const std::string& s) {
  if (s == "exact") return Solver::exact;
  if (s == "sinkhorn") return Solver::sinkhorn;
  throw Error("unknown solver '" + s + "'");
}

/// Transport plan with uniform marginals 1/n (rows) and 1/n' (columns).
struct TransportPlan {
  RowMatrix values;
  double objective = 0.0;  // <P, M>
};

struct OtResult {
  double distance = 0.0;
  std::optional<TransportPlan> plan;
  Solver solver = Solver::exact;
  std::uint64_t iterations = 0;
  bool converged = true;
  double marginal_violation = 0.0;
  std::string status = "optimal";
};

inline double frobenius(const RowMatrix& a, const RowMatrix& b) {
  return a.cwiseProduct(b).sum();
}

/// Largest absolute deviation of the plan's row/column sums from 1/n, 1/n'.
inline double marginal_violation(const RowMatrix& plan) {
  const double rn = 1.0 / static_cast<double>(plan.rows());
  const double cn = 1.0 / static_cast<double>(plan.cols());
  const double r = (plan.rowwise().sum().array() - rn).abs().maxCoeff();
  const double c = (plan.colwise().sum().array() - cn).abs().maxCoeff();
  return std::max(r, c);
}

namespace detail {

inline void check_cost(const RowMatrix& cost) {
  if (cost.rows() == 0 || cost.cols() == 0) throw Error("optimal transport: empty cost matrix");
  if (!cost.allFinite()) throw Error("optimal transport: non-finite cost entry");
  if ((cost.array() < 0.0).any()) throw Error("optimal transport: negative cost entry");
}

// A vertex of the uniform transport polytope (north-west corner rule).
inline RowMatrix northwest_corner(Eigen::Index n, Eigen::Index k) {
  RowMatrix plan = RowMatrix::Zero(n, k);
  std::vector<std::int64_t> supply(n, k), demand(k, n);
  const double scale = 1.0 / static_cast<double>(n * k);
  Eigen::Index i = 0, j = 0;
  while (i < n && j < k) {
    const std::int64_t f = std::min(supply[i], demand[j]);
    plan(i, j) = static_cast<double>(f) * scale;
    supply[i] -= f;
    demand[j] -= f;
    if (supply[i] == 0) ++i;
    if (i < n && demand[j] == 0) ++j;
    if (i == n) break;
  }
  return plan;
}

}  // namespace detail

/// Exact W1 with uniform marginals. Marginals are scaled by L = n * n' to
/// integral supplies (n' per row, n per column) and the min-cost flow is
/// solved with a network simplex; flows are divided back by L.
inline OtResult wasserstein_exact(const RowMatrix& cost, bool want_plan = true) {
  detail::check_cost(cost);
  const Eigen::Index n = cost.rows(), k = cost.cols();
  OtResult res;
  res.solver = Solver::exact;

  if ((cost.array() == 0.0).all()) {
    res.distance = 0.0;
    if (want_plan) res.plan = TransportPlan{detail::northwest_corner(n, k), 0.0};
    return res;
  }

  detail::TransportSimplex simplex(cost, k, n);
  const auto status = simplex.solve();
  res.iterations = simplex.pivots();
  if (status != detail::TransportSimplex::Status::optimal) {
    res.converged = false;
    res.status = status == detail::TransportSimplex::Status::max_pivots ? "max_pivots"
                                                                       : "infeasible";
    throw Error("wasserstein_exact: network simplex failed (" + res.status + ")");
  }

  const double scale = 1.0 / (static_cast<double>(n) * static_cast<double>(k));
  double objective = 0.0;
  RowMatrix plan;
  if (want_plan) plan = RowMatrix::Zero(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const std::int64_t f = simplex.flow(i, j);
      if (f == 0) continue;
      objective += static_cast<double>(f) * cost(i, j);
      if (want_plan) plan(i, j) = static_cast<double>(f) * scale;
    }
  }
  res.distance = objective * scale;
  if (want_plan) res.plan = TransportPlan{std::move(plan), res.distance};
  return res;
}

inline OtResult wasserstein_exact(const GroundDistanceMatrix& m, bool want_plan = true) {
  return wasserstein_exact(m.values, want_plan);
}

struct SinkhornOptions {
  double tol = 1e-9;                  // max marginal violation
  std::uint64_t max_iter = 10'000;
  double stabilize_threshold = 1e30;  // switch to log domain beyond this scaling
};

namespace detail {

inline OtResult sinkhorn_log(const RowMatrix& cost, double gamma, const SinkhornOptions& opt,
                             bool want_plan) {
  const Eigen::Index n = cost.rows(), k = cost.cols();
  const double log_a = -std::log(static_cast<double>(n));
  const double log_b = -std::log(static_cast<double>(k));
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n), g = Eigen::VectorXd::Zero(k);
  RowMatrix logp(n, k);

  const auto row_update = [&] {
    for (Eigen::Index i = 0; i < n; ++i) {
      double mx = -std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < k; ++j) mx = std::max(mx, (g(j) - cost(i, j)) / gamma);
      double s = 0.0;
      for (Eigen::Index j = 0; j < k; ++j) s += std::exp((g(j) - cost(i, j)) / gamma - mx);
      f(i) = gamma * (log_a - mx - std::log(s));
    }
  };
  const auto col_update = [&] {
    for (Eigen::Index j = 0; j < k; ++j) {
      double mx = -std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < n; ++i) mx = std::max(mx, (f(i) - cost(i, j)) / gamma);
      double s = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) s += std::exp((f(i) - cost(i, j)) / gamma - mx);
      g(j) = gamma * (log_b - mx - std::log(s));
    }
  };

  OtResult res;
  res.solver = Solver::sinkhorn;
  res.converged = false;
  RowMatrix plan(n, k);
  for (std::uint64_t it = 1; it <= opt.max_iter; ++it) {
    row_update();
    col_update();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) plan(i, j) = std::exp((f(i) + g(j) - cost(i, j)) / gamma);
    }
    // Columns are exact after the column update; rows carry the violation.
    res.marginal_violation = marginal_violation(plan);
    res.iterations = it;
    if (res.marginal_violation <= opt.tol) {
      res.converged = true;
      break;
    }
  }
  res.status = res.converged ? "converged (log domain)" : "max_iter reached (log domain)";
  res.distance = frobenius(plan, cost);
  if (want_plan) res.plan = TransportPlan{std::move(plan), res.distance};
  return res;
}

}  // namespace detail

/// Entropic OT by alternating marginal scaling of exp(-M / gamma). The
/// reported distance is the transport cost <P_gamma, M> of the regularised
/// plan (entropy term excluded). Falls back to log-domain updates when the
/// Gibbs kernel underflows or a scaling factor exceeds the threshold.
inline OtResult wasserstein_sinkhorn(const RowMatrix& cost, double gamma,
                                     const SinkhornOptions& opt = {}, bool want_plan = true) {
  detail::check_cost(cost);
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error("sinkhorn: gamma must be positive");
  const Eigen::Index n = cost.rows(), k = cost.cols();

  OtResult res;
  res.solver = Solver::sinkhorn;
  if ((cost.array() == 0.0).all()) {
    res.distance = 0.0;
    res.status = "zero cost";
    if (want_plan) {
      res.plan = TransportPlan{RowMatrix::Constant(n, k, 1.0 / static_cast<double>(n * k)), 0.0};
    }
    return res;
  }

  const RowMatrix kernel = (-cost.array() / gamma).exp().matrix();
  const bool underflow = (kernel.rowwise().maxCoeff().array() <= 0.0).any() ||
                         (kernel.colwise().maxCoeff().array() <= 0.0).any() ||
                         (kernel.array() < std::numeric_limits<double>::min()).any();
  if (underflow) return detail::sinkhorn_log(cost, gamma, opt, want_plan);

  const double a = 1.0 / static_cast<double>(n), b = 1.0 / static_cast<double>(k);
  Eigen::VectorXd u = Eigen::VectorXd::Ones(n), v = Eigen::VectorXd::Ones(k);
  res.converged = false;
  for (std::uint64_t it = 1; it <= opt.max_iter; ++it) {
    u = (a / (kernel * v).array()).matrix();
    const Eigen::VectorXd ktu = kernel.transpose() * u;
    v = (b / ktu.array()).matrix();
    if (!u.allFinite() || !v.allFinite() || u.maxCoeff() > opt.stabilize_threshold ||
        v.maxCoeff() > opt.stabilize_threshold) {
      return detail::sinkhorn_log(cost, gamma, opt, want_plan);
    }
    // Column sums are exact after the v-update; measure the row residual.
    const Eigen::VectorXd rows = u.cwiseProduct(kernel * v);
    res.marginal_violation = (rows.array() - a).abs().maxCoeff();
    res.iterations = it;
    if (res.marginal_violation <= opt.tol) {
      res.converged = true;
      break;
    }
  }
  RowMatrix plan = u.asDiagonal() * kernel * v.asDiagonal();
  res.marginal_violation = marginal_violation(plan);
  res.status = res.converged ? "converged" : "max_iter reached";
  res.distance = frobenius(plan, cost);
  if (want_plan) res.plan = TransportPlan{std::move(plan), res.distance};
  return res;
}

inline OtResult wasserstein_sinkhorn(const GroundDistanceMatrix& m, double gamma,
                                     const SinkhornOptions& opt = {}, bool want_plan = true) {
  return wasserstein_sinkhorn(m.values, gamma, opt, want_plan);
}

/// Exhaustive oracle. Square instances with n <= 8 enumerate permutations
/// (some optimal uniform plan is a scaled permutation); instances with
/// n * n' <= 12 enumerate every basis of the transport polytope.
inline OtResult wasserstein_bruteforce(const RowMatrix& cost) {
  detail::check_cost(cost);
  const Eigen::Index n = cost.rows(), k = cost.cols();
  OtResult res;
  res.solver = Solver::exact;
  res.status = "bruteforce";

  if (n == k && n <= 8) {
    std::vector<Eigen::Index> perm(n), best;
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    double best_cost = std::numeric_limits<double>::infinity();
    do {
      double c = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) c += cost(i, perm[i]);
      if (c < best_cost) {
        best_cost = c;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    RowMatrix plan = RowMatrix::Zero(n, k);
    for (Eigen::Index i = 0; i < n; ++i) plan(i, best[i]) = 1.0 / static_cast<double>(n);
    res.distance = best_cost / static_cast<double>(n);
    res.plan = TransportPlan{std::move(plan), res.distance};
    return res;
  }

  if (n * k > 12) {
    throw Error("wasserstein_bruteforce: instance too large (" + std::to_string(n) + " x " +
                std::to_string(k) + ")");
  }

  // Equality constraints A x = b over the n*k cells.
  const Eigen::Index cells = n * k, eqs = n + k, basis = n + k - 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(eqs, cells);
  Eigen::VectorXd rhs(eqs);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      a(i, i * k + j) = 1.0;
      a(n + j, i * k + j) = 1.0;
    }
    rhs(i) = 1.0 / static_cast<double>(n);
  }
  for (Eigen::Index j = 0; j < k; ++j) rhs(n + j) = 1.0 / static_cast<double>(k);

  double best_cost = std::numeric_limits<double>::infinity();
  RowMatrix best_plan;
  std::vector<char> pick(cells, 0);
  std::fill(pick.begin(), pick.begin() + basis, 1);
  do {
    Eigen::MatrixXd sub(eqs, basis);
    std::vector<Eigen::Index> idx;
    for (Eigen::Index c = 0; c < cells; ++c) {
      if (pick[c]) {
        sub.col(static_cast<Eigen::Index>(idx.size())) = a.col(c);
        idx.push_back(c);
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
    if (lu.rank() < basis) continue;
    const Eigen::VectorXd x = lu.solve(rhs);
    if ((sub * x - rhs).cwiseAbs().maxCoeff() > 1e-12) continue;
    if (x.minCoeff() < -1e-12) continue;
    double c = 0.0;
    for (std::size_t t = 0; t < idx.size(); ++t) c += x(t) * cost.data()[idx[t]];
    if (c < best_cost) {
      best_cost = c;
      best_plan = RowMatrix::Zero(n, k);
      for (std::size_t t = 0; t < idx.size(); ++t) best_plan.data()[idx[t]] = std::max(0.0, x(t));
    }
  } while (std::prev_permutation(pick.begin(), pick.end()));

  res.distance = best_cost;
  res.plan = TransportPlan{std::move(best_plan), best_cost};
  return res;
}

inline OtResult wasserstein_bruteforce(const GroundDistanceMatrix& m) {
  return wasserstein_bruteforce(m.values);
}

inline OtResult wasserstein(const RowMatrix& cost, Solver solver, double gamma = 0.0,
                            const SinkhornOptions& opt = {}, bool want_plan = false) {
  return solver == Solver::exact ? wasserstein_exact(cost, want_plan)
                                 : wasserstein_sinkhorn(cost, gamma, opt, want_plan);
}

}  // namespace wwl

#endif  // WWL_OT_HPP
