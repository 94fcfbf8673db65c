#ifndef WWL_TESTS_LP_ORACLE_HPP
#define WWL_TESTS_LP_ORACLE_HPP

// Dense two-phase tableau simplex with Bland's rule, used only as an
// independent oracle for the transport solvers:
//   minimise c^T x  subject to  A x = b, x >= 0   (b >= 0).

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "wwl/graph.hpp"

namespace wwl::testing {

class DenseLp {
 public:
  DenseLp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) : m_(a.rows()), n_(a.cols()) {
    // Columns: n_ structural, m_ artificial, then the right-hand side.
    t_ = Eigen::MatrixXd::Zero(m_, n_ + m_ + 1);
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double sign = b(i) < 0 ? -1.0 : 1.0;
      t_.row(i).head(n_) = sign * a.row(i);
      t_(i, n_ + i) = 1.0;
      t_(i, n_ + m_) = sign * b(i);
      basis_.push_back(n_ + i);
    }
  }

  double minimise(const Eigen::VectorXd& c) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n_ + m_);
    phase1.tail(m_).setOnes();
    run(phase1, n_ + m_);
    if (objective(phase1) > 1e-9) throw std::runtime_error("lp oracle: infeasible");

    // Drive zero-level artificials out of the basis where possible.
    for (Eigen::Index r = 0; r < m_; ++r) {
      if (basis_[r] < n_) continue;
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (std::abs(t_(r, j)) > kEps) {
          pivot(r, j);
          break;
        }
      }
    }

    Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(n_ + m_);
    phase2.head(n_) = c;
    run(phase2, n_);
    return objective(phase2);
  }

  Eigen::VectorXd solution() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
    for (Eigen::Index r = 0; r < m_; ++r) {
      if (basis_[r] < n_) x(basis_[r]) = t_(r, n_ + m_);
    }
    return x;
  }

 private:
  static constexpr double kEps = 1e-12;

  double objective(const Eigen::VectorXd& c) const {
    double s = 0.0;
    for (Eigen::Index r = 0; r < m_; ++r) s += c(basis_[r]) * t_(r, n_ + m_);
    return s;
  }

  // Columns >= `allowed` may never enter.
  void run(const Eigen::VectorXd& c, Eigen::Index allowed) {
    for (int guard = 0; guard < 100000; ++guard) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < allowed; ++j) {
        double reduced = c(j);
        for (Eigen::Index r = 0; r < m_; ++r) reduced -= c(basis_[r]) * t_(r, j);
        if (reduced < -1e-11) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index r = 0; r < m_; ++r) {
        if (t_(r, enter) <= kEps) continue;
        const double ratio = t_(r, n_ + m_) / t_(r, enter);
        if (ratio < best - 1e-15 ||
            (std::abs(ratio - best) <= 1e-15 && leave >= 0 && basis_[r] < basis_[leave])) {
          best = ratio;
          leave = r;
        }
      }
      if (leave < 0) throw std::runtime_error("lp oracle: unbounded");
      pivot(leave, enter);
    }
    throw std::runtime_error("lp oracle: iteration guard hit");
  }

  void pivot(Eigen::Index r, Eigen::Index j) {
    t_.row(r) /= t_(r, j);
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (i != r && t_(i, j) != 0.0) t_.row(i) -= t_(i, j) * t_.row(r);
    }
    basis_[r] = j;
  }

  Eigen::Index m_, n_;
  Eigen::MatrixXd t_;
  std::vector<Eigen::Index> basis_;
};

/// min <P, M> over uniform-marginal transport plans, by dense LP.
inline double transport_lp(const RowMatrix& cost) {
  const Eigen::Index n = cost.rows(), k = cost.cols();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + k, n * k);
  Eigen::VectorXd b(n + k);
  Eigen::VectorXd c(n * k);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      a(i, i * k + j) = 1.0;
      a(n + j, i * k + j) = 1.0;
      c(i * k + j) = cost(i, j);
    }
    b(i) = 1.0 / static_cast<double>(n);
  }
  for (Eigen::Index j = 0; j < k; ++j) b(n + j) = 1.0 / static_cast<double>(k);
  DenseLp lp(a, b);
  return lp.minimise(c);
}

}  // namespace wwl::testing

#endif  // WWL_TESTS_LP_ORACLE_HPP
