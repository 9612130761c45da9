// Copyright 2026 The srlasso Authors
// SPDX-License-Identifier: Apache-2.0
//
// min_z lambda * sum_i |z_i| + 0.5 * |Gamma z - y|^2 over equal-size groups.

#pragma once

#include "srlasso/types.hpp"

#include <vector>

namespace srlasso {

class DesignMatrix {
 public:
  DesignMatrix(Mat gamma, int group_size);

  const Mat& matrix() const { return gamma_; }
  int group_size() const { return q_; }
  int n_groups() const { return static_cast<int>(gamma_.cols() / q_); }
  int rows() const { return static_cast<int>(gamma_.rows()); }
  int cols() const { return static_cast<int>(gamma_.cols()); }
  auto block(int i) const { return gamma_.middleCols(static_cast<Eigen::Index>(q_) * i, q_); }

  // Columns of the listed groups, in order.
  Mat restrict_to(const std::vector<int>& groups) const;

 private:
  Mat gamma_;
  int q_;
};

struct SolveResult {
  GroupedVector z;
  int iterations = 0;
  double final_gap = 0.0;
  double primal = 0.0;
  double kkt_residual = 0.0;
  Vec dual;  // (y - Gamma z) / lambda
};

// Raised when the iteration budget runs out; carries the last iterate.
class NotConverged : public Error {
 public:
  explicit NotConverged(SolveResult best);
  const SolveResult& best() const { return best_; }

 private:
  SolveResult best_;
};

Vec block_soft_threshold(const Vec& v, double t);

// Largest singular value by power iteration; never above the true value.
double operator_norm(const Mat& gamma);
inline double operator_norm(const DesignMatrix& gamma) { return operator_norm(gamma.matrix()); }

double primal_objective(const DesignMatrix& gamma, const Vec& y, const GroupedVector& z,
                        double lambda);

// Gap between the primal value at z and the dual value at the rescaled
// residual, which is feasible by construction.
double duality_gap(const DesignMatrix& gamma, const Vec& y, const GroupedVector& z,
                   double lambda, bool nonneg = false);

SolveResult solve_group_lasso(const DesignMatrix& gamma, const Vec& y, const SolverConfig& cfg);

// Newton iterations on the groups that solve() left active, holding the
// others at zero. Converges quadratically when the restricted Hessian is
// definite, which is the nullspace condition at the solution. Returns
// `start` unchanged if that fails or the KKT residual would not improve.
SolveResult refine_on_support(const DesignMatrix& gamma, const Vec& y, const SolveResult& start,
                              const SolverConfig& cfg);

// Worst violation of the optimality conditions; zero exactly at a minimizer.
// With nonneg the conditions of the sign-constrained problem (group size 1).
double kkt_residual(const DesignMatrix& gamma, const Vec& y, const GroupedVector& z,
                    double lambda, bool nonneg = false);

}  // namespace srlasso
