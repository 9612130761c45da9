// Copyright 2026 The srlasso Authors
// SPDX-License-Identifier: Apache-2.0

#include "srlasso/group_solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <gtest/gtest.h>

#include <random>

namespace srlasso {
namespace {

Mat gaussian_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  Mat m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = n01(rng);
  }
  return m;
}

Vec gaussian_vector(int n, std::mt19937_64& rng) { return gaussian_matrix(n, 1, rng).col(0); }

double max_block_correlation(const DesignMatrix& g, const Vec& y) {
  double best = 0.0;
  for (int i = 0; i < g.n_groups(); ++i) best = std::max(best, (g.block(i).transpose() * y).norm());
  return best;
}

// Cyclic block coordinate descent with exact block minimization by bisection
// on the block norm; independent of the accelerated solver.
Vec coordinate_descent(const Mat& a, const Vec& y, int q, double lambda, bool nonneg, int sweeps) {
  const int g = static_cast<int>(a.cols()) / q;
  Vec z = Vec::Zero(a.cols());
  Vec r = y;
  for (int s = 0; s < sweeps; ++s) {
    for (int i = 0; i < g; ++i) {
      const Mat ai = a.middleCols(i * q, q);
      const Vec zi = z.segment(i * q, q);
      r += ai * zi;
      const Vec c = ai.transpose() * r;
      Vec next = Vec::Zero(q);
      if (q == 1) {
        const double d = ai.col(0).squaredNorm();
        const double v = nonneg ? std::max(0.0, c[0] - lambda) : std::copysign(std::max(0.0, std::abs(c[0]) - lambda), c[0]);
        next[0] = v / d;
      } else if (c.norm() > lambda) {
        // block solves (A^T A + (lambda / t) I) z = c with t = |z|
        const Mat h = ai.transpose() * ai;
        auto solve_for = [&](double t) {
          return Vec((h + (lambda / t) * Mat::Identity(q, q)).ldlt().solve(c));
        };
        double lo = 1e-300, hi = c.norm() / Eigen::SelfAdjointEigenSolver<Mat>(h).eigenvalues()[0] + 1.0;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (solve_for(mid).norm() > mid) lo = mid;
          else hi = mid;
        }
        next = solve_for(0.5 * (lo + hi));
      }
      z.segment(i * q, q) = next;
      r -= ai * next;
    }
  }
  return z;
}

TEST(BlockSoftThreshold, Examples) {
  Vec v(2);
  v << 3, 4;
  EXPECT_LT(block_soft_threshold(v, 5.0).norm(), 1e-300);
  const Vec s = block_soft_threshold(v, 2.5);
  EXPECT_DOUBLE_EQ(s[0], 1.5);
  EXPECT_DOUBLE_EQ(s[1], 2.0);
  EXPECT_LT(block_soft_threshold(Vec::Zero(2), 1.0).norm(), 1e-300);
  EXPECT_THROW(block_soft_threshold(v, -1.0), Error);
}

TEST(OperatorNorm, MatchesSingularValues) {
  EXPECT_NEAR(operator_norm(Mat::Identity(3, 3)), 1.0, 1e-12);
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 2;
  d(1, 1) = 1;
  EXPECT_NEAR(operator_norm(d), 2.0, 1e-12);
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat m = gaussian_matrix(10, 20, rng);
    const double want = Eigen::JacobiSVD<Mat>(m).singularValues()[0];
    const double got = operator_norm(m);
    EXPECT_LE(got, want * (1 + 1e-12));
    EXPECT_GE(got * (1 + 1e-6), want);
  }
  EXPECT_THROW(operator_norm(Mat::Zero(3, 3)), Error);
}

TEST(Solver, OrthogonalDesignClosedForm) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const Mat q = Eigen::HouseholderQR<Mat>(gaussian_matrix(8, 8, rng)).householderQ();
    const DesignMatrix g(q, 2);
    const Vec y = gaussian_vector(8, rng);
    SolverConfig cfg;
    cfg.lambda = 0.7;
    const SolveResult res = solve_group_lasso(g, y, cfg);
    const Vec c = q.transpose() * y;
    for (int i = 0; i < 4; ++i) {
      const Vec want = block_soft_threshold(c.segment(2 * i, 2), cfg.lambda);
      EXPECT_LT((res.z.group(i) - want).norm(), 1e-8);
    }
    EXPECT_LE(res.kkt_residual, 1e-8);
  }
}

TEST(Solver, ZeroAboveLambdaMax) {
  std::mt19937_64 rng(10);
  const DesignMatrix g(gaussian_matrix(6, 12, rng), 3);
  const Vec y = gaussian_vector(6, rng);
  SolverConfig cfg;
  cfg.lambda = max_block_correlation(g, y) * 1.0001;
  const SolveResult res = solve_group_lasso(g, y, cfg);
  EXPECT_EQ(res.z.data().norm(), 0.0);
  EXPECT_EQ(kkt_residual(g, y, res.z, cfg.lambda), 0.0);
}

TEST(Solver, UnderdeterminedSmallLambdaKkt) {
  std::mt19937_64 rng(4);
  const DesignMatrix g(gaussian_matrix(4, 40, rng), 2);
  const Vec y = gaussian_vector(4, rng);
  SolverConfig cfg;
  cfg.lambda = 1e-5;
  const SolveResult res = solve_group_lasso(g, y, cfg);
  EXPECT_LE(res.kkt_residual, 1e-6);
  EXPECT_LE(group_support(res.z, 1e-6).size(), 4u);
}

TEST(Solver, MatchesCoordinateDescentOracle) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const int q = 1 + trial % 3;
    const Mat a = gaussian_matrix(5 * q + 3, 12 / q * q, rng);
    const DesignMatrix g(a, q);
    const Vec y = gaussian_vector(static_cast<int>(a.rows()), rng);
    SolverConfig cfg;
    cfg.lambda = 0.3 * max_block_correlation(g, y);
    cfg.gap_tol = 1e-13;
    const SolveResult res = solve_group_lasso(g, y, cfg);
    const GroupedVector oracle(q, coordinate_descent(a, y, q, cfg.lambda, false, 3000));
    const double want = primal_objective(g, y, oracle, cfg.lambda);
    EXPECT_LE(std::abs(res.primal - want), 1e-10 * std::max(1.0, want)) << "q=" << q;
    EXPECT_LT((res.z.data() - oracle.data()).norm(), 1e-5);
  }
}

TEST(Solver, PlainLassoMatchesOracleOnSmallInstances) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat a = gaussian_matrix(5, 12, rng);
    const DesignMatrix g(a, 1);
    const Vec y = gaussian_vector(5, rng);
    SolverConfig cfg;
    cfg.lambda = 0.2 * max_block_correlation(g, y);
    cfg.gap_tol = 1e-14;
    const SolveResult res = solve_group_lasso(g, y, cfg);
    const GroupedVector oracle(1, coordinate_descent(a, y, 1, cfg.lambda, false, 20000));
    EXPECT_LE(std::abs(res.primal - primal_objective(g, y, oracle, cfg.lambda)), 1e-10);
  }
}

TEST(Solver, NonnegativeMatchesOracle) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat a = gaussian_matrix(10, 8, rng);
    const DesignMatrix g(a, 1);
    const Vec y = gaussian_vector(10, rng);
    SolverConfig cfg;
    cfg.lambda = 0.1;
    cfg.nonneg = true;
    cfg.gap_tol = 1e-13;
    const SolveResult res = solve_group_lasso(g, y, cfg);
    EXPECT_GE(res.z.data().minCoeff(), 0.0);
    const GroupedVector oracle(1, coordinate_descent(a, y, 1, cfg.lambda, true, 5000));
    EXPECT_LT((res.z.data() - oracle.data()).norm(), 1e-6);
    EXPECT_LE(kkt_residual(g, y, res.z, cfg.lambda, true), 1e-6);
  }
  SolverConfig bad;
  bad.nonneg = true;
  EXPECT_THROW(solve_group_lasso(DesignMatrix(Mat::Identity(4, 4), 2), Vec::Ones(4), bad), Error);
}

TEST(Solver, ScalingCovariance) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 5; ++trial) {
    const DesignMatrix g(gaussian_matrix(12, 16, rng), 2);
    const Vec y = gaussian_vector(12, rng);
    SolverConfig cfg;
    cfg.lambda = 0.25 * max_block_correlation(g, y);
    cfg.gap_tol = 1e-13;
    const SolveResult base = solve_group_lasso(g, y, cfg);
    const double c = 7.5;
    SolverConfig scaled = cfg;
    scaled.lambda *= c;
    const SolveResult res = solve_group_lasso(g, c * y, scaled);
    EXPECT_LE((res.z.data() - c * base.z.data()).norm(), 1e-8 * c * base.z.data().norm());
  }
}

TEST(Solver, GapAndObjectiveBounds) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 10; ++trial) {
    const DesignMatrix g(gaussian_matrix(8, 18, rng), 3);
    const Vec y = gaussian_vector(8, rng);
    SolverConfig cfg;
    cfg.lambda = 0.1 * max_block_correlation(g, y);
    const SolveResult res = solve_group_lasso(g, y, cfg);
    EXPECT_GE(res.final_gap, -1e-12);
    EXPECT_LE(res.final_gap, cfg.gap_tol * (1 + std::abs(res.primal)));
    EXPECT_LE(res.primal, 0.5 * y.squaredNorm());
    EXPECT_LT((res.dual - (y - g.matrix() * res.z.data()) / cfg.lambda).norm(), 1e-12 * (1 + res.dual.norm()));
  }
}

TEST(Solver, NotConvergedCarriesIterate) {
  std::mt19937_64 rng(17);
  const DesignMatrix g(gaussian_matrix(4, 40, rng), 2);
  const Vec y = gaussian_vector(4, rng);
  SolverConfig cfg;
  cfg.lambda = 1e-6;
  cfg.max_iters = 3;
  try {
    solve_group_lasso(g, y, cfg);
    FAIL();
  } catch (const NotConverged& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotConverged);
    EXPECT_EQ(e.best().iterations, 3);
    EXPECT_GT(e.best().final_gap, 0.0);
    EXPECT_EQ(e.best().z.n_groups(), 20);
  }
  EXPECT_THROW(solve_group_lasso(g, Vec::Ones(5), SolverConfig{}), Error);
}

TEST(Refine, ReachesMachinePrecisionOnUnderdeterminedDesigns) {
  for (unsigned seed = 1; seed <= 5; ++seed) {
    std::mt19937_64 rng(seed);
    const DesignMatrix g(gaussian_matrix(4, 40, rng), 2);
    const Vec y = gaussian_vector(4, rng);
    SolverConfig cfg;
    cfg.lambda = 1e-5;
    cfg.gap_tol = 1e-10;
    const SolveResult rough = solve_group_lasso(g, y, cfg);
    const SolveResult fine = refine_on_support(g, y, rough, cfg);
    EXPECT_LE(fine.kkt_residual, 1e-12) << seed;
    EXPECT_LE(fine.primal, rough.primal + 1e-15);
    EXPECT_EQ(group_support(fine.z, 1e-6), group_support(rough.z, 1e-6));
    EXPECT_NEAR(fine.kkt_residual, kkt_residual(g, y, fine.z, cfg.lambda), 1e-18);
  }
}

TEST(Refine, AgreesWithOrthogonalClosedForm) {
  std::mt19937_64 rng(21);
  const Mat q = Eigen::HouseholderQR<Mat>(gaussian_matrix(8, 8, rng)).householderQ();
  const DesignMatrix g(q, 2);
  const Vec y = gaussian_vector(8, rng);
  SolverConfig cfg;
  cfg.lambda = 0.5;
  cfg.gap_tol = 1e-4;
  const SolveResult fine = refine_on_support(g, y, solve_group_lasso(g, y, cfg), cfg);
  const Vec c = q.transpose() * y;
  for (int i = 0; i < 4; ++i) {
    EXPECT_LT((fine.z.group(i) - block_soft_threshold(c.segment(2 * i, 2), cfg.lambda)).norm(), 1e-12);
  }
}

TEST(Refine, LeavesZeroAndMismatchedInputsAlone) {
  std::mt19937_64 rng(22);
  const DesignMatrix g(gaussian_matrix(6, 12, rng), 2);
  const Vec y = gaussian_vector(6, rng);
  SolverConfig cfg;
  cfg.lambda = 2.0 * max_block_correlation(g, y);
  const SolveResult zero = solve_group_lasso(g, y, cfg);
  EXPECT_EQ(refine_on_support(g, y, zero, cfg).z.data().norm(), 0.0);
  EXPECT_THROW(refine_on_support(g, Vec::Ones(5), zero, cfg), Error);
  cfg.nonneg = true;
  EXPECT_THROW(refine_on_support(g, y, zero, cfg), Error);
}

TEST(KktResidual, Examples) {
  std::mt19937_64 rng(18);
  const DesignMatrix g(gaussian_matrix(6, 12, rng), 2);
  const Vec y = gaussian_vector(6, rng);
  const double lmax = max_block_correlation(g, y);
  const GroupedVector zero(2, 6);
  EXPECT_EQ(kkt_residual(g, y, zero, lmax), 0.0);
  EXPECT_NEAR(kkt_residual(g, y, zero, 0.5 * lmax), 0.5 * lmax, 1e-12 * lmax);
  const Mat q = Eigen::HouseholderQR<Mat>(gaussian_matrix(8, 8, rng)).householderQ();
  const Vec y8 = gaussian_vector(8, rng);
  GroupedVector exact(2, 4);
  const Vec c = q.transpose() * y8;
  for (int i = 0; i < 4; ++i) exact.group(i) = block_soft_threshold(c.segment(2 * i, 2), 0.4);
  EXPECT_LE(kkt_residual(DesignMatrix(q, 2), y8, exact, 0.4), 1e-10);
}

TEST(DesignMatrix, Validation) {
  EXPECT_THROW(DesignMatrix(Mat::Zero(3, 5), 2), Error);
  const DesignMatrix g(Mat::Identity(4, 4), 2);
  EXPECT_EQ(g.n_groups(), 2);
  EXPECT_EQ(g.restrict_to({1}).cols(), 2);
}

}  // namespace
}  // namespace srlasso
