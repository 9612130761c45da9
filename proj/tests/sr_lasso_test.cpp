// Copyright 2026 The srlasso Authors
// SPDX-License-Identifier: Apache-2.0

#include "srlasso/sr_lasso.hpp"

#include <gtest/gtest.h>

#include <random>

namespace srlasso {
namespace {

OperatorPtr fourier() { return fourier_lowpass_1d(3); }

OperatorPtr gaussian() { return gaussian_sampling_1d(0.07, uniform_samples(50, 0.0, 1.0)); }

OperatorPtr microscopy() {
  return gauss_laplace_separable(0.1, uniform_samples(20, 0.0, 1.0), uniform_samples(3, 0.0, 1.0));
}

// Coefficients that reproduce mu exactly under the first-order model.
GroupedVector exact_coefficients(const SrDesign& design, const DiscreteMeasure& mu) {
  const int d = design.dims();
  GroupedVector z(1 + d, design.grid.num_nodes());
  const NodeDecomposition parts = decompose_on_grid(design.grid, mu);
  for (std::size_t i = 0; i < parts.nodes.size(); ++i) {
    const int j = parts.nodes[i];
    z.group(j)[0] = parts.amplitudes[i];
    const Vec moment = design.metric_sqrt[j] * (parts.amplitudes[i] * parts.shifts[i]);
    for (int k = 0; k < d; ++k) z.group(j)[1 + k] = moment[k] / design.tau[k];
  }
  return z;
}

TEST(SrDesign, Shapes) {
  const SrDesign f = build_sr_design(fourier(), Grid({10}), {1.0});
  EXPECT_EQ(f.matrix.rows(), 14);
  EXPECT_EQ(f.matrix.cols(), 20);
  EXPECT_EQ(f.matrix.group_size(), 2);
  const SrDesign m = build_sr_design(microscopy(), Grid({20, 5}), {1.0, 1.0});
  EXPECT_EQ(m.matrix.group_size(), 3);
  EXPECT_EQ(m.matrix.n_groups(), 100);
  EXPECT_EQ(m.matrix.rows(), 60);
}

TEST(SrDesign, ColumnsAreFeatureAndScaledNormalizedDerivative) {
  const OperatorPtr op = gaussian();
  const Grid grid({12});
  const SrDesign design = build_sr_design(op, grid, {0.7});
  for (int j = 0; j < grid.num_nodes(); ++j) {
    const Vec x = grid.position(j);
    EXPECT_LT((design.matrix.block(j).col(0) - op->feature(x)).norm(), 1e-14);
    const Vec psi = op->dfeature(x).col(0) / op->dfeature(x).norm();
    EXPECT_LT((design.matrix.block(j).col(1) - 0.7 * psi).norm(), 1e-12);
    EXPECT_NEAR(design.metric_sqrt[j](0, 0), op->dfeature(x).norm(), 1e-10);
  }
}

TEST(SrDesign, Validation) {
  EXPECT_THROW(build_sr_design(fourier(), Grid({10}), {2.5}), Error);
  EXPECT_THROW(build_sr_design(fourier(), Grid({10}), {-0.1}), Error);
  EXPECT_THROW(build_sr_design(fourier(), Grid({10, 10}), {1.0, 1.0}), Error);
  EXPECT_THROW(build_sr_design(fourier(), Grid({10}), {1.0, 1.0}), Error);
}

TEST(SrLasso, ZeroTauReducesToLasso) {
  const OperatorPtr op = fourier();
  const Grid grid({10});
  const SrDesign design = build_sr_design(op, grid, {0.0});
  for (int j = 0; j < grid.num_nodes(); ++j) EXPECT_EQ(design.matrix.block(j).col(1).norm(), 0.0);
  const Vec y = forward(*op, DiscreteMeasure::line({0.33, 0.71}, {2.0, 1.0}));
  SolverConfig cfg;
  cfg.lambda = 0.05;
  cfg.gap_tol = 1e-13;
  const SolveResult sr = solve_sr_lasso(design, y, cfg);
  const LassoResult lasso = solve_lasso_baseline(*op, grid, y, cfg);
  EXPECT_LE(std::abs(sr.primal - lasso.solve.primal), 1e-10);
  for (int j = 0; j < grid.num_nodes(); ++j) {
    EXPECT_NEAR(sr.z.group(j)[0], lasso.solve.z.data()[j], 1e-6);
  }
}

TEST(SrLasso, ZeroDataAndLargeLambda) {
  const SrDesign design = build_sr_design(fourier(), Grid({10}), {1.0});
  SolverConfig cfg;
  cfg.lambda = 0.1;
  EXPECT_EQ(solve_sr_lasso(design, Vec::Zero(14), cfg).z.data().norm(), 0.0);
  const Vec y = forward(*design.op, DiscreteMeasure::line({0.3}, {1.0}));
  double lmax = 0.0;
  for (int j = 0; j < 10; ++j) lmax = std::max(lmax, (design.matrix.block(j).transpose() * y).norm());
  cfg.lambda = lmax;
  EXPECT_EQ(solve_sr_lasso(design, y, cfg).z.data().norm(), 0.0);
}

TEST(SrLasso, OnGridSupportIsRecovered) {
  const OperatorPtr op = fourier();
  const Grid grid({10});
  const SrDesign design = build_sr_design(op, grid, {1.0});
  const Vec y = forward(*op, DiscreteMeasure::line({0.3, 0.7}, {2.0, 1.0}));
  SolverConfig cfg;
  cfg.lambda = 1e-3;
  const SolveResult res = solve_sr_lasso(design, y, cfg);
  EXPECT_EQ(group_support(res.z, 1e-3), std::vector<int>({3, 7}));
}

TEST(RecoverMeasure, ShiftFormulaAndClamp) {
  SrDesign design = build_sr_design(gaussian(), Grid({5}), {1.0});
  for (int j = 0; j < 5; ++j) {
    design.metric_sqrt[j] = Mat::Constant(1, 1, 10.0);
    design.metric_inv_sqrt[j] = Mat::Constant(1, 1, 0.1);
  }
  GroupedVector z(2, 5);
  z.group(2) << 2.0, 1.0;
  RecoveredMeasure rec = recover_measure(design, z, 1e-6);
  ASSERT_EQ(rec.measure.size(), 1u);
  EXPECT_NEAR(rec.measure.atom(0).position[0], 0.4 + 0.05, 1e-15);
  EXPECT_EQ(rec.measure.atom(0).amplitude, 2.0);
  EXPECT_EQ(rec.clamped, 0);

  design.metric_inv_sqrt[1] = Mat::Constant(1, 1, 1.0);
  GroupedVector big(2, 5);
  big.group(1) << 1.0, 5.0;
  rec = recover_measure(design, big, 1e-6);
  ASSERT_EQ(rec.measure.size(), 1u);
  EXPECT_NEAR(rec.measure.atom(0).position[0], 0.2 + 0.1, 1e-15);
  EXPECT_EQ(rec.clamped, 1);

  GroupedVector plain(2, 5);
  plain.group(3) << 1.0, 0.0;
  rec = recover_measure(design, plain, 1e-6);
  EXPECT_DOUBLE_EQ(rec.measure.atom(0).position[0], 0.6000000000000001);
}

TEST(RecoverMeasure, DropsPureShiftGroups) {
  const SrDesign design = build_sr_design(gaussian(), Grid({5}), {1.0});
  GroupedVector z(2, 5);
  z.group(1) << 1.0, 0.0;
  z.group(3) << 0.0, 0.5;
  const RecoveredMeasure rec = recover_measure(design, z, 1e-6);
  EXPECT_EQ(rec.measure.size(), 1u);
  EXPECT_EQ(rec.dropped, 1);
}

TEST(RecoverMeasure, StaysInsideCells) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n01;
  const SrDesign design = build_sr_design(microscopy(), Grid({20, 5}), {0.8, 1.2});
  for (int trial = 0; trial < 20; ++trial) {
    Vec data(3 * 100);
    for (int i = 0; i < data.size(); ++i) data[i] = n01(rng);
    const RecoveredMeasure rec = recover_measure(design, GroupedVector(3, data), 0.0);
    for (const Atom& a : rec.measure.atoms()) {
      const int j = design.grid.nearest_node(a.position);
      const Vec off = a.position - design.grid.position(j);
      for (int k = 0; k < 2; ++k) EXPECT_LE(std::abs(off[k]), 0.5 * design.grid.spacing(k) * (1 + 1e-12));
    }
  }
}

TEST(RecoverMeasure, InvertsTheFirstOrderParameterization) {
  const SrDesign line = build_sr_design(gaussian(), Grid({14}), {0.9});
  const DiscreteMeasure mu = DiscreteMeasure::line({4 / 14.0 + 0.01, 9 / 14.0 - 0.02}, {1.0, -0.5});
  const DiscreteMeasure back = recover_measure(line, exact_coefficients(line, mu), 1e-9).measure;
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(back.atom(i).position[0], mu.atom(i).position[0], 1e-12);
    EXPECT_NEAR(back.atom(i).amplitude, mu.atom(i).amplitude, 1e-12);
  }
  const SrDesign plane = build_sr_design(microscopy(), Grid({20, 5}), {0.6, 1.3});
  Vec p(2);
  p << 0.5 + 0.013, 0.4 - 0.05;
  const DiscreteMeasure mu2(2, {{p, 2.0}});
  const DiscreteMeasure back2 = recover_measure(plane, exact_coefficients(plane, mu2), 1e-9).measure;
  ASSERT_EQ(back2.size(), 1u);
  EXPECT_LT((back2.atom(0).position - p).norm(), 1e-12);
}

TEST(SrLasso, RoundTripGaussianOffGrid) {
  const OperatorPtr op = gaussian();
  const Grid grid({40});
  const double h = grid.spacing(0);
  const DiscreteMeasure mu0 =
      DiscreteMeasure::line({grid.node(0, 11) + 0.15 * h, grid.node(0, 25) - 0.2 * h}, {1.0, 0.8});
  const SrDesign design = build_sr_design(op, grid, {1.0});
  const Vec y = forward(*op, mu0);
  // At much smaller lambda a few percent of each spike splits onto the
  // neighbouring node, which is cheaper in the mixed norm than a full shift.
  SolverConfig cfg;
  cfg.lambda = 0.01 * lasso_lambda_max(*op, grid, y);
  cfg.gap_tol = 1e-11;
  const RecoveredMeasure rec = recover_measure(design, solve_sr_lasso(design, y, cfg).z, 1e-3);
  ASSERT_EQ(rec.measure.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(rec.measure.atom(i).position[0], mu0.atom(i).position[0], 0.05 * h);
    EXPECT_NEAR(rec.measure.atom(i).amplitude, mu0.atom(i).amplitude, 0.02 * std::abs(mu0.atom(i).amplitude));
  }
}

TEST(LassoBaseline, ExactRecoveryAndEmptyCases) {
  const OperatorPtr op = fourier();
  const Grid grid({10});
  const DiscreteMeasure mu0 = DiscreteMeasure::line({0.3, 0.7}, {2.0, 1.0});
  const Vec y = forward(*op, mu0);
  SolverConfig cfg;
  cfg.lambda = 1e-4;
  const LassoResult res = solve_lasso_baseline(*op, grid, y, cfg);
  ASSERT_EQ(res.measure.size(), 2u);
  EXPECT_NEAR(res.measure.atom(0).position[0], 0.3, 1e-15);
  EXPECT_NEAR(res.measure.atom(1).position[0], 0.7, 1e-15);
  EXPECT_TRUE(solve_lasso_baseline(*op, grid, Vec::Zero(14), cfg).measure.empty());
  cfg.lambda = lasso_lambda_max(*op, grid, y);
  EXPECT_TRUE(solve_lasso_baseline(*op, grid, y, cfg).measure.empty());
}

TEST(TaylorRemainder, ScalingAndEdgeCases) {
  const OperatorPtr op = gaussian();
  const Grid grid({14});
  const double h = grid.spacing(0);
  EXPECT_LE(taylor_remainder_bound(*op, grid, DiscreteMeasure::line({5 * h}, {1.0})), 1e-12);
  const double t = 0.2 * h;
  const double full = taylor_remainder_bound(*op, grid, DiscreteMeasure::line({5 * h + t}, {1.0}));
  const double half = taylor_remainder_bound(*op, grid, DiscreteMeasure::line({5 * h + t / 2}, {1.0}));
  EXPECT_NEAR(full / half, 4.0, 0.8);
  const double edge = taylor_remainder_bound(*op, grid, DiscreteMeasure::line({5 * h + 0.5 * h}, {1.0}));
  EXPECT_GT(edge, 0.0);
  EXPECT_TRUE(std::isfinite(edge));
  try {
    taylor_remainder_bound(*op, grid, DiscreteMeasure::line({1.5}, {1.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOffGridTooFar);
  }
}

}  // namespace
}  // namespace srlasso
