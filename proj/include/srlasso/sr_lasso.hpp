// Copyright 2026 The srlasso Authors
// SPDX-License-Identifier: Apache-2.0
//
// Grid designs pairing each node's feature with its whitened derivative, and
// the conversion from (amplitude, shift) groups back to off-grid spikes.

#pragma once

#include "srlasso/group_solver.hpp"
#include "srlasso/operators.hpp"
#include "srlasso/types.hpp"

#include <vector>

namespace srlasso {

struct SrDesign {
  OperatorPtr op;
  Grid grid;
  std::vector<double> tau;  // one weight per axis
  DesignMatrix matrix;      // group j = [phi(x_j), whitened derivative * diag(tau)]
  std::vector<Mat> metric_sqrt;      // g^{1/2} per node; 1-D: |phi'(x_j)|
  std::vector<Mat> metric_inv_sqrt;  // g^{-1/2} per node

  int dims() const { return grid.dims(); }
};

SrDesign build_sr_design(OperatorPtr op, const Grid& grid, std::vector<double> tau);

SolveResult solve_sr_lasso(const SrDesign& design, const Vec& y, const SolverConfig& cfg);

struct RecoveredMeasure {
  DiscreteMeasure measure;
  int clamped = 0;  // axis shifts cut back to half a cell
  int dropped = 0;  // groups with negligible amplitude but a shift part
};

RecoveredMeasure recover_measure(const SrDesign& design, const GroupedVector& z,
                                 double support_tol);

// Plain Lasso on the node features.
DesignMatrix lasso_design(const MeasurementOperator& op, const Grid& grid);

struct LassoResult {
  SolveResult solve;
  DiscreteMeasure measure;
};

LassoResult solve_lasso_baseline(const MeasurementOperator& op, const Grid& grid, const Vec& y,
                                 const SolverConfig& cfg);

// Max over nodes of |<phi(x_j), y>|; the Lasso solution vanishes at or above it.
double lasso_lambda_max(const MeasurementOperator& op, const Grid& grid, const Vec& y);

// Amplitude and per-axis shift of each atom relative to its nearest node.
struct NodeDecomposition {
  std::vector<int> nodes;
  std::vector<double> amplitudes;
  std::vector<Vec> shifts;
};

NodeDecomposition decompose_on_grid(const Grid& grid, const DiscreteMeasure& mu);

// |Phi mu - sum_j a_j (phi(x_j) + grad phi(x_j) t_j)|: the first-order
// linearization error of mu around its nearest nodes.
double taylor_remainder_bound(const MeasurementOperator& op, const Grid& grid,
                              const DiscreteMeasure& mu0);

}  // namespace srlasso
