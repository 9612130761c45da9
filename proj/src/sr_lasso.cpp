// Copyright 2026 The srlasso Authors
// SPDX-License-Identifier: Apache-2.0

#include "srlasso/sr_lasso.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace srlasso {

namespace {

void require_same_dims(const MeasurementOperator& op, const Grid& grid) {
  if (op.dims() != grid.dims()) {
    throw Error(ErrorCode::kDimMismatch, "operator dims differ from grid dims");
  }
}

Mat assemble(const MeasurementOperator& op, const Grid& grid, const std::vector<double>& tau,
             std::vector<Mat>& metric_sqrt, std::vector<Mat>& metric_inv_sqrt) {
  const int d = grid.dims();
  const int n = grid.num_nodes();
  const int q = 1 + d;
  Mat gamma(op.measurement_dim(), static_cast<Eigen::Index>(n) * q);
  metric_sqrt.reserve(n);
  metric_inv_sqrt.reserve(n);
  for (int j = 0; j < n; ++j) {
    const Vec x = grid.position(j);
    const NormalizedDerivative nd = normalized_derivative(op, x);
    const Eigen::Index c = static_cast<Eigen::Index>(j) * q;
    gamma.col(c) = op.feature(x);
    for (int k = 0; k < d; ++k) gamma.col(c + 1 + k) = tau[k] * nd.columns.col(k);
    metric_sqrt.push_back(nd.metric_sqrt);
    metric_inv_sqrt.push_back(nd.metric_inv_sqrt);
  }
  return gamma;
}

}  // namespace

SrDesign build_sr_design(OperatorPtr op, const Grid& grid, std::vector<double> tau) {
  if (!op) throw Error(ErrorCode::kInvalidParam, "missing operator");
  require_same_dims(*op, grid);
  if (static_cast<int>(tau.size()) != grid.dims()) {
    throw Error(ErrorCode::kDimMismatch, "need one tau per axis");
  }
  for (double t : tau) {
    if (!(t >= 0.0 && t <= 2.0)) throw Error(ErrorCode::kInvalidParam, "tau must lie in [0, 2]");
  }
  std::vector<Mat> ms, mis;
  Mat gamma = assemble(*op, grid, tau, ms, mis);
  return SrDesign{std::move(op),  grid, std::move(tau), DesignMatrix(std::move(gamma), 1 + grid.dims()),
                  std::move(ms), std::move(mis)};
}

SolveResult solve_sr_lasso(const SrDesign& design, const Vec& y, const SolverConfig& cfg) {
  return solve_group_lasso(design.matrix, y, cfg);
}

RecoveredMeasure recover_measure(const SrDesign& design, const GroupedVector& z,
                                 double support_tol) {
  const int d = design.dims();
  if (z.group_size() != 1 + d || z.n_groups() != design.grid.num_nodes()) {
    throw Error(ErrorCode::kDimMismatch, "coefficients do not match the design");
  }
  const std::vector<int> active = group_support(z, support_tol);
  double largest = 0.0;
  for (int j : active) largest = std::max(largest, std::abs(z.group(j)[0]));

  RecoveredMeasure out{DiscreteMeasure(d)};
  std::vector<Atom> atoms;
  for (int j : active) {
    const auto g = z.group(j);
    const double a = g[0];
    if (std::abs(a) <= 1e-12 * largest || a == 0.0) {
      ++out.dropped;
      continue;
    }
    Vec weighted(d);
    for (int k = 0; k < d; ++k) weighted[k] = design.tau[k] * g[1 + k];
    Vec shift = design.metric_inv_sqrt[j] * weighted / a;
    for (int k = 0; k < d; ++k) {
      const double half = 0.5 * design.grid.spacing(k);
      if (std::abs(shift[k]) > half) {
        shift[k] = std::copysign(half, shift[k]);
        ++out.clamped;
      }
    }
    atoms.push_back({design.grid.position(j) + shift, a});
  }
  out.measure = DiscreteMeasure::merged(d, atoms);
  return out;
}

DesignMatrix lasso_design(const MeasurementOperator& op, const Grid& grid) {
  require_same_dims(op, grid);
  const int n = grid.num_nodes();
  Mat gamma(op.measurement_dim(), n);
  for (int j = 0; j < n; ++j) gamma.col(j) = op.feature(grid.position(j));
  return DesignMatrix(std::move(gamma), 1);
}

LassoResult solve_lasso_baseline(const MeasurementOperator& op, const Grid& grid, const Vec& y,
                                 const SolverConfig& cfg) {
  const DesignMatrix design = lasso_design(op, grid);
  SolveResult res = solve_group_lasso(design, y, cfg);
  std::vector<Atom> atoms;
  for (int j : group_support(res.z, cfg.support_tol)) {
    atoms.push_back({grid.position(j), res.z.data()[j]});
  }
  return {std::move(res), DiscreteMeasure(grid.dims(), std::move(atoms))};
}

double lasso_lambda_max(const MeasurementOperator& op, const Grid& grid, const Vec& y) {
  const DesignMatrix design = lasso_design(op, grid);
  return (design.matrix().transpose() * y).cwiseAbs().maxCoeff();
}

NodeDecomposition decompose_on_grid(const Grid& grid, const DiscreteMeasure& mu) {
  if (mu.dims() != grid.dims()) throw Error(ErrorCode::kDimMismatch, "measure dims differ from grid");
  NodeDecomposition out;
  for (const Atom& a : mu.atoms()) {
    const int node = grid.nearest_node(a.position);
    const Vec shift = a.position - grid.position(node);
    for (int k = 0; k < grid.dims(); ++k) {
      if (std::abs(shift[k]) > 0.5 * grid.spacing(k) * (1.0 + 1e-12)) {
        throw Error(ErrorCode::kOffGridTooFar, "atom lies more than half a cell from every node");
      }
    }
    out.nodes.push_back(node);
    out.amplitudes.push_back(a.amplitude);
    out.shifts.push_back(shift);
  }
  return out;
}

double taylor_remainder_bound(const MeasurementOperator& op, const Grid& grid,
                              const DiscreteMeasure& mu0) {
  require_same_dims(op, grid);
  const NodeDecomposition parts = decompose_on_grid(grid, mu0);
  Vec linear = Vec::Zero(op.measurement_dim());
  for (std::size_t i = 0; i < parts.nodes.size(); ++i) {
    const Vec x = grid.position(parts.nodes[i]);
    linear += parts.amplitudes[i] * (op.feature(x) + op.dfeature(x) * parts.shifts[i]);
  }
  return (forward(op, mu0) - linear).norm();
}

}  // namespace srlasso
