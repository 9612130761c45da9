// Copyright 2026 The srlasso Authors
// SPDX-License-Identifier: Apache-2.0

#include "srlasso/cbp.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace srlasso {

CbpDesign build_cbp_design(OperatorPtr op, const Grid& grid) {
  if (!op) throw Error(ErrorCode::kInvalidParam, "missing operator");
  if (op->dims() != 1 || grid.dims() != 1) {
    throw Error(ErrorCode::kDimUnsupported, "continuous basis pursuit is one-dimensional");
  }
  const int n = grid.num_nodes();
  const double h = grid.spacing(0);
  Mat a(op->measurement_dim(), n), b(op->measurement_dim(), n);
  for (int j = 0; j < n; ++j) {
    const double x = grid.node(0, j);
    a.col(j) = op->feature(x);
    b.col(j) = op->dfeature(x);
  }
  Mat ah(a.rows(), 2 * n);
  ah.leftCols(n) = a + 0.5 * h * b;
  ah.rightCols(n) = a - 0.5 * h * b;
  return CbpDesign{std::move(op), grid, h, DesignMatrix(std::move(ah), 1), std::move(a), std::move(b)};
}

CbpResult solve_cbp(const CbpDesign& design, const Vec& y, SolverConfig cfg) {
  cfg.nonneg = true;
  SolveResult res = solve_group_lasso(design.matrix, y, cfg);
  const int n = design.grid.num_nodes();
  Vec r = res.z.data().head(n);
  Vec l = res.z.data().tail(n);
  CbpResult out{std::move(res), std::move(r), std::move(l), Vec(), Vec(), DiscreteMeasure(1)};
  out.a = out.r + out.l;
  out.b = 0.5 * design.h * (out.r - out.l);
  const double largest = out.a.size() > 0 ? out.a.maxCoeff() : 0.0;
  std::vector<Atom> atoms;
  if (largest > 0.0) {
    for (int j = 0; j < n; ++j) {
      if (out.a[j] > cfg.support_tol * largest) {
        atoms.push_back({Vec::Constant(1, design.grid.node(0, j) + out.b[j] / out.a[j]), out.a[j]});
      }
    }
  }
  out.measure = DiscreteMeasure::merged(1, atoms);
  return out;
}

CbpCertificate::CbpCertificate(OperatorPtr op, std::vector<double> support_positions)
    : op_(std::move(op)), support_(std::move(support_positions)) {
  if (!op_ || op_->dims() != 1) {
    throw Error(ErrorCode::kDimUnsupported, "continuous basis pursuit is one-dimensional");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(support_.size());
  if (n == 0) throw Error(ErrorCode::kInvalidParam, "certificate needs a nonempty support");
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      if (std::abs(support_[i] - support_[j]) <= DiscreteMeasure::kCoincidenceTol) {
        throw Error(ErrorCode::kInvalidParam, "support positions must be distinct");
      }
    }
  }
  Mat gx(op_->measurement_dim(), 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    gx.col(i) = op_->feature(support_[i]);
    gx.col(n + i) = op_->dfeature(support_[i]);
  }
  Eigen::JacobiSVD<Mat> svd(gx, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& sv = svd.singularValues();
  if (sv.size() < 2 * n || !(sv[sv.size() - 1] > 1e-10 * sv[0])) {
    throw Error(ErrorCode::kSingularGram, "interpolation system is rank deficient");
  }
  Vec rhs = Vec::Zero(2 * n);
  rhs.head(n).setOnes();
  // p = (Gx^T)^+ rhs = U S^{-1} V^T rhs
  p_ = svd.matrixU() * (svd.matrixV().transpose() * rhs).cwiseQuotient(sv);
}

double CbpCertificate::eta(double x, int order) const {
  switch (order) {
    case 0: return op_->feature(x).dot(p_);
    case 1: return op_->dfeature(x).dot(p_);
    case 2: return op_->d2feature(x).dot(p_);
    case 3: {
      const double step = 1e-5 * std::max(1.0, std::abs(x));
      return (eta(x + step, 2) - eta(x - step, 2)) / (2.0 * step);
    }
    default: throw Error(ErrorCode::kInvalidParam, "order must be 0..3");
  }
}

IchReport CbpCertificate::ic_h(const Grid& grid) const {
  if (grid.dims() != 1) throw Error(ErrorCode::kDimUnsupported, "grid must be one-dimensional");
  const double half = 0.5 * grid.spacing(0);
  IchReport rep;
  rep.max_margin = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < grid.points(0); ++j) {
    const double x = grid.node(0, j);
    const bool on = std::any_of(support_.begin(), support_.end(), [&](double s) {
      return std::abs(s - x) <= 1e-9 * grid.spacing(0);
    });
    if (on) continue;
    const double margin = eta(x, 0) + half * std::abs(eta(x, 1));
    if (margin > rep.max_margin) {
      rep.max_margin = margin;
      rep.worst_node = j;
    }
  }
  rep.holds = rep.max_margin < 1.0;
  return rep;
}

}  // namespace srlasso
