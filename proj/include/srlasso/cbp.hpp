// Copyright 2026 The srlasso Authors
// SPDX-License-Identifier: Apache-2.0
//
// Continuous basis pursuit for positive spikes, solved as a nonnegative Lasso
// over the interpolated columns phi(x_j) +- (h/2) phi'(x_j).

#pragma once

#include "srlasso/group_solver.hpp"
#include "srlasso/operators.hpp"
#include "srlasso/types.hpp"

#include <vector>

namespace srlasso {

struct CbpDesign {
  OperatorPtr op;
  Grid grid;
  double h = 0.0;
  DesignMatrix matrix;  // [A + (h/2) B, A - (h/2) B]
  Mat features;         // A: phi at nodes
  Mat derivatives;      // B: unnormalized phi' at nodes
};

CbpDesign build_cbp_design(OperatorPtr op, const Grid& grid);

struct CbpResult {
  SolveResult solve;
  Vec r, l;  // nonnegative coefficients of the two column blocks
  Vec a, b;  // amplitude a = r + l, moment b = (h/2)(r - l)
  DiscreteMeasure measure;
};

// Forces the nonnegative mode of the solver.
CbpResult solve_cbp(const CbpDesign& design, const Vec& y, SolverConfig cfg);

struct IchReport {
  bool holds = false;
  double max_margin = 0.0;  // max over off-support nodes of eta + (h/2)|eta'|
  int worst_node = -1;
};

// eta_V(x) = <phi(x), p_V> with p_V interpolating value 1 and slope 0 at the
// support.
class CbpCertificate {
 public:
  CbpCertificate(OperatorPtr op, std::vector<double> support_positions);

  // Orders 0..2 analytic, order 3 by central differences of order 2.
  double eta(double x, int order = 0) const;
  const Vec& dual() const { return p_; }

  IchReport ic_h(const Grid& grid) const;

 private:
  OperatorPtr op_;
  std::vector<double> support_;
  Vec p_;
};

}  // namespace srlasso
