// Copyright 2026 The srlasso Authors
// SPDX-License-Identifier: Apache-2.0
//
// Minimal-norm dual certificates, irrepresentability and nullspace checks, and
// the certificate function f0(x) = |gamma(x)^T p0|^2 of a grid design.

#pragma once

#include "srlasso/group_solver.hpp"
#include "srlasso/sr_lasso.hpp"
#include "srlasso/types.hpp"

#include <vector>

namespace srlasso {

struct DualCertificate {
  Vec p0;
  std::vector<int> support;
  GroupedVector sign;  // one unit group per support entry
};

// p0 = Gamma_I (Gamma_I^T Gamma_I)^+ s with a relative rank cutoff of 1e-10.
DualCertificate minimal_norm_certificate(const DesignMatrix& gamma, const std::vector<int>& support,
                                         const GroupedVector& sign);

struct IcReport {
  bool holds = false;
  double max_offsupport = 0.0;
  double interpolation_error = 0.0;
};

IcReport ic_check(const DualCertificate& cert, const DesignMatrix& gamma);

struct NullspaceReport {
  bool holds = false;
  double smallest_sv = 0.0;
  double largest_sv = 0.0;
};

// Injectivity of v -> (Gamma_I v, Q v) where Q removes, group by group, the
// component along z_i.
NullspaceReport nullspace_condition_check(const Mat& gamma_support, const GroupedVector& z_support);

// Certificate of the grid design for the sign pattern that mu0 induces through
// its nearest-node decomposition.
DualCertificate sr_precertificate(const SrDesign& design, const DiscreteMeasure& mu0);

// f0 and, in 1-D, its first two derivatives.
double f0_eval(const SrDesign& design, const DualCertificate& cert, const Vec& x, int order = 0);
double f0_eval(const SrDesign& design, const DualCertificate& cert, double x, int order = 0);

struct CertificateDiagnostics {
  double eps1 = 0.0;       // max |f0'| over support nodes
  double curvature = 0.0;  // -max f0'' near the support
  double mu = 0.0;         // 1 - max f0 away from the support
  double r = 0.0;
  std::vector<int> degenerate_points;  // off-support nodes with f0 >= 1
  double max_offsupport_node = 0.0;
  bool degenerate = false;             // some off-support node reaches 1
  bool exceeds_between_nodes = false;  // mu <= 0
};

// Dense scan across the node range; 1-D designs only.
CertificateDiagnostics certificate_diagnostics(const SrDesign& design, const DualCertificate& cert,
                                               double r, int scan_resolution = 200);

// Largest f0 over off-support nodes; any dimension.
double max_offsupport_node_f0(const SrDesign& design, const DualCertificate& cert);

}  // namespace srlasso
