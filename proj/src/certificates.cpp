// Copyright 2026 The srlasso Authors
// SPDX-License-Identifier: Apache-2.0

#include "srlasso/certificates.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace srlasso {

namespace {

constexpr double kRankCutoff = 1e-10;

// (A^T)^+ s with singular values below the cutoff discarded.
Vec transpose_pinv_apply(const Mat& a, const Vec& s) {
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& sv = svd.singularValues();
  const double cut = kRankCutoff * (sv.size() > 0 ? sv[0] : 0.0);
  Vec coeff = svd.matrixV().transpose() * s;
  for (Eigen::Index i = 0; i < sv.size(); ++i) coeff[i] = sv[i] > cut ? coeff[i] / sv[i] : 0.0;
  return svd.matrixU() * coeff;
}

// Values <gamma_k(x), p> of a 1-D design and their first two derivatives.
struct Correlations {
  double c[2][3] = {{0, 0, 0}, {0, 0, 0}};
};

Correlations correlations_1d(const SrDesign& design, const Vec& p, double x, int order) {
  const MeasurementOperator& op = *design.op;
  const double tau = design.tau[0];
  Correlations out;
  out.c[0][0] = op.feature(x).dot(p);
  const Vec d1 = op.dfeature(x);
  const double a0 = d1.dot(p);
  const double s0 = d1.squaredNorm();
  const double u0 = 1.0 / std::sqrt(s0);
  out.c[1][0] = tau * a0 * u0;
  if (order < 1) return out;

  const Vec d2 = op.d2feature(x);
  const double a1 = d2.dot(p);
  const double s1 = 2.0 * d1.dot(d2);
  const double u1 = -0.5 * u0 * u0 * u0 * s1;
  out.c[0][1] = a0;
  out.c[1][1] = tau * (a1 * u0 + a0 * u1);
  if (order < 2) return out;

  const Vec d3 = op.d3feature(x);
  const double a2 = d3.dot(p);
  const double s2 = 2.0 * (d2.squaredNorm() + d1.dot(d3));
  const double u3 = u0 * u0 * u0;
  const double u2 = 0.75 * u3 * u0 * u0 * s1 * s1 - 0.5 * u3 * s2;
  out.c[0][2] = a1;
  out.c[1][2] = tau * (a2 * u0 + 2.0 * a1 * u1 + a0 * u2);
  return out;
}

std::vector<double> support_positions_1d(const SrDesign& design, const std::vector<int>& support) {
  std::vector<double> xs;
  for (int j : support) xs.push_back(design.grid.position(j)[0]);
  return xs;
}

}  // namespace

DualCertificate minimal_norm_certificate(const DesignMatrix& gamma, const std::vector<int>& support,
                                         const GroupedVector& sign) {
  if (support.empty()) throw Error(ErrorCode::kInvalidParam, "certificate needs a nonempty support");
  if (sign.group_size() != gamma.group_size() ||
      sign.n_groups() != static_cast<int>(support.size())) {
    throw Error(ErrorCode::kDimMismatch, "sign pattern does not match the support");
  }
  for (int j : support) {
    if (j < 0 || j >= gamma.n_groups()) throw Error(ErrorCode::kInvalidParam, "support index out of range");
  }
  const Mat sub = gamma.restrict_to(support);
  return DualCertificate{transpose_pinv_apply(sub, sign.data()), support, sign};
}

IcReport ic_check(const DualCertificate& cert, const DesignMatrix& gamma) {
  IcReport rep;
  const int q = gamma.group_size();
  const Vec corr = gamma.matrix().transpose() * cert.p0;
  std::vector<bool> on(gamma.n_groups(), false);
  for (std::size_t k = 0; k < cert.support.size(); ++k) {
    const int j = cert.support[k];
    on[j] = true;
    const double err =
        (corr.segment(static_cast<Eigen::Index>(q) * j, q) - cert.sign.group(static_cast<int>(k))).norm();
    rep.interpolation_error = std::max(rep.interpolation_error, err);
  }
  for (int j = 0; j < gamma.n_groups(); ++j) {
    if (on[j]) continue;
    rep.max_offsupport =
        std::max(rep.max_offsupport, corr.segment(static_cast<Eigen::Index>(q) * j, q).norm());
  }
  rep.holds = rep.max_offsupport < 1.0 - 1e-9 && rep.interpolation_error <= 1e-8;
  return rep;
}

NullspaceReport nullspace_condition_check(const Mat& gamma_support, const GroupedVector& z_support) {
  const GroupedVector dir = group_sign(z_support);
  const int q = z_support.group_size();
  const Eigen::Index n = z_support.data().size();
  if (gamma_support.cols() != n) {
    throw Error(ErrorCode::kDimMismatch, "support columns differ from coefficient length");
  }
  Mat stacked = Mat::Zero(gamma_support.rows() + n, n);
  stacked.topRows(gamma_support.rows()) = gamma_support;
  for (int i = 0; i < z_support.n_groups(); ++i) {
    const Vec u = dir.group(i);
    const Eigen::Index o = static_cast<Eigen::Index>(q) * i;
    stacked.block(gamma_support.rows() + o, o, q, q) = Mat::Identity(q, q) - u * u.transpose();
  }
  Eigen::JacobiSVD<Mat> svd(stacked);
  const Vec& sv = svd.singularValues();
  NullspaceReport rep;
  rep.largest_sv = sv[0];
  rep.smallest_sv = sv[sv.size() - 1];
  rep.holds = rep.smallest_sv > 1e-8 * rep.largest_sv;
  return rep;
}

DualCertificate sr_precertificate(const SrDesign& design, const DiscreteMeasure& mu0) {
  const int d = design.dims();
  const int q = 1 + d;
  const NodeDecomposition parts = decompose_on_grid(design.grid, mu0);
  // accumulate amplitude and first moment per node
  std::map<int, std::pair<double, Vec>> per_node;
  for (std::size_t i = 0; i < parts.nodes.size(); ++i) {
    auto [it, fresh] = per_node.try_emplace(parts.nodes[i], 0.0, Vec::Zero(d));
    it->second.first += parts.amplitudes[i];
    it->second.second += parts.amplitudes[i] * parts.shifts[i];
  }
  std::vector<int> support;
  std::vector<double> values;
  for (const auto& [node, am] : per_node) {
    if (am.first == 0.0) continue;
    // tau_k b_k = (g^{1/2} a t)_k; axes with tau_k = 0 carry no shift
    const Vec moment = design.metric_sqrt[node] * am.second;
    support.push_back(node);
    values.push_back(am.first);
    for (int k = 0; k < d; ++k) {
      values.push_back(design.tau[k] > 0.0 ? moment[k] / design.tau[k] : 0.0);
    }
  }
  if (support.empty()) throw Error(ErrorCode::kInvalidParam, "measure has no mass on the grid");
  const GroupedVector z(q, Eigen::Map<Vec>(values.data(), static_cast<Eigen::Index>(values.size())));
  return minimal_norm_certificate(design.matrix, support, group_sign(z));
}

double f0_eval(const SrDesign& design, const DualCertificate& cert, const Vec& x, int order) {
  if (order < 0 || order > 2) throw Error(ErrorCode::kInvalidParam, "order must be 0, 1 or 2");
  if (design.dims() == 1) return f0_eval(design, cert, x[0], order);
  if (order != 0) {
    throw Error(ErrorCode::kDimUnsupported, "certificate derivatives are only available in 1-D");
  }
  const MeasurementOperator& op = *design.op;
  const NormalizedDerivative nd = normalized_derivative(op, x);
  const double c0 = op.feature(x).dot(cert.p0);
  double total = c0 * c0;
  const Vec c = nd.columns.transpose() * cert.p0;
  for (int k = 0; k < design.dims(); ++k) total += design.tau[k] * design.tau[k] * c[k] * c[k];
  return total;
}

double f0_eval(const SrDesign& design, const DualCertificate& cert, double x, int order) {
  if (design.dims() != 1) throw Error(ErrorCode::kDimMismatch, "scalar position on a multi-d design");
  const Correlations c = correlations_1d(design, cert.p0, x, order);
  switch (order) {
    case 0: return c.c[0][0] * c.c[0][0] + c.c[1][0] * c.c[1][0];
    case 1: return 2.0 * (c.c[0][0] * c.c[0][1] + c.c[1][0] * c.c[1][1]);
    case 2:
      return 2.0 * (c.c[0][1] * c.c[0][1] + c.c[0][0] * c.c[0][2] + c.c[1][1] * c.c[1][1] +
                    c.c[1][0] * c.c[1][2]);
    default: throw Error(ErrorCode::kInvalidParam, "order must be 0, 1 or 2");
  }
}

double max_offsupport_node_f0(const SrDesign& design, const DualCertificate& cert) {
  std::vector<bool> on(design.grid.num_nodes(), false);
  for (int j : cert.support) on[j] = true;
  double worst = 0.0;
  for (int j = 0; j < design.grid.num_nodes(); ++j) {
    if (!on[j]) worst = std::max(worst, f0_eval(design, cert, design.grid.position(j), 0));
  }
  return worst;
}

CertificateDiagnostics certificate_diagnostics(const SrDesign& design, const DualCertificate& cert,
                                               double r, int scan_resolution) {
  if (design.dims() != 1) throw Error(ErrorCode::kDimUnsupported, "diagnostics scan 1-D designs");
  if (!(r > 0.0)) throw Error(ErrorCode::kInvalidParam, "radius must be positive");
  if (scan_resolution < 100) {
    throw Error(ErrorCode::kInvalidParam, "scan resolution must be at least 100 per cell");
  }
  const Grid& grid = design.grid;
  const std::vector<double> centers = support_positions_1d(design, cert.support);

  CertificateDiagnostics out;
  out.r = r;
  for (double c : centers) out.eps1 = std::max(out.eps1, std::abs(f0_eval(design, cert, c, 1)));

  std::vector<bool> on(grid.num_nodes(), false);
  for (int j : cert.support) on[j] = true;
  for (int j = 0; j < grid.num_nodes(); ++j) {
    if (on[j]) continue;
    const double v = f0_eval(design, cert, grid.position(j)[0], 0);
    out.max_offsupport_node = std::max(out.max_offsupport_node, v);
    if (v >= 1.0) out.degenerate_points.push_back(j);
  }
  out.degenerate = !out.degenerate_points.empty();

  const double h = grid.spacing(0);
  const double lo = grid.node(0, 0);
  const double hi = grid.node(0, grid.points(0) - 1);
  const long steps = static_cast<long>(std::ceil((hi - lo) / h * scan_resolution));
  double near_max_curv = -std::numeric_limits<double>::infinity();
  double far_max = -std::numeric_limits<double>::infinity();
  for (long i = 0; i <= steps; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps);
    bool near = false;
    for (double c : centers) near = near || std::abs(x - c) <= r;
    if (near) {
      near_max_curv = std::max(near_max_curv, f0_eval(design, cert, x, 2));
    } else {
      far_max = std::max(far_max, f0_eval(design, cert, x, 0));
    }
  }
  // the support nodes themselves always belong to the near set
  for (double c : centers) near_max_curv = std::max(near_max_curv, f0_eval(design, cert, c, 2));
  out.curvature = -near_max_curv;
  out.mu = std::isfinite(far_max) ? 1.0 - far_max : 1.0;
  out.exceeds_between_nodes = out.mu <= 0.0;
  return out;
}

}  // namespace srlasso
