// Copyright 2026 The srlasso Authors
// SPDX-License-Identifier: Apache-2.0

#include "srlasso/kernel_analysis.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace srlasso {

namespace {

// Value with first and second derivative.
struct Jet2 {
  double v = 0.0, d1 = 0.0, d2 = 0.0;
};

Jet2 operator*(const Jet2& a, const Jet2& b) {
  return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
}
Jet2 operator+(const Jet2& a, const Jet2& b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2}; }
Jet2 operator*(double s, const Jet2& a) { return {s * a.v, s * a.d1, s * a.d2}; }

// scaled kernel derivative of order j as a jet in x
Jet2 scaled_jet(const TranslationInvariantKernel& k, int j, double x) {
  const double scale = std::pow(k.curvature_at_zero(), -0.5 * j);
  return {scale * k.derivative(j, x), scale * k.derivative(j + 1, x),
          scale * k.derivative(j + 2, x)};
}

double pick(const Jet2& j, int order) {
  switch (order) {
    case 0: return j.v;
    case 1: return j.d1;
    case 2: return j.d2;
    default: throw Error(ErrorCode::kInvalidParam, "order must be 0, 1 or 2");
  }
}

}  // namespace

EtaCoefficients eta_coefficients(const TranslationInvariantKernel& kernel,
                                 const std::vector<double>& positions, const Vec& s_a,
                                 const Vec& s_b, double tau) {
  const Eigen::Index m = static_cast<Eigen::Index>(positions.size());
  if (m == 0 || s_a.size() != m || s_b.size() != m) {
    throw Error(ErrorCode::kDimMismatch, "one sign pair per position is required");
  }
  Mat ups(2 * m, 2 * m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double u = positions[i] - positions[j];
      ups(i, j) = kernel.kappa(u);
      ups(i, m + j) = -tau * kernel.scaled(1, u);
      ups(m + i, j) = tau * kernel.scaled(1, u);
      ups(m + i, m + j) = -tau * tau * kernel.scaled(2, u);
    }
  }
  Eigen::JacobiSVD<Mat> svd(ups, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec& sv = svd.singularValues();
  if (!(sv[sv.size() - 1] > 0.0) || sv[0] / sv[sv.size() - 1] >= 1e10) {
    throw Error(ErrorCode::kSingularGram, "interpolation system is singular");
  }
  Vec rhs(2 * m);
  rhs << s_a, s_b;
  const Vec sol = svd.solve(rhs);
  return {sol.head(m), sol.tail(m)};
}

EtaFunction::EtaFunction(const TranslationInvariantKernel& kernel, std::vector<double> positions,
                         EtaCoefficients coeffs, double tau)
    : kernel_(kernel),
      positions_(std::move(positions)),
      coeffs_(std::move(coeffs)),
      tau_(tau),
      curv_(kernel.curvature_at_zero()) {}

double EtaFunction::eta(double x, int order) const {
  if (order < 0 || order > 3) throw Error(ErrorCode::kInvalidParam, "order must be 0..3");
  // d/dx f(x_j - x) = -f'(x_j - x)
  const double sign = (order % 2 == 0) ? 1.0 : -1.0;
  const double inv_root = 1.0 / std::sqrt(curv_);
  double total = 0.0;
  for (std::size_t j = 0; j < positions_.size(); ++j) {
    const double u = positions_[j] - x;
    total += coeffs_.u[j] * kernel_.derivative(order, u) +
             tau_ * coeffs_.v[j] * kernel_.derivative(order + 1, u) * inv_root;
  }
  return sign * total;
}

double EtaFunction::f0(double x, int order) const {
  const double w = tau_ * tau_ / curv_;
  const double e0 = eta(x, 0), e1 = eta(x, 1);
  switch (order) {
    case 0: return e0 * e0 + w * e1 * e1;
    case 1: return 2.0 * e0 * e1 + 2.0 * w * e1 * eta(x, 2);
    case 2: {
      const double e2 = eta(x, 2);
      return 2.0 * (e1 * e1 + e0 * e2) + 2.0 * w * (e2 * e2 + e1 * eta(x, 3));
    }
    default: throw Error(ErrorCode::kInvalidParam, "order must be 0, 1 or 2");
  }
}

KFunctions::KFunctions(const TranslationInvariantKernel& kernel, double tau)
    : kernel_(kernel), tau_(tau) {
  if (!(tau > 0.0)) throw Error(ErrorCode::kInvalidParam, "tau must be positive");
}

double KFunctions::k0(double x, int order) const {
  const Jet2 k = scaled_jet(kernel_, 0, x), k1 = scaled_jet(kernel_, 1, x);
  return pick(k * k + (tau_ * tau_) * (k1 * k1), order);
}

double KFunctions::k1(double x, int order) const {
  const Jet2 k = scaled_jet(kernel_, 0, x), k1 = scaled_jet(kernel_, 1, x),
             k2 = scaled_jet(kernel_, 2, x);
  return pick(k1 * (k + (tau_ * tau_) * k2), order);
}

double KFunctions::k2(double x, int order) const {
  const Jet2 k1 = scaled_jet(kernel_, 1, x), k2 = scaled_jet(kernel_, 2, x);
  return pick((1.0 / (tau_ * tau_)) * (k1 * k1) + k2 * k2, order);
}

GFunction::GFunction(const TranslationInvariantKernel& kernel, double tau, double s_a, double s_b)
    : kernel_(kernel), k_(kernel, tau), s_a_(s_a), s_b_(s_b) {
  if (std::abs(s_a * s_a + s_b * s_b - 1.0) > 1e-10) {
    throw Error(ErrorCode::kInvalidParam, "sign pair must have unit norm");
  }
  if (std::abs(s_a) < 1e-12) throw Error(ErrorCode::kDegenerateSign, "amplitude sign vanishes");
  gamma_ = s_b / (s_a * tau);
}

double GFunction::value(double x, int order) const {
  return s_a_ * s_a_ * (k_.k0(x, order) - 2.0 * gamma_ * k_.k1(x, order)) +
         s_b_ * s_b_ * k_.k2(x, order);
}

double GFunction::slope_at_zero() const {
  const double tau = k_.tau();
  return 2.0 * s_a_ * s_b_ * std::sqrt(kernel_.curvature_at_zero()) * (1.0 - tau * tau) / tau;
}

double GFunction::curvature_at_zero() const {
  const double tau = k_.tau();
  const double k2 = kernel_.derivative(2, 0.0);
  const double k4 = kernel_.derivative(4, 0.0);
  return 2.0 * k2 *
         (s_a_ * s_a_ * (1.0 - tau * tau) + s_b_ * s_b_ * (k4 / (k2 * k2) - 1.0 / (tau * tau)));
}

double delta_min(const TranslationInvariantKernel& kernel, const std::vector<double>& positions,
                 int n_terms) {
  if (positions.size() < 2) throw Error(ErrorCode::kInvalidParam, "need at least two positions");
  double sep = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) sep = std::min(sep, std::abs(positions[i] - positions[j]));
  }
  if (!(sep > 0.0)) throw Error(ErrorCode::kInvalidParam, "positions coincide");
  if (n_terms <= 0) n_terms = static_cast<int>(positions.size());
  double worst = 0.0;
  for (int order = 0; order <= 4; ++order) {
    double total = 0.0;
    for (int i = 1; i <= n_terms; ++i) {
      const double dist = 0.5 * sep * i;
      total += std::abs(kernel.scaled(order, dist));
    }
    worst = std::max(worst, total);
  }
  return worst;
}

ThmGReport thm_g_condition_check(const TranslationInvariantKernel& kernel, double tau,
                                 double gamma_bound, double r, int scan_resolution,
                                 double far_extent) {
  if (!(tau > 0.0 && tau <= 1.0)) throw Error(ErrorCode::kInvalidParam, "tau must lie in (0, 1]");
  if (!(gamma_bound >= 0.0)) throw Error(ErrorCode::kInvalidParam, "gamma bound must be >= 0");
  if (!(r > 0.0) || scan_resolution < 2) throw Error(ErrorCode::kInvalidParam, "bad scan settings");
  if (far_extent <= 0.0) far_extent = 12.0 / std::sqrt(kernel.curvature_at_zero());
  const KFunctions k(kernel, tau);
  const double gammas[2] = {gamma_bound, -gamma_bound};

  ThmGReport rep;
  const double k0c = k.k0(0.0, 2);
  const double k2c = k.k2(0.0, 2);
  rep.k0_curvature_ratio = std::numeric_limits<double>::infinity();
  rep.k2_curvature_ratio = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 2 * scan_resolution; ++i) {
    const double x = -r + r * static_cast<double>(i) / scan_resolution;
    for (double g : gammas) {
      rep.k0_curvature_ratio =
          std::min(rep.k0_curvature_ratio, (k.k0(x, 2) - 2.0 * g * k.k1(x, 2)) / k0c);
    }
    rep.k2_curvature_ratio = std::min(rep.k2_curvature_ratio, k.k2(x, 2) / k2c);
  }
  // a flat peak (tau = 1 makes K0''(0) vanish) has no curvature to compare against
  const double flat = 1e-12 * kernel.curvature_at_zero();
  if (!(k0c < -flat)) rep.k0_curvature_ratio = 0.0;
  if (!(k2c < -flat)) rep.k2_curvature_ratio = 0.0;
  rep.k0_curvature = k0c < -flat && rep.k0_curvature_ratio > 0.0;
  rep.k2_curvature = k2c < -flat && rep.k2_curvature_ratio > 0.0;

  const long steps = static_cast<long>(std::ceil((far_extent - r) / r * scan_resolution));
  for (long i = 0; i <= steps; ++i) {
    const double mag = r + (far_extent - r) * static_cast<double>(i) / static_cast<double>(steps);
    for (double x : {mag, -mag}) {
      for (double g : gammas) {
        rep.k0_far_max = std::max(rep.k0_far_max, std::abs(k.k0(x) - 2.0 * g * k.k1(x)));
      }
      rep.k2_far_max = std::max(rep.k2_far_max, std::abs(k.k2(x)));
    }
  }
  rep.k0_far = rep.k0_far_max < 1.0;
  rep.k2_far = rep.k2_far_max < 1.0;
  return rep;
}

}  // namespace srlasso
