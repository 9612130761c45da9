// Copyright 2026 The srlasso Authors
// SPDX-License-Identifier: Apache-2.0
//
// Certificates of translation-invariant operators expressed through the
// kernel alone: interpolation coefficients, the eta function, the K and G
// profiles around a spike, separation constants and the curvature/far-field
// conditions.

#pragma once

#include "srlasso/operators.hpp"
#include "srlasso/types.hpp"

#include <vector>

namespace srlasso {

struct EtaCoefficients {
  Vec u;  // weights on kappa(x_j - x)
  Vec v;  // weights on tau * scaled kappa'(x_j - x)
};

// Solves the 2m x 2m interpolation system built from pairwise kernel values.
EtaCoefficients eta_coefficients(const TranslationInvariantKernel& kernel,
                                 const std::vector<double>& positions, const Vec& s_a,
                                 const Vec& s_b, double tau);

class EtaFunction {
 public:
  EtaFunction(const TranslationInvariantKernel& kernel, std::vector<double> positions,
              EtaCoefficients coeffs, double tau);

  // eta^(order)(x), order 0..3
  double eta(double x, int order = 0) const;
  // eta^2 + tau^2 / |kappa''(0)| eta'^2 and its first two derivatives
  double f0(double x, int order = 0) const;

 private:
  const TranslationInvariantKernel& kernel_;
  std::vector<double> positions_;
  EtaCoefficients coeffs_;
  double tau_;
  double curv_;
};

// K0, K1, K2 and their first two derivatives.
class KFunctions {
 public:
  KFunctions(const TranslationInvariantKernel& kernel, double tau);

  double k0(double x, int order = 0) const;
  double k1(double x, int order = 0) const;
  double k2(double x, int order = 0) const;
  double tau() const { return tau_; }

 private:
  const TranslationInvariantKernel& kernel_;
  double tau_;
};

// G = s_a^2 (K0 - 2 gamma K1) + s_b^2 K2 with gamma = s_b / (s_a tau).
class GFunction {
 public:
  GFunction(const TranslationInvariantKernel& kernel, double tau, double s_a, double s_b);

  double value(double x, int order = 0) const;

  // Closed forms at the origin.
  double value_at_zero() const { return 1.0; }
  double slope_at_zero() const;
  double curvature_at_zero() const;

 private:
  const TranslationInvariantKernel& kernel_;
  KFunctions k_;
  double s_a_;
  double s_b_;
  double gamma_;
};

// Kernel tail sum over n_terms points at multiples of half the minimum
// separation, maximized over derivative orders 0..4.
double delta_min(const TranslationInvariantKernel& kernel, const std::vector<double>& positions,
                 int n_terms = 0);

struct ThmGReport {
  double k0_curvature_ratio = 0.0;  // min over [-r, r] of (K0'' - 2 gamma K1'') / K0''(0)
  double k2_curvature_ratio = 0.0;  // min over [-r, r] of K2'' / K2''(0)
  double k0_far_max = 0.0;          // max over |x| >= r of |K0 - 2 gamma K1|
  double k2_far_max = 0.0;          // max over |x| >= r of |K2|
  bool k0_curvature = false;
  bool k2_curvature = false;
  bool k0_far = false;
  bool k2_far = false;

  double delta_k0() const { return 1.0 - k0_curvature_ratio; }
  double delta_k2() const { return 1.0 - k2_curvature_ratio; }
  double mu_k0() const { return 1.0 - k0_far_max; }
  double mu_k2() const { return 1.0 - k2_far_max; }
  bool all() const { return k0_curvature && k2_curvature && k0_far && k2_far; }
};

// Scans the four conditions with gamma = +-gamma_bound. scan_resolution is the
// number of samples per length r; the far field is scanned up to far_extent
// (default 12 / sqrt(|kappa''(0)|)).
ThmGReport thm_g_condition_check(const TranslationInvariantKernel& kernel, double tau,
                                 double gamma_bound, double r, int scan_resolution = 200,
                                 double far_extent = 0.0);

}  // namespace srlasso
