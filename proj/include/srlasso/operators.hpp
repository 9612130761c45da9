// Copyright 2026 The srlasso Authors
// SPDX-License-Identifier: Apache-2.0
//
// Measurement operators x -> phi(x) in R^M with analytic derivatives, and
// translation-invariant kernels.

#pragma once

#include "srlasso/types.hpp"

#include <memory>
#include <string>
#include <vector>

namespace srlasso {

// kappa(u) with derivatives up to order four.
class TranslationInvariantKernel {
 public:
  virtual ~TranslationInvariantKernel() = default;
  virtual double derivative(int order, double u) const = 0;

  double kappa(double u) const { return derivative(0, u); }
  // |kappa''(0)|.
  double curvature_at_zero() const;
  // kappa^(j)(u) * |kappa''(0)|^(-j/2).
  double scaled(int order, double u) const;
};

class GaussianKernel final : public TranslationInvariantKernel {
 public:
  explicit GaussianKernel(double sigma);
  double derivative(int order, double u) const override;
  double sigma() const { return sigma_; }

 private:
  double sigma_;
};

// sum_{|k|<=fc} cos(2 pi k u) / (2 fc + 1).
class DirichletKernel final : public TranslationInvariantKernel {
 public:
  explicit DirichletKernel(int fc);
  double derivative(int order, double u) const override;

 private:
  int fc_;
};

std::shared_ptr<const TranslationInvariantKernel> gaussian_kernel(double sigma);

class MeasurementOperator {
 public:
  virtual ~MeasurementOperator() = default;

  virtual int dims() const = 0;
  virtual int measurement_dim() const = 0;
  virtual bool normalized() const { return true; }

  virtual Vec feature(const Vec& x) const = 0;
  // M x d Jacobian.
  virtual Mat dfeature(const Vec& x) const = 0;
  // Entry k is the M x d matrix of d^2 phi / dx_k dx_l.
  virtual std::vector<Mat> d2feature(const Vec& x) const = 0;
  // Third derivative, one-dimensional operators only.
  virtual Vec d3feature(double x) const;

  // Kernel <phi(x), phi(x')> = kappa(x - x') when the operator is exactly
  // translation invariant, otherwise null.
  virtual std::shared_ptr<const TranslationInvariantKernel> kernel() const { return nullptr; }

  virtual std::string describe() const = 0;

  Vec feature(double x) const { return feature(Vec::Constant(1, x)); }
  Vec dfeature(double x) const { return dfeature(Vec::Constant(1, x)).col(0); }
  Vec d2feature(double x) const { return d2feature(Vec::Constant(1, x))[0].col(0); }
};

using OperatorPtr = std::shared_ptr<const MeasurementOperator>;

// Real and imaginary parts of exp(-2 pi i k x), |k| <= fc, stacked.
OperatorPtr fourier_lowpass_1d(int fc);

enum class GaussianWidth {
  kFeature,      // exp(-(x - t)^2 / sigma^2)
  kPointSpread,  // exp(-(x - t)^2 / (2 sigma^2))
};

OperatorPtr gaussian_sampling_1d(double sigma, std::vector<double> sample_points,
                                 GaussianWidth width = GaussianWidth::kFeature);

// Gaussian in position, Laplace transform in depth: d = 2.
OperatorPtr gauss_laplace_separable(double sigma, std::vector<double> omega_samples,
                                    std::vector<double> r_samples);

// Gaussian in two lateral axes, Laplace in depth: d = 3.
OperatorPtr gauss_laplace_3d(double sigma, std::vector<double> x1_samples,
                             std::vector<double> x2_samples, std::vector<double> z_samples);

std::vector<double> uniform_samples(int count, double lo, double hi);

Vec forward(const MeasurementOperator& op, const DiscreteMeasure& mu);

struct NormalizedDerivative {
  Mat columns;          // grad phi * g^{-1/2}, orthonormal columns
  Mat metric_sqrt;      // g^{1/2}, g = grad phi^T grad phi
  Mat metric_inv_sqrt;  // g^{-1/2}
};

NormalizedDerivative normalized_derivative(const MeasurementOperator& op, const Vec& x);

}  // namespace srlasso
