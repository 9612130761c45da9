// Copyright 2026 The srlasso Authors
// SPDX-License-Identifier: Apache-2.0

#include "srlasso/operators.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace srlasso {
namespace {

using testing::rel_error;

struct OperatorCase {
  const char* name;
  OperatorPtr op;
  std::vector<double> lo, hi;
};

std::vector<OperatorCase> all_operators() {
  return {
      {"fourier", fourier_lowpass_1d(3), {0.0}, {1.0}},
      {"gaussian", gaussian_sampling_1d(0.07, uniform_samples(50, 0.0, 1.0)), {0.05}, {0.95}},
      {"gaussian_psf",
       gaussian_sampling_1d(0.07, uniform_samples(30, 0.0, 2.03), GaussianWidth::kPointSpread),
       {0.1},
       {1.9}},
      {"gauss_laplace",
       gauss_laplace_separable(0.1, uniform_samples(20, 0.0, 1.0), uniform_samples(3, 0.0, 1.0)),
       {0.05, 0.05},
       {0.95, 0.95}},
      {"gauss_laplace_3d",
       gauss_laplace_3d(0.2, uniform_samples(8, 0.0, 1.0), uniform_samples(8, 0.0, 1.0),
                        uniform_samples(3, 0.0, 1.0)),
       {0.1, 0.1, 0.1},
       {0.9, 0.9, 0.9}},
  };
}

Vec random_point(const OperatorCase& c, std::mt19937_64& rng) {
  Vec x(static_cast<Eigen::Index>(c.lo.size()));
  for (std::size_t k = 0; k < c.lo.size(); ++k) {
    x[k] = std::uniform_real_distribution<double>(c.lo[k], c.hi[k])(rng);
  }
  return x;
}

TEST(Operators, FeaturesAreNormalized) {
  std::mt19937_64 rng(3);
  for (const OperatorCase& c : all_operators()) {
    for (int i = 0; i < 100; ++i) {
      EXPECT_NEAR(c.op->feature(random_point(c, rng)).norm(), 1.0, 1e-10) << c.name;
    }
  }
}

TEST(Operators, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(5);
  for (const OperatorCase& c : all_operators()) {
    const int d = c.op->dims();
    for (int i = 0; i < 50; ++i) {
      const Vec x = random_point(c, rng);
      const Mat grad = c.op->dfeature(x);
      const std::vector<Mat> hess = c.op->d2feature(x);
      for (int k = 0; k < d; ++k) {
        const double step = 1e-5 * (c.hi[k] - c.lo[k]);
        Vec xp = x, xm = x;
        xp[k] += step;
        xm[k] -= step;
        const Vec fd1 = (c.op->feature(xp) - c.op->feature(xm)) / (2 * step);
        EXPECT_LE(rel_error(grad.col(k), fd1, 1e-12), 1e-5) << c.name << " axis " << k;
        const Mat fd2 = (c.op->dfeature(xp) - c.op->dfeature(xm)) / (2 * step);
        for (int l = 0; l < d; ++l) {
          EXPECT_LE(rel_error(hess[k].col(l), fd2.col(l), 1e-6 * hess[k].norm()), 1e-4)
              << c.name << " axes " << k << "," << l;
        }
      }
      if (d == 1) {
        const double step = 1e-5 * (c.hi[0] - c.lo[0]);
        const Vec fd3 = (c.op->d2feature(x[0] + step) - c.op->d2feature(x[0] - step)) / (2 * step);
        EXPECT_LE(rel_error(c.op->d3feature(x[0]), fd3, 1e-12), 1e-4) << c.name;
      }
    }
  }
}

TEST(Operators, HessianIsSymmetric) {
  std::mt19937_64 rng(8);
  for (const OperatorCase& c : all_operators()) {
    const int d = c.op->dims();
    const std::vector<Mat> h = c.op->d2feature(random_point(c, rng));
    for (int k = 0; k < d; ++k) {
      for (int l = 0; l < d; ++l) EXPECT_LT((h[k].col(l) - h[l].col(k)).norm(), 1e-9) << c.name;
    }
  }
}

TEST(Operators, ThirdDerivativeOnlyInOneDimension) {
  const OperatorPtr op =
      gauss_laplace_separable(0.1, uniform_samples(20, 0.0, 1.0), uniform_samples(3, 0.0, 1.0));
  try {
    op->d3feature(0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimUnsupported);
  }
}

TEST(Fourier, DimensionsAndKernel) {
  const OperatorPtr op = fourier_lowpass_1d(3);
  EXPECT_EQ(op->measurement_dim(), 14);
  ASSERT_NE(op->kernel(), nullptr);
  EXPECT_DOUBLE_EQ(op->kernel()->kappa(0.0), 1.0);
  const OperatorPtr one = fourier_lowpass_1d(1);
  EXPECT_NEAR(one->feature(0.0).dot(one->feature(0.5)), -1.0 / 3.0, 1e-14);
  EXPECT_THROW(fourier_lowpass_1d(0), Error);
}

TEST(Fourier, InnerProductIsTranslationInvariant) {
  const OperatorPtr op = fourier_lowpass_1d(3);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng), y = u(rng), s = u(rng);
    const double a = op->feature(x).dot(op->feature(y));
    EXPECT_NEAR(a, op->feature(x + s).dot(op->feature(y + s)), 1e-10);
    EXPECT_NEAR(a, op->kernel()->kappa(x - y), 1e-10);
  }
}

TEST(Fourier, DerivativeNormIsConstant) {
  const OperatorPtr op = fourier_lowpass_1d(3);
  const double c = op->kernel()->curvature_at_zero();
  EXPECT_NEAR(op->dfeature(0.13).norm(), op->dfeature(0.77).norm(), 1e-10);
  EXPECT_NEAR(op->dfeature(0.13).squaredNorm(), c, 1e-9 * c);
  const NormalizedDerivative nd = normalized_derivative(*op, Vec::Constant(1, 0.4));
  EXPECT_LT((nd.columns.col(0) - op->dfeature(0.4) / std::sqrt(c)).norm(), 1e-12);
}

TEST(Gaussian, NormalizationAndDenseKernel) {
  const OperatorPtr op = gaussian_sampling_1d(0.07, uniform_samples(50, 0.0, 1.0));
  EXPECT_EQ(op->measurement_dim(), 50);
  EXPECT_NEAR(op->feature(0.5).norm(), 1.0, 1e-10);
  const OperatorPtr dense = gaussian_sampling_1d(0.07, uniform_samples(500, 0.0, 1.0));
  EXPECT_NEAR(dense->feature(0.4).dot(dense->feature(0.47)), std::exp(-0.5), 2e-2);
  EXPECT_THROW(gaussian_sampling_1d(0.0, uniform_samples(5, 0.0, 1.0)), Error);
  EXPECT_THROW(gaussian_sampling_1d(0.1, {0.5}), Error);
}

TEST(GaussLaplace, MeasurementDimAndFlatDepth) {
  const OperatorPtr op =
      gauss_laplace_separable(0.1, uniform_samples(20, 0.0, 1.0), uniform_samples(3, 0.0, 1.0));
  EXPECT_EQ(op->dims(), 2);
  EXPECT_EQ(op->measurement_dim(), 60);
  const OperatorPtr flat = gauss_laplace_separable(0.1, uniform_samples(20, 0.0, 1.0), {0.0, 0.0});
  Vec x(2);
  x << 0.4, 0.7;
  EXPECT_LT(flat->dfeature(x).col(1).norm(), 1e-14);
  EXPECT_THROW(gauss_laplace_separable(0.1, {}, {0.5}), Error);
}

TEST(GaussLaplace, WhitenedDerivativeIsOrthonormal) {
  const OperatorPtr op =
      gauss_laplace_separable(0.1, uniform_samples(20, 0.0, 1.0), uniform_samples(3, 0.0, 1.0));
  Vec x(2);
  x << 0.33, 0.61;
  const NormalizedDerivative nd = normalized_derivative(*op, x);
  EXPECT_LT((nd.columns.transpose() * nd.columns - Mat::Identity(2, 2)).norm(), 1e-10);
  EXPECT_LT((nd.metric_sqrt * nd.metric_inv_sqrt - Mat::Identity(2, 2)).norm(), 1e-10);
}

TEST(GaussLaplace, FlatDepthDerivativeIsDegenerate) {
  const OperatorPtr flat = gauss_laplace_separable(0.1, uniform_samples(20, 0.0, 1.0), {0.0, 0.0});
  Vec x(2);
  x << 0.4, 0.7;
  try {
    normalized_derivative(*flat, x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateDerivative);
  }
}

TEST(GaussianKernel, DerivativesAndConstants) {
  const double sigma = 0.3;
  const GaussianKernel k(sigma);
  EXPECT_DOUBLE_EQ(k.kappa(0.0), 1.0);
  EXPECT_NEAR(k.derivative(1, 0.0), 0.0, 1e-12);
  EXPECT_NEAR(k.derivative(2, 0.0), -1.0 / (sigma * sigma), 1e-12);
  EXPECT_NEAR(k.derivative(4, 0.0), 3.0 / std::pow(sigma, 4), 1e-9);
  EXPECT_NEAR(std::pow(k.derivative(2, 0.0), 2) / k.derivative(4, 0.0), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(k.curvature_at_zero(), 1.0 / (sigma * sigma), 1e-12);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const double x = u(rng);
    for (int j = 1; j <= 4; ++j) {
      const double fd = testing::central_difference([&](double t) { return k.derivative(j - 1, t); }, x, 1e-5);
      EXPECT_LE(rel_error(k.derivative(j, x), fd, 1.0), 1e-5) << "order " << j;
    }
  }
}

TEST(DirichletKernel, DerivativesMatchFiniteDifferences) {
  const DirichletKernel k(3);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const double x = u(rng);
    for (int j = 1; j <= 4; ++j) {
      const double ref = std::max(1.0, std::abs(k.derivative(j, 0.0)));
      const double fd = testing::central_difference([&](double t) { return k.derivative(j - 1, t); }, x, 1e-6);
      EXPECT_LE(std::abs(k.derivative(j, x) - fd) / ref, 1e-6) << "order " << j;
    }
  }
}

TEST(Forward, LinearAndMatchesFeatures) {
  const OperatorPtr op = fourier_lowpass_1d(3);
  EXPECT_LT(forward(*op, DiscreteMeasure(1)).norm(), 1e-300);
  EXPECT_LT((forward(*op, DiscreteMeasure::line({0.2}, {1.0})) - op->feature(0.2)).norm(), 1e-15);
  const DiscreteMeasure mu = DiscreteMeasure::line({0.2, 0.7}, {2.0, 1.0});
  EXPECT_LT((forward(*op, mu) - (2.0 * op->feature(0.2) + op->feature(0.7))).norm(), 1e-14);
  const DiscreteMeasure nu = DiscreteMeasure::line({0.1, 0.7}, {-1.5, 0.5});
  std::vector<Atom> combo;
  for (const Atom& a : mu.atoms()) combo.push_back({a.position, 3.0 * a.amplitude});
  for (const Atom& a : nu.atoms()) combo.push_back({a.position, -2.0 * a.amplitude});
  const Vec lhs = forward(*op, DiscreteMeasure::merged(1, combo));
  EXPECT_LT((lhs - (3.0 * forward(*op, mu) - 2.0 * forward(*op, nu))).norm(), 1e-12);
  EXPECT_THROW(forward(*op, DiscreteMeasure(2)), Error);
}

}  // namespace
}  // namespace srlasso
