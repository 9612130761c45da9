// Copyright 2026 The srlasso Authors
// SPDX-License-Identifier: Apache-2.0

#include "srlasso/operators.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

namespace srlasso {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Raw (unnormalized) derivatives of a sampled feature map.
struct Jet {
  Vec f;
  Mat df;                // M x d
  std::vector<Mat> d2f;  // d entries of M x d
  Vec d3f;               // 1-D only
};

// Derivatives of f / |f| from those of f, writing m = s^{-1/2} with s = f.f.
Jet normalize_jet(const Jet& raw, int order) {
  const int d = static_cast<int>(raw.df.cols());
  const double s = raw.f.squaredNorm();
  if (!(s > 0.0)) throw Error(ErrorCode::kInvalidParam, "feature vector vanishes");
  const double m = 1.0 / std::sqrt(s);
  const double s32 = m * m * m;
  const double s52 = s32 * m * m;

  Jet out;
  out.f = raw.f * m;
  if (order < 1) return out;

  Vec sk(d), mk(d);
  for (int k = 0; k < d; ++k) {
    sk[k] = 2.0 * raw.f.dot(raw.df.col(k));
    mk[k] = -0.5 * s32 * sk[k];
  }
  out.df.resize(raw.f.size(), d);
  for (int k = 0; k < d; ++k) out.df.col(k) = raw.df.col(k) * m + raw.f * mk[k];
  if (order < 2) return out;

  out.d2f.assign(d, Mat(raw.f.size(), d));
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      const double skl = 2.0 * (raw.df.col(k).dot(raw.df.col(l)) + raw.f.dot(raw.d2f[k].col(l)));
      const double mkl = 0.75 * s52 * sk[k] * sk[l] - 0.5 * s32 * skl;
      out.d2f[k].col(l) = raw.d2f[k].col(l) * m + raw.df.col(k) * mk[l] +
                          raw.df.col(l) * mk[k] + raw.f * mkl;
    }
  }
  if (order < 3) return out;

  const Vec& f1 = raw.df.col(0);
  const Vec& f2 = raw.d2f[0].col(0);
  const double s1 = sk[0];
  const double s2 = 2.0 * (f1.squaredNorm() + raw.f.dot(f2));
  const double s3 = 2.0 * (3.0 * f1.dot(f2) + raw.f.dot(raw.d3f));
  const double s72 = s52 * m * m;
  const double m1 = mk[0];
  const double m2 = 0.75 * s52 * s1 * s1 - 0.5 * s32 * s2;
  const double m3 = -1.875 * s72 * s1 * s1 * s1 + 2.25 * s52 * s1 * s2 - 0.5 * s32 * s3;
  out.d3f = raw.d3f * m + 3.0 * f2 * m1 + 3.0 * f1 * m2 + raw.f * m3;
  return out;
}

void require_dims(const Vec& x, int d) {
  if (x.size() != d) {
    throw Error(ErrorCode::kDimMismatch, "position has " + std::to_string(x.size()) +
                                             " coordinates, operator expects " + std::to_string(d));
  }
}

class FourierLowpass final : public MeasurementOperator {
 public:
  explicit FourierLowpass(int fc) : fc_(fc), kernel_(std::make_shared<DirichletKernel>(fc)) {}

  int dims() const override { return 1; }
  int measurement_dim() const override { return 2 * (2 * fc_ + 1); }

  Vec feature(const Vec& x) const override { return nth(x, 0); }
  Mat dfeature(const Vec& x) const override { return nth(x, 1); }
  std::vector<Mat> d2feature(const Vec& x) const override { return {nth(x, 2)}; }
  Vec d3feature(double x) const override { return nth(Vec::Constant(1, x), 3); }

  std::shared_ptr<const TranslationInvariantKernel> kernel() const override { return kernel_; }

  std::string describe() const override { return "fourier fc=" + std::to_string(fc_); }

 private:
  // n-th derivative of cos(w x) is w^n cos(w x + n pi / 2); -sin(w x) = cos(w x + pi / 2).
  Vec nth(const Vec& x, int n) const {
    require_dims(x, 1);
    const int freqs = 2 * fc_ + 1;
    const double scale = 1.0 / std::sqrt(static_cast<double>(freqs));
    const double quarter = 0.5 * std::numbers::pi;
    Vec out(2 * freqs);
    for (int i = 0; i < freqs; ++i) {
      const double w = kTwoPi * (i - fc_);
      const double amp = std::pow(w, n) * scale;
      out[i] = amp * std::cos(w * x[0] + n * quarter);
      out[freqs + i] = amp * std::cos(w * x[0] + (n + 1) * quarter);
    }
    return out;
  }

  int fc_;
  std::shared_ptr<const DirichletKernel> kernel_;
};

// Per-axis factor g(t, x) evaluated at one sample t.
struct AxisFactor {
  enum class Kind { kGaussian, kLaplace } kind;
  double inv_width = 0.0;  // 1 / (2 sigma^2) or 1 / sigma^2 for Gaussians
  std::vector<double> samples;

  // value and derivatives in x up to order three
  void eval(double t, double x, double out[4]) const {
    if (kind == Kind::kGaussian) {
      const double u = x - t;
      const double g = std::exp(-inv_width * u * u);
      const double a = 2.0 * inv_width;
      out[0] = g;
      out[1] = -a * u * g;
      out[2] = (a * a * u * u - a) * g;
      out[3] = (3.0 * a * a * u - a * a * a * u * u * u) * g;
    } else {
      const double g = std::exp(-t * x);
      out[0] = g;
      out[1] = -t * g;
      out[2] = t * t * g;
      out[3] = -t * t * t * g;
    }
  }
};

// Normalized tensor product of per-axis factors over the Cartesian sample set.
class SeparableSampled final : public MeasurementOperator {
 public:
  SeparableSampled(std::vector<AxisFactor> axes, std::string label)
      : axes_(std::move(axes)), label_(std::move(label)) {
    m_ = 1;
    for (const auto& a : axes_) m_ *= static_cast<int>(a.samples.size());
  }

  int dims() const override { return static_cast<int>(axes_.size()); }
  int measurement_dim() const override { return m_; }

  Vec feature(const Vec& x) const override { return normalize_jet(raw(x, 0), 0).f; }
  Mat dfeature(const Vec& x) const override { return normalize_jet(raw(x, 1), 1).df; }
  std::vector<Mat> d2feature(const Vec& x) const override {
    return normalize_jet(raw(x, 2), 2).d2f;
  }
  Vec d3feature(double x) const override {
    if (dims() != 1) return MeasurementOperator::d3feature(x);
    return normalize_jet(raw(Vec::Constant(1, x), 3), 3).d3f;
  }

  std::string describe() const override { return label_; }

 private:
  Jet raw(const Vec& x, int order) const {
    require_dims(x, dims());
    const int d = dims();
    // per axis, per sample: derivatives 0..3
    std::vector<std::vector<std::array<double, 4>>> table(d);
    for (int k = 0; k < d; ++k) {
      const auto& ax = axes_[k];
      table[k].resize(ax.samples.size());
      for (std::size_t j = 0; j < ax.samples.size(); ++j) {
        ax.eval(ax.samples[j], x[k], table[k][j].data());
      }
    }
    Jet jet;
    jet.f.resize(m_);
    if (order >= 1) jet.df.resize(m_, d);
    if (order >= 2) jet.d2f.assign(d, Mat(m_, d));
    if (order >= 3) jet.d3f.resize(m_);

    std::vector<int> idx(d, 0);
    for (int row = 0; row < m_; ++row) {
      // product of factors with the derivative orders in `ord`
      auto product = [&](const std::vector<int>& ord) {
        double p = 1.0;
        for (int k = 0; k < d; ++k) p *= table[k][idx[k]][ord[k]];
        return p;
      };
      std::vector<int> ord(d, 0);
      jet.f[row] = product(ord);
      if (order >= 1) {
        for (int k = 0; k < d; ++k) {
          ord.assign(d, 0);
          ord[k] = 1;
          jet.df(row, k) = product(ord);
        }
      }
      if (order >= 2) {
        for (int k = 0; k < d; ++k) {
          for (int l = 0; l < d; ++l) {
            ord.assign(d, 0);
            ord[k] += 1;
            ord[l] += 1;
            jet.d2f[k](row, l) = product(ord);
          }
        }
      }
      if (order >= 3) jet.d3f[row] = table[0][idx[0]][3];
      // advance the multi-index, last axis fastest
      for (int k = d - 1; k >= 0; --k) {
        if (++idx[k] < static_cast<int>(axes_[k].samples.size())) break;
        idx[k] = 0;
      }
    }
    return jet;
  }

  std::vector<AxisFactor> axes_;
  std::string label_;
  int m_ = 0;
};

AxisFactor gaussian_axis(double sigma, std::vector<double> samples, GaussianWidth width) {
  AxisFactor a;
  a.kind = AxisFactor::Kind::kGaussian;
  a.inv_width = width == GaussianWidth::kFeature ? 1.0 / (sigma * sigma)
                                                 : 1.0 / (2.0 * sigma * sigma);
  a.samples = std::move(samples);
  return a;
}

AxisFactor laplace_axis(std::vector<double> samples) {
  AxisFactor a;
  a.kind = AxisFactor::Kind::kLaplace;
  a.samples = std::move(samples);
  return a;
}

void require_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::kInvalidParam, "sigma must be positive");
  }
}

void require_samples(const std::vector<double>& samples, std::size_t minimum, const char* what) {
  if (samples.size() < minimum) {
    throw Error(ErrorCode::kInvalidParam, std::string(what) + " needs at least " +
                                              std::to_string(minimum) + " sample(s)");
  }
}

}  // namespace

double TranslationInvariantKernel::curvature_at_zero() const {
  return std::abs(derivative(2, 0.0));
}

double TranslationInvariantKernel::scaled(int order, double u) const {
  return derivative(order, u) * std::pow(curvature_at_zero(), -0.5 * order);
}

GaussianKernel::GaussianKernel(double sigma) : sigma_(sigma) { require_sigma(sigma); }

double GaussianKernel::derivative(int order, double u) const {
  const double v = u / sigma_;
  const double e = std::exp(-0.5 * v * v);
  const double s = 1.0 / sigma_;
  switch (order) {
    case 0: return e;
    case 1: return -v * e * s;
    case 2: return (v * v - 1.0) * e * s * s;
    case 3: return -(v * v * v - 3.0 * v) * e * s * s * s;
    case 4: return (v * v * v * v - 6.0 * v * v + 3.0) * e * s * s * s * s;
    default: throw Error(ErrorCode::kInvalidParam, "kernel derivative order must be 0..4");
  }
}

DirichletKernel::DirichletKernel(int fc) : fc_(fc) {
  if (fc < 1) throw Error(ErrorCode::kInvalidParam, "fc must be >= 1");
}

double DirichletKernel::derivative(int order, double u) const {
  if (order < 0 || order > 4) {
    throw Error(ErrorCode::kInvalidParam, "kernel derivative order must be 0..4");
  }
  double total = 0.0;
  for (int k = -fc_; k <= fc_; ++k) {
    const double w = kTwoPi * k;
    total += std::pow(w, order) * std::cos(w * u + order * 0.5 * std::numbers::pi);
  }
  return total / (2 * fc_ + 1);
}

std::shared_ptr<const TranslationInvariantKernel> gaussian_kernel(double sigma) {
  return std::make_shared<GaussianKernel>(sigma);
}

Vec MeasurementOperator::d3feature(double) const {
  throw Error(ErrorCode::kDimUnsupported, "third derivative is only available in 1-D");
}

OperatorPtr fourier_lowpass_1d(int fc) {
  if (fc < 1) throw Error(ErrorCode::kInvalidParam, "fc must be >= 1");
  return std::make_shared<FourierLowpass>(fc);
}

OperatorPtr gaussian_sampling_1d(double sigma, std::vector<double> sample_points,
                                 GaussianWidth width) {
  require_sigma(sigma);
  require_samples(sample_points, 2, "gaussian sampling");
  std::ostringstream label;
  label << "gaussian sigma=" << sigma << " samples=" << sample_points.size()
        << (width == GaussianWidth::kFeature ? " width=feature" : " width=psf");
  std::vector<AxisFactor> axes{gaussian_axis(sigma, std::move(sample_points), width)};
  return std::make_shared<SeparableSampled>(std::move(axes), label.str());
}

OperatorPtr gauss_laplace_separable(double sigma, std::vector<double> omega_samples,
                                    std::vector<double> r_samples) {
  require_sigma(sigma);
  require_samples(omega_samples, 1, "omega axis");
  require_samples(r_samples, 1, "depth axis");
  std::ostringstream label;
  label << "gauss_laplace sigma=" << sigma << " omega=" << omega_samples.size()
        << " r=" << r_samples.size();
  std::vector<AxisFactor> axes{
      gaussian_axis(sigma, std::move(omega_samples), GaussianWidth::kPointSpread),
      laplace_axis(std::move(r_samples))};
  return std::make_shared<SeparableSampled>(std::move(axes), label.str());
}

OperatorPtr gauss_laplace_3d(double sigma, std::vector<double> x1_samples,
                             std::vector<double> x2_samples, std::vector<double> z_samples) {
  require_sigma(sigma);
  require_samples(x1_samples, 1, "first lateral axis");
  require_samples(x2_samples, 1, "second lateral axis");
  require_samples(z_samples, 1, "depth axis");
  std::ostringstream label;
  label << "gauss_laplace_3d sigma=" << sigma << " x1=" << x1_samples.size()
        << " x2=" << x2_samples.size() << " z=" << z_samples.size();
  std::vector<AxisFactor> axes{
      gaussian_axis(sigma, std::move(x1_samples), GaussianWidth::kPointSpread),
      gaussian_axis(sigma, std::move(x2_samples), GaussianWidth::kPointSpread),
      laplace_axis(std::move(z_samples))};
  return std::make_shared<SeparableSampled>(std::move(axes), label.str());
}

std::vector<double> uniform_samples(int count, double lo, double hi) {
  if (count < 1) throw Error(ErrorCode::kInvalidParam, "sample count must be positive");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  for (int i = 0; i < count; ++i) out[i] = lo + (hi - lo) * i / (count - 1);
  return out;
}

Vec forward(const MeasurementOperator& op, const DiscreteMeasure& mu) {
  if (mu.dims() != op.dims()) {
    throw Error(ErrorCode::kDimMismatch, "measure dims differ from operator dims");
  }
  Vec y = Vec::Zero(op.measurement_dim());
  for (const Atom& a : mu.atoms()) y += a.amplitude * op.feature(a.position);
  return y;
}

NormalizedDerivative normalized_derivative(const MeasurementOperator& op, const Vec& x) {
  const Mat grad = op.dfeature(x);
  const Mat metric = grad.transpose() * grad;
  Eigen::SelfAdjointEigenSolver<Mat> eig(metric);
  const Vec values = eig.eigenvalues();
  // singular values of grad are the square roots of the metric eigenvalues
  if (!(values.minCoeff() > 1e-20)) {
    throw Error(ErrorCode::kDegenerateDerivative, "feature gradient is rank deficient");
  }
  const Vec floored = values.cwiseMax(1e-12);
  const Mat& vecs = eig.eigenvectors();
  NormalizedDerivative out;
  out.metric_sqrt = vecs * floored.cwiseSqrt().asDiagonal() * vecs.transpose();
  out.metric_inv_sqrt = vecs * floored.cwiseSqrt().cwiseInverse().asDiagonal() * vecs.transpose();
  out.columns = grad * out.metric_inv_sqrt;
  return out;
}

}  // namespace srlasso
