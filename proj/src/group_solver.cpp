// Copyright 2026 The srlasso Authors
// SPDX-License-Identifier: Apache-2.0

#include "srlasso/group_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <utility>

namespace srlasso {

namespace {

constexpr int kGapEvery = 10;

struct DualPoint {
  double value;
  Vec p;
};

// Shrinks the scaled residual into {p : |Gamma_i^T p| <= 1} (or Gamma^T p <= 1
// when nonneg) and evaluates lambda * (<y, p> - lambda / 2 |p|^2).
DualPoint dual_point(const DesignMatrix& gamma, const Vec& y, const Vec& residual,
                     double lambda, bool nonneg) {
  Vec p = -residual / lambda;
  const Vec corr = gamma.matrix().transpose() * p;
  double worst = 1.0;
  if (nonneg) {
    if (corr.size() > 0) worst = std::max(worst, corr.maxCoeff());
  } else {
    const int q = gamma.group_size();
    for (int i = 0; i < gamma.n_groups(); ++i) {
      worst = std::max(worst, corr.segment(static_cast<Eigen::Index>(q) * i, q).norm());
    }
  }
  p /= worst;
  return {lambda * (y.dot(p) - 0.5 * lambda * p.squaredNorm()), std::move(p)};
}

double penalty(const GroupedVector& z) { return mixed_norm(z); }

void shrink(const Vec& v, double t, int q, bool nonneg, Vec& out) {
  if (nonneg) {
    out = (v.array() - t).cwiseMax(0.0).matrix();
    return;
  }
  out.resize(v.size());
  for (Eigen::Index i = 0; i < v.size(); i += q) {
    out.segment(i, q) = block_soft_threshold(v.segment(i, q), t);
  }
}

}  // namespace

DesignMatrix::DesignMatrix(Mat gamma, int group_size) : gamma_(std::move(gamma)), q_(group_size) {
  if (group_size < 1) throw Error(ErrorCode::kInvalidParam, "group size must be positive");
  if (gamma_.cols() == 0 || gamma_.cols() % group_size != 0) {
    throw Error(ErrorCode::kDimMismatch, "column count must be a positive multiple of group size");
  }
}

Mat DesignMatrix::restrict_to(const std::vector<int>& groups) const {
  Mat out(gamma_.rows(), static_cast<Eigen::Index>(groups.size()) * q_);
  for (std::size_t k = 0; k < groups.size(); ++k) {
    out.middleCols(static_cast<Eigen::Index>(k) * q_, q_) = block(groups[k]);
  }
  return out;
}

NotConverged::NotConverged(SolveResult best)
    : Error(ErrorCode::kNotConverged,
            "solver stopped after " + std::to_string(best.iterations) +
                " iterations with duality gap " + std::to_string(best.final_gap)),
      best_(std::move(best)) {}

Vec block_soft_threshold(const Vec& v, double t) {
  if (t < 0.0) throw Error(ErrorCode::kInvalidParam, "threshold must be >= 0");
  const double n = v.norm();
  if (n <= t) return Vec::Zero(v.size());
  return v * (1.0 - t / n);
}

double operator_norm(const Mat& gamma) {
  if (gamma.size() == 0 || gamma.cwiseAbs().maxCoeff() == 0.0) {
    throw Error(ErrorCode::kInvalidParam, "operator norm of a zero matrix");
  }
  std::mt19937_64 gen(0x5eed);
  std::normal_distribution<double> normal;
  Vec v(gamma.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(gen);
  v.normalize();
  double estimate = (gamma * v).norm();
  for (int it = 0; it < 100000; ++it) {
    Vec w = gamma.transpose() * (gamma * v);
    const double n = w.norm();
    if (n == 0.0) break;
    v = w / n;
    const double next = (gamma * v).norm();
    const bool settled = std::abs(next - estimate) <= 1e-13 * next;
    estimate = std::max(estimate, next);
    if (settled) break;
  }
  return estimate;
}

double primal_objective(const DesignMatrix& gamma, const Vec& y, const GroupedVector& z,
                        double lambda) {
  return lambda * penalty(z) + 0.5 * (gamma.matrix() * z.data() - y).squaredNorm();
}

double duality_gap(const DesignMatrix& gamma, const Vec& y, const GroupedVector& z,
                   double lambda, bool nonneg) {
  const Vec residual = gamma.matrix() * z.data() - y;
  const double primal = lambda * penalty(z) + 0.5 * residual.squaredNorm();
  return primal - dual_point(gamma, y, residual, lambda, nonneg).value;
}

SolveResult solve_group_lasso(const DesignMatrix& gamma, const Vec& y, const SolverConfig& cfg) {
  cfg.validate();
  if (y.size() != gamma.rows()) {
    throw Error(ErrorCode::kDimMismatch, "data length " + std::to_string(y.size()) +
                                             " differs from design rows " +
                                             std::to_string(gamma.rows()));
  }
  const int q = gamma.group_size();
  if (cfg.nonneg && q != 1) {
    throw Error(ErrorCode::kInvalidParam, "nonnegative solves need group size 1");
  }
  const Mat& G = gamma.matrix();
  const double lambda = cfg.lambda;

  SolveResult res{GroupedVector(q, gamma.n_groups()), 0, 0.0, 0.0, 0.0, Vec()};
  Vec residual = -y;
  double primal = 0.5 * y.squaredNorm();

  auto converged = [&](double gap) { return gap <= cfg.gap_tol * (1.0 + std::abs(primal)); };
  auto finish = [&](double gap) {
    res.final_gap = gap;
    res.primal = primal;
    res.dual = -residual / lambda;
    res.kkt_residual = kkt_residual(gamma, y, res.z, lambda, cfg.nonneg);
  };

  double gap = primal - dual_point(gamma, y, residual, lambda, cfg.nonneg).value;
  if (converged(gap) || G.cwiseAbs().maxCoeff() == 0.0) {
    finish(gap);
    return res;
  }

  const double norm = operator_norm(G);
  const double step = 1.0 / (norm * norm * (1.0 + 4e-6));
  const double thresh = lambda * step;

  Vec z = Vec::Zero(G.cols());
  Vec w = z;
  Vec candidate;
  double t = 1.0;
  bool momentum = false;
  int it = 0;
  while (it < cfg.max_iters) {
    ++it;
    const Vec grad = G.transpose() * (G * w - y);
    shrink(w - step * grad, thresh, q, cfg.nonneg, candidate);
    Vec cand_residual = G * candidate - y;
    GroupedVector cz(q, candidate);
    const double cand_primal = lambda * penalty(cz) + 0.5 * cand_residual.squaredNorm();
    if (cand_primal > primal && momentum) {
      // restart from the last accepted iterate
      w = z;
      t = 1.0;
      momentum = false;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    w = candidate + ((t - 1.0) / t_next) * (candidate - z);
    momentum = true;
    z = std::move(candidate);
    residual = std::move(cand_residual);
    primal = cand_primal;
    t = t_next;

    if (it % kGapEvery == 0 || it == cfg.max_iters) {
      gap = primal - dual_point(gamma, y, residual, lambda, cfg.nonneg).value;
      if (converged(gap)) break;
    }
  }
  res.z = GroupedVector(q, z);
  res.iterations = it;
  gap = primal - dual_point(gamma, y, residual, lambda, cfg.nonneg).value;
  finish(gap);
  if (!converged(gap)) throw NotConverged(std::move(res));
  return res;
}

SolveResult refine_on_support(const DesignMatrix& gamma, const Vec& y, const SolveResult& start,
                              const SolverConfig& cfg) {
  cfg.validate();
  if (cfg.nonneg) throw Error(ErrorCode::kInvalidParam, "refinement needs the unconstrained problem");
  if (y.size() != gamma.rows() || start.z.n_groups() != gamma.n_groups() ||
      start.z.group_size() != gamma.group_size()) {
    throw Error(ErrorCode::kDimMismatch, "start point does not match the design");
  }
  const std::vector<int> support = group_support(start.z, cfg.support_tol);
  if (support.empty()) return start;
  const int q = gamma.group_size();
  const int k = static_cast<int>(support.size());
  const Mat sub = gamma.restrict_to(support);
  const Mat gram = sub.transpose() * sub;
  const Vec rhs = sub.transpose() * y;
  const double lambda = cfg.lambda;

  Vec z(static_cast<Eigen::Index>(k) * q);
  for (int i = 0; i < k; ++i) z.segment(static_cast<Eigen::Index>(i) * q, q) = start.z.group(support[i]);
  auto objective = [&](const Vec& v) {
    double pen = 0.0;
    for (int i = 0; i < k; ++i) pen += v.segment(static_cast<Eigen::Index>(i) * q, q).norm();
    return lambda * pen + 0.5 * (sub * v - y).squaredNorm();
  };

  double value = objective(z);
  for (int it = 0; it < 100; ++it) {
    Vec grad = gram * z - rhs;
    Mat hess = gram;
    bool collapsed = false;
    for (int i = 0; i < k; ++i) {
      const Eigen::Index off = static_cast<Eigen::Index>(i) * q;
      const double n = z.segment(off, q).norm();
      if (n == 0.0) {
        collapsed = true;
        break;
      }
      const Vec u = z.segment(off, q) / n;
      grad.segment(off, q) += lambda * u;
      hess.block(off, off, q, q) += (lambda / n) * (Mat::Identity(q, q) - u * u.transpose());
    }
    if (collapsed) break;
    const Eigen::LLT<Mat> chol(hess);
    if (chol.info() != Eigen::Success) return start;
    const Vec dir = chol.solve(-grad);
    const double slope = grad.dot(dir);
    if (!(slope < 0.0)) break;
    double t = 1.0;
    Vec next = z + dir;
    double next_value = objective(next);
    while (next_value > value + 1e-4 * t * slope && t > 1e-12) {
      t *= 0.5;
      next = z + t * dir;
      next_value = objective(next);
    }
    if (!(next_value <= value)) break;
    const bool stalled = (next - z).norm() <= 1e-15 * (1.0 + z.norm());
    z = std::move(next);
    value = next_value;
    if (stalled) break;
  }

  SolveResult out = start;
  out.z = GroupedVector(q, gamma.n_groups());
  for (int i = 0; i < k; ++i) out.z.group(support[i]) = z.segment(static_cast<Eigen::Index>(i) * q, q);
  out.kkt_residual = kkt_residual(gamma, y, out.z, lambda);
  if (!(out.kkt_residual < start.kkt_residual)) return start;
  const Vec residual = gamma.matrix() * out.z.data() - y;
  out.primal = primal_objective(gamma, y, out.z, lambda);
  out.final_gap = out.primal - dual_point(gamma, y, residual, lambda, false).value;
  out.dual = -residual / lambda;
  return out;
}

double kkt_residual(const DesignMatrix& gamma, const Vec& y, const GroupedVector& z,
                    double lambda, bool nonneg) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::kInvalidParam, "lambda must be positive");
  const Vec g = gamma.matrix().transpose() * (gamma.matrix() * z.data() - y);
  const int q = z.group_size();
  double worst = 0.0;
  for (int i = 0; i < z.n_groups(); ++i) {
    const auto gi = g.segment(static_cast<Eigen::Index>(q) * i, q);
    const double n = z.group_norm(i);
    if (nonneg) {
      const double zi = z.data()[i];
      worst = std::max(worst, zi > 0.0 ? std::abs(gi[0] + lambda) : -gi[0] - lambda);
      continue;
    }
    if (n > 0.0) {
      worst = std::max(worst, (gi + lambda * z.group(i) / n).norm());
    } else {
      worst = std::max(worst, gi.norm() - lambda);
    }
  }
  return worst;
}

}  // namespace srlasso
