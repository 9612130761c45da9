// Copyright 2026 The srlasso Authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared value types: grids, discrete measures, grouped coefficient vectors
// and solver settings.

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace srlasso {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class ErrorCode {
  kInvalidParam = 1,
  kDimMismatch,
  kZeroGroup,
  kDegenerateDerivative,
  kNotConverged,
  kOffGridTooFar,
  kSingularGram,
  kDegenerateSign,
  kDimUnsupported,
  kSpecParse,
  kIo,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Uniform tensor grid. Node j on axis k sits at origin[k] + j * spacing(k).
class Grid {
 public:
  Grid(std::vector<int> points_per_axis, std::vector<double> origin,
       std::vector<double> extent);
  // Unit-extent axes starting at 0.
  explicit Grid(std::vector<int> points_per_axis);

  int dims() const { return static_cast<int>(points_.size()); }
  int points(int axis) const { return points_[axis]; }
  const std::vector<int>& points_per_axis() const { return points_; }
  double origin(int axis) const { return origin_[axis]; }
  double extent(int axis) const { return extent_[axis]; }
  double spacing(int axis) const { return extent_[axis] / points_[axis]; }
  double node(int axis, int j) const { return origin_[axis] + j * spacing(axis); }

  // Nodes are flattened with the last axis varying fastest.
  int num_nodes() const;
  std::vector<int> unflatten(int flat) const;
  int flatten(const std::vector<int>& index) const;
  Vec position(int flat) const;

  // Flat index of the closest node (coordinates are clamped to the grid).
  int nearest_node(const Vec& x) const;

 private:
  std::vector<int> points_;
  std::vector<double> origin_;
  std::vector<double> extent_;
};

struct Atom {
  Vec position;
  double amplitude = 0.0;
};

// Finite signed sum of Dirac masses. Atoms are distinct and nonzero.
class DiscreteMeasure {
 public:
  explicit DiscreteMeasure(int dims) : dims_(dims) {
    if (dims < 1) throw Error(ErrorCode::kInvalidParam, "measure dims must be >= 1");
  }
  DiscreteMeasure(int dims, std::vector<Atom> atoms);

  static constexpr double kCoincidenceTol = 1e-12;

  int dims() const { return dims_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const Atom& atom(std::size_t i) const { return atoms_[i]; }

  // Sums atoms closer than kCoincidenceTol and drops those that cancel.
  static DiscreteMeasure merged(int dims, const std::vector<Atom>& atoms);

  // Convenience for 1-D measures.
  static DiscreteMeasure line(const std::vector<double>& positions,
                              const std::vector<double>& amplitudes);

 private:
  int dims_;
  std::vector<Atom> atoms_;
};

bool same_position(const Vec& a, const Vec& b, double tol);

class GroupedVector {
 public:
  GroupedVector(int group_size, int n_groups);
  GroupedVector(int group_size, Vec data);

  int group_size() const { return q_; }
  int n_groups() const { return n_groups_; }
  const Vec& data() const { return data_; }
  Vec& data() { return data_; }

  auto group(int i) const { return data_.segment(q_ * i, q_); }
  auto group(int i) { return data_.segment(q_ * i, q_); }
  double group_norm(int i) const { return group(i).norm(); }

 private:
  int q_;
  int n_groups_;
  Vec data_;
};

double mixed_norm(const GroupedVector& z);

// Indices whose group norm exceeds support_tol times the largest group norm.
std::vector<int> group_support(const GroupedVector& z, double support_tol);

// Unit-norm direction of every group. Throws kZeroGroup on a vanishing group.
GroupedVector group_sign(const GroupedVector& z);

struct SolverConfig {
  double lambda = 1.0;
  int max_iters = 200000;
  double gap_tol = 1e-9;
  double support_tol = 1e-6;
  bool nonneg = false;

  void validate() const;
};

}  // namespace srlasso
