// Copyright 2026 The srlasso Authors
// SPDX-License-Identifier: Apache-2.0

#include "srlasso/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace srlasso {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParam: return "InvalidParam";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kZeroGroup: return "ZeroGroup";
    case ErrorCode::kDegenerateDerivative: return "DegenerateDerivative";
    case ErrorCode::kNotConverged: return "NotConverged";
    case ErrorCode::kOffGridTooFar: return "OffGridTooFar";
    case ErrorCode::kSingularGram: return "SingularGram";
    case ErrorCode::kDegenerateSign: return "DegenerateSign";
    case ErrorCode::kDimUnsupported: return "DimUnsupported";
    case ErrorCode::kSpecParse: return "SpecParseError";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

Grid::Grid(std::vector<int> points_per_axis, std::vector<double> origin,
           std::vector<double> extent)
    : points_(std::move(points_per_axis)),
      origin_(std::move(origin)),
      extent_(std::move(extent)) {
  if (points_.empty()) throw Error(ErrorCode::kInvalidParam, "grid needs at least one axis");
  if (origin_.size() != points_.size() || extent_.size() != points_.size()) {
    throw Error(ErrorCode::kDimMismatch, "grid origin/extent length differs from axis count");
  }
  for (std::size_t k = 0; k < points_.size(); ++k) {
    if (points_[k] < 2) throw Error(ErrorCode::kInvalidParam, "grid axes need at least 2 points");
    if (!(extent_[k] > 0.0) || !std::isfinite(extent_[k]) || !std::isfinite(origin_[k])) {
      throw Error(ErrorCode::kInvalidParam, "grid extent must be positive and finite");
    }
  }
}

Grid::Grid(std::vector<int> points_per_axis)
    : Grid(points_per_axis, std::vector<double>(points_per_axis.size(), 0.0),
           std::vector<double>(points_per_axis.size(), 1.0)) {}

int Grid::num_nodes() const {
  int n = 1;
  for (int p : points_) n *= p;
  return n;
}

std::vector<int> Grid::unflatten(int flat) const {
  std::vector<int> index(points_.size());
  for (int k = dims() - 1; k >= 0; --k) {
    index[k] = flat % points_[k];
    flat /= points_[k];
  }
  return index;
}

int Grid::flatten(const std::vector<int>& index) const {
  int flat = 0;
  for (int k = 0; k < dims(); ++k) flat = flat * points_[k] + index[k];
  return flat;
}

Vec Grid::position(int flat) const {
  const std::vector<int> index = unflatten(flat);
  Vec x(dims());
  for (int k = 0; k < dims(); ++k) x[k] = node(k, index[k]);
  return x;
}

int Grid::nearest_node(const Vec& x) const {
  std::vector<int> index(points_.size());
  for (int k = 0; k < dims(); ++k) {
    const double j = std::round((x[k] - origin_[k]) / spacing(k));
    index[k] = static_cast<int>(std::clamp(j, 0.0, static_cast<double>(points_[k] - 1)));
  }
  return flatten(index);
}

bool same_position(const Vec& a, const Vec& b, double tol) {
  return ((a - b).cwiseAbs().array() <= tol).all();
}

DiscreteMeasure::DiscreteMeasure(int dims, std::vector<Atom> atoms) : DiscreteMeasure(dims) {
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const Atom& a = atoms[i];
    if (a.position.size() != dims) {
      throw Error(ErrorCode::kDimMismatch, "atom position length differs from measure dims");
    }
    if (a.amplitude == 0.0 || !std::isfinite(a.amplitude)) {
      throw Error(ErrorCode::kInvalidParam, "atom amplitudes must be nonzero and finite");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (same_position(a.position, atoms[j].position, kCoincidenceTol)) {
        std::ostringstream msg;
        msg << "atoms " << j << " and " << i << " share a position";
        throw Error(ErrorCode::kInvalidParam, msg.str());
      }
    }
  }
  atoms_ = std::move(atoms);
}

DiscreteMeasure DiscreteMeasure::merged(int dims, const std::vector<Atom>& atoms) {
  std::vector<Atom> out;
  for (const Atom& a : atoms) {
    auto hit = std::find_if(out.begin(), out.end(), [&](const Atom& b) {
      return same_position(a.position, b.position, kCoincidenceTol);
    });
    if (hit == out.end()) {
      out.push_back(a);
    } else {
      hit->amplitude += a.amplitude;
    }
  }
  std::erase_if(out, [](const Atom& a) { return a.amplitude == 0.0; });
  return DiscreteMeasure(dims, std::move(out));
}

DiscreteMeasure DiscreteMeasure::line(const std::vector<double>& positions,
                                      const std::vector<double>& amplitudes) {
  if (positions.size() != amplitudes.size()) {
    throw Error(ErrorCode::kDimMismatch, "positions and amplitudes differ in length");
  }
  std::vector<Atom> atoms;
  atoms.reserve(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    atoms.push_back({Vec::Constant(1, positions[i]), amplitudes[i]});
  }
  return DiscreteMeasure(1, std::move(atoms));
}

GroupedVector::GroupedVector(int group_size, int n_groups)
    : q_(group_size), n_groups_(n_groups) {
  if (group_size < 1 || n_groups < 1) {
    throw Error(ErrorCode::kInvalidParam, "group size and group count must be positive");
  }
  data_ = Vec::Zero(static_cast<Eigen::Index>(q_) * n_groups_);
}

GroupedVector::GroupedVector(int group_size, Vec data) : q_(group_size), data_(std::move(data)) {
  if (group_size < 1 || data_.size() == 0 || data_.size() % group_size != 0) {
    throw Error(ErrorCode::kDimMismatch, "data length must be a positive multiple of group size");
  }
  n_groups_ = static_cast<int>(data_.size() / group_size);
}

double mixed_norm(const GroupedVector& z) {
  double total = 0.0;
  for (int i = 0; i < z.n_groups(); ++i) total += z.group_norm(i);
  return total;
}

std::vector<int> group_support(const GroupedVector& z, double support_tol) {
  if (support_tol < 0.0) throw Error(ErrorCode::kInvalidParam, "support_tol must be >= 0");
  double largest = 0.0;
  for (int i = 0; i < z.n_groups(); ++i) largest = std::max(largest, z.group_norm(i));
  std::vector<int> support;
  if (largest == 0.0) return support;
  const double cut = support_tol * largest;
  for (int i = 0; i < z.n_groups(); ++i) {
    if (z.group_norm(i) > cut) support.push_back(i);
  }
  return support;
}

GroupedVector group_sign(const GroupedVector& z) {
  GroupedVector s(z.group_size(), z.n_groups());
  for (int i = 0; i < z.n_groups(); ++i) {
    const double n = z.group_norm(i);
    if (n < 1e-14) {
      throw Error(ErrorCode::kZeroGroup, "group " + std::to_string(i) + " has no sign");
    }
    s.group(i) = z.group(i) / n;
  }
  return s;
}

void SolverConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::kInvalidParam, "lambda must be positive");
  }
  if (!(gap_tol > 0.0)) throw Error(ErrorCode::kInvalidParam, "gap_tol must be positive");
  if (!(support_tol >= 0.0)) throw Error(ErrorCode::kInvalidParam, "support_tol must be >= 0");
  if (max_iters < 1) throw Error(ErrorCode::kInvalidParam, "max_iters must be positive");
}

}  // namespace srlasso
