// Copyright 2026 The srlasso Authors
// SPDX-License-Identifier: Apache-2.0

#include "srlasso/metrics.hpp"

#include <cmath>
#include <vector>

namespace srlasso {

namespace {

// atoms of mu - nu with coincident positions combined
std::vector<Atom> signed_difference(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.dims() != nu.dims()) throw Error(ErrorCode::kDimMismatch, "measures differ in dims");
  std::vector<Atom> atoms(mu.atoms());
  for (const Atom& a : nu.atoms()) atoms.push_back({a.position, -a.amplitude});
  std::vector<Atom> out;
  for (const Atom& a : atoms) {
    bool merged = false;
    for (Atom& b : out) {
      if (same_position(a.position, b.position, DiscreteMeasure::kCoincidenceTol)) {
        b.amplitude += a.amplitude;
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(a);
  }
  return out;
}

}  // namespace

double laplace_kernel(const Vec& x, const Vec& y) { return std::exp(-(x - y).norm()); }

double mmd_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const std::vector<Atom> diff = signed_difference(mu, nu);
  double total = 0.0;
  for (std::size_t i = 0; i < diff.size(); ++i) {
    total += diff[i].amplitude * diff[i].amplitude;
    for (std::size_t j = 0; j < i; ++j) {
      total += 2.0 * diff[i].amplitude * diff[j].amplitude *
               laplace_kernel(diff[i].position, diff[j].position);
    }
  }
  return total;
}

std::pair<double, double> loss_kernel_mmd_identity_check(const MeasurementOperator& op,
                                                         const DiscreteMeasure& mu,
                                                         const DiscreteMeasure& mu0) {
  const double lhs = (forward(op, mu) - forward(op, mu0)).squaredNorm();
  std::vector<Atom> atoms(mu.atoms());
  for (const Atom& a : mu0.atoms()) atoms.push_back({a.position, -a.amplitude});
  std::vector<Vec> features;
  features.reserve(atoms.size());
  for (const Atom& a : atoms) features.push_back(op.feature(a.position));
  double rhs = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      rhs += atoms[i].amplitude * atoms[j].amplitude * features[i].dot(features[j]);
    }
  }
  return {lhs, rhs};
}

}  // namespace srlasso
