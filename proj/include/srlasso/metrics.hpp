// Copyright 2026 The srlasso Authors
// SPDX-License-Identifier: Apache-2.0
//
// Kernel distance |mu - nu|_k^2 between discrete measures.

#pragma once

#include "srlasso/operators.hpp"
#include "srlasso/types.hpp"

#include <utility>

namespace srlasso {

// exp(-|x - y|)
double laplace_kernel(const Vec& x, const Vec& y);

// Double sum over the atoms of mu - nu with the Laplace kernel; coincident
// atoms are merged first.
double mmd_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// (|Phi mu - Phi mu0|^2, |mu - mu0|^2 under k(x, x') = <phi(x), phi(x')>),
// computed independently.
std::pair<double, double> loss_kernel_mmd_identity_check(const MeasurementOperator& op,
                                                         const DiscreteMeasure& mu,
                                                         const DiscreteMeasure& mu0);

}  // namespace srlasso
