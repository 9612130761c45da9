// Copyright 2026 The srlasso Authors
// SPDX-License-Identifier: Apache-2.0
//
// Reproducible Gaussian noise: every sample is a pure function of
// (seed, stream, index), so draws do not depend on execution order.

#pragma once

#include "srlasso/operators.hpp"
#include "srlasso/types.hpp"

#include <cstdint>

namespace srlasso {

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t bits(std::uint64_t counter) const;
  // Uniform on the open interval (0, 1).
  double uniform(std::uint64_t counter) const;
  // Standard normal via Box-Muller on two consecutive counters.
  double normal(std::uint64_t index) const;

 private:
  std::uint64_t key_;
};

// Standard deviation rho_rel * |y0| / sqrt(M).
double noise_level(const Vec& y0, double rho_rel);

Vec generate_noisy_data(const MeasurementOperator& op, const DiscreteMeasure& mu0, double rho_rel,
                        std::uint64_t seed, std::uint64_t draw_index);

}  // namespace srlasso
