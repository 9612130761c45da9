// Copyright 2026 The srlasso Authors
// SPDX-License-Identifier: Apache-2.0

#include "srlasso/noise.hpp"

#include <cmath>
#include <numbers>

namespace srlasso {

namespace {

// SplitMix64 finalizer.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix(mix(seed) ^ (stream * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL))) {}

std::uint64_t CounterRng::bits(std::uint64_t counter) const { return mix(key_ ^ mix(counter)); }

double CounterRng::uniform(std::uint64_t counter) const {
  // 53 random mantissa bits, shifted off zero
  return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t index) const {
  const double u1 = uniform(2 * index);
  const double u2 = uniform(2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double noise_level(const Vec& y0, double rho_rel) {
  if (!(rho_rel >= 0.0)) throw Error(ErrorCode::kInvalidParam, "noise level must be >= 0");
  return rho_rel * y0.norm() / std::sqrt(static_cast<double>(y0.size()));
}

Vec generate_noisy_data(const MeasurementOperator& op, const DiscreteMeasure& mu0, double rho_rel,
                        std::uint64_t seed, std::uint64_t draw_index) {
  Vec y = forward(op, mu0);
  const double rho = noise_level(y, rho_rel);
  if (rho == 0.0) return y;
  const CounterRng rng(seed, draw_index);
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += rho * rng.normal(static_cast<std::uint64_t>(i));
  return y;
}

}  // namespace srlasso
