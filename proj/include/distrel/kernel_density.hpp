#pragma once

#include <cstdint>
#include <span>

#include "distrel/types.hpp"

namespace distrel::kde {

// Biweight-family kernel on [-1, 1]:
// -(315/64)x^6 + (735/64)x^4 - (525/64)x^2 + 105/64.
double biweight(double x) noexcept;

struct BiweightKernel {
  double operator()(double x) const noexcept { return biweight(x); }
  static constexpr double support = 1.0;
};

// (1 / (count * h)) sum_i K(residual_i / h)
double density_at_zero(std::span<const double> residuals, double h);

// Same, with residuals y - x beta over the shard.
double local_density_at_zero(const Dataset& shard, const Coefficients& beta, double h);

struct LocalDensity {
  double value = 0.0;
  std::uint64_t count = 0;
};

// Count-weighted mean of per-shard values, folded in the given (shard) order.
double aggregate_density(std::span<const LocalDensity> locals);

}  // namespace distrel::kde
