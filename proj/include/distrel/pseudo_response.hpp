#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "distrel/types.hpp"

namespace distrel::pseudo {

inline constexpr double kDensityFloor = 1e-4;

// Per-shard O(p) message: gradient summary and local Gram times beta.
struct ShardSummary {
  Vector z_nk;        // (1/m_k) sum X_i Ytilde_i
  Vector sigma_beta;  // (1/m_k) sum X_i X_i' beta
  double density_local = 0.0;
  std::uint64_t count = 0;
};

// Ytilde_i = x_i' beta - (1{y_i <= x_i' beta} - tau) / f0
Vector pseudo_responses(const Dataset& shard, const Coefficients& beta, double f0, double tau);

// Same from precomputed fitted values x_i' beta.
Vector pseudo_responses_from_fitted(const Vector& y, const Vector& fitted, double f0, double tau);

ShardSummary shard_summary(const Dataset& shard, const Coefficients& beta, double f0, double tau,
                           double density_local = 0.0);

ShardSummary shard_summary_from_fitted(const Dataset& shard, const Vector& fitted, double f0,
                                       double tau, double density_local = 0.0);

// b = wmean(z_nk) + first_shard_sigma_beta - wmean(sigma_beta), count-weighted,
// folded in ascending shard order.
Vector assemble_linear_term(std::span<const ShardSummary> summaries,
                            const Vector& first_shard_sigma_beta);

// Little-endian layout: u64 len, f64 z_nk[len], u64 len, f64 sigma_beta[len],
// f64 density_local, u64 count.
std::vector<std::uint8_t> serialize(const ShardSummary& summary);
ShardSummary deserialize_summary(std::span<const std::uint8_t> bytes);
std::size_t serialized_size(Index dimension) noexcept;

}  // namespace distrel::pseudo
