#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "distrel/types.hpp"

namespace distrel::data {

enum class Noise { kNormal, kCauchy, kExponential };

const char* to_string(Noise noise) noexcept;
Noise parse_noise(const std::string& name);

struct SimDesign {
  Index n = 1000;
  Index p = 10;
  Index s = 5;
  double rho = 0.5;
  Noise noise = Noise::kNormal;
  double tau = 0.5;
  std::uint64_t seed = 1;
  // Test hook: every noise draw replaced by this constant.
  std::optional<double> constant_noise;

  void validate() const;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Stateless stream: value i depends only on (seed, stream, i), so any row
// range can be regenerated without touching the others.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint64_t bits(std::uint64_t i) const noexcept;
  // Uniform on the open interval (0, 1).
  double uniform(std::uint64_t i) const noexcept;
  // Standard normal by Box-Muller from draws 2i and 2i+1.
  double normal(std::uint64_t i) const noexcept;

 private:
  std::uint64_t key_;
};

// Stable hash used for derived seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) noexcept;

// (p+1)-vector with entries 10 (j+1) / s for j < s.
Coefficients beta_star(Index s, Index p);

// Sigma_ij = rho^|i-j|
Matrix toeplitz_covariance(Index p, double rho);

// n x (p+1): ones, then rows drawn from N(0, Sigma).
Matrix sample_covariates(const SimDesign& design);

// Analytic tau-quantile of the noise family.
double noise_quantile(Noise noise, double tau);

Vector sample_noise(const SimDesign& design);

struct Generated {
  Dataset data;
  Coefficients beta_star;
  // beta_star with the intercept shifted by the noise quantile.
  Coefficients effective_beta;
};

Generated generate(const SimDesign& design);

// Independent draw of the same size from a seed derived from design.seed.
Generated generate_validation(const SimDesign& design);

// Binary shard file: "DRELSHRD", u64 version, u64 n, u64 p, u64 seed, then n
// rows of p+1 covariates followed by y, all little-endian f64.
void save_shard(const std::filesystem::path& path, const Dataset& shard, std::uint64_t seed);
Dataset load_shard(const std::filesystem::path& path, std::uint64_t* seed = nullptr);

}  // namespace distrel::data
