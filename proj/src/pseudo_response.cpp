#include "distrel/pseudo_response.hpp"

#include <cmath>

#include "distrel/wire.hpp"

namespace distrel::pseudo {

namespace {

void check_inputs(double f0, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorKind::kInvalidArgument, "tau must lie in (0,1)");
  if (!(f0 >= kDensityFloor) || !std::isfinite(f0)) {
    throw Error(ErrorKind::kDensityTooSmall,
                "density estimate " + std::to_string(f0) + " below floor");
  }
}

}  // namespace

Vector pseudo_responses_from_fitted(const Vector& y, const Vector& fitted, double f0, double tau) {
  check_inputs(f0, tau);
  if (y.size() != fitted.size()) throw Error(ErrorKind::kDimensionMismatch, "pseudo responses");
  const double inv_f0 = 1.0 / f0;
  Vector out(y.size());
  for (Index i = 0; i < y.size(); ++i) {
    const double indicator = y[i] <= fitted[i] ? 1.0 : 0.0;
    out[i] = fitted[i] - inv_f0 * (indicator - tau);
  }
  return out;
}

Vector pseudo_responses(const Dataset& shard, const Coefficients& beta, double f0, double tau) {
  if (beta.size() != shard.cols()) throw Error(ErrorKind::kDimensionMismatch, "pseudo responses");
  return pseudo_responses_from_fitted(shard.y, sparse_product(shard.x, beta), f0, tau);
}

ShardSummary shard_summary_from_fitted(const Dataset& shard, const Vector& fitted, double f0,
                                       double tau, double density_local) {
  if (shard.rows() < 1) throw Error(ErrorKind::kEmptyInput, "empty shard");
  const Vector ytilde = pseudo_responses_from_fitted(shard.y, fitted, f0, tau);
  // One pass over X for both products.
  Matrix rhs(shard.rows(), 2);
  rhs.col(0) = ytilde;
  rhs.col(1) = fitted;
  const Matrix prod = shard.x.transpose() * rhs;
  const double inv_m = 1.0 / static_cast<double>(shard.rows());
  ShardSummary s;
  s.z_nk = prod.col(0) * inv_m;
  s.sigma_beta = prod.col(1) * inv_m;
  s.density_local = density_local;
  s.count = static_cast<std::uint64_t>(shard.rows());
  return s;
}

ShardSummary shard_summary(const Dataset& shard, const Coefficients& beta, double f0, double tau,
                           double density_local) {
  if (beta.size() != shard.cols()) throw Error(ErrorKind::kDimensionMismatch, "shard summary");
  return shard_summary_from_fitted(shard, sparse_product(shard.x, beta), f0, tau, density_local);
}

Vector assemble_linear_term(std::span<const ShardSummary> summaries,
                            const Vector& first_shard_sigma_beta) {
  if (summaries.empty()) throw Error(ErrorKind::kEmptyInput, "no shard summaries");
  const Index d = first_shard_sigma_beta.size();
  std::uint64_t total = 0;
  for (const auto& s : summaries) {
    if (s.z_nk.size() != d || s.sigma_beta.size() != d) {
      throw Error(ErrorKind::kDimensionMismatch, "summary dimension");
    }
    if (s.count == 0) throw Error(ErrorKind::kInvalidArgument, "summary with zero count");
    total += s.count;
  }
  Vector z = Vector::Zero(d), sigma = Vector::Zero(d);
  for (const auto& s : summaries) {
    const double w = static_cast<double>(s.count) / static_cast<double>(total);
    z += w * s.z_nk;
    sigma += w * s.sigma_beta;
  }
  return z + (first_shard_sigma_beta - sigma);
}

std::vector<std::uint8_t> serialize(const ShardSummary& summary) {
  wire::ByteWriter w;
  w.put_vector(summary.z_nk);
  w.put_vector(summary.sigma_beta);
  w.put_f64(summary.density_local);
  w.put_u64(summary.count);
  return w.take();
}

ShardSummary deserialize_summary(std::span<const std::uint8_t> bytes) {
  wire::ByteReader r(bytes);
  ShardSummary s;
  s.z_nk = r.get_vector();
  s.sigma_beta = r.get_vector();
  s.density_local = r.get_f64();
  s.count = r.get_u64();
  r.expect_done();
  if (s.z_nk.size() != s.sigma_beta.size()) {
    throw Error(ErrorKind::kProtocol, "summary vectors differ in length");
  }
  return s;
}

std::size_t serialized_size(Index dimension) noexcept {
  return 8 + 8 * static_cast<std::size_t>(dimension) + 8 + 8 * static_cast<std::size_t>(dimension) +
         8 + 8;
}

}  // namespace distrel::pseudo
