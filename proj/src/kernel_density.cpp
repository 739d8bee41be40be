#include "distrel/kernel_density.hpp"

#include <cmath>

namespace distrel::kde {

double biweight(double x) noexcept {
  if (!(std::abs(x) < 1.0)) return 0.0;
  const double x2 = x * x;
  // Horner form of the sextic.
  return (((-315.0 * x2 + 735.0) * x2 - 525.0) * x2 + 105.0) / 64.0;
}

double density_at_zero(std::span<const double> residuals, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorKind::kInvalidBandwidth, "bandwidth must be positive and finite");
  }
  if (residuals.empty()) throw Error(ErrorKind::kEmptyInput, "no residuals");
  const double inv_h = 1.0 / h;
  double total = 0.0;
  for (double r : residuals) total += biweight(r * inv_h);
  return total / (static_cast<double>(residuals.size()) * h);
}

double local_density_at_zero(const Dataset& shard, const Coefficients& beta, double h) {
  if (beta.size() != shard.cols()) throw Error(ErrorKind::kDimensionMismatch, "density");
  const Vector resid = shard.y - sparse_product(shard.x, beta);
  return density_at_zero(std::span<const double>(resid.data(), static_cast<std::size_t>(resid.size())), h);
}

double aggregate_density(std::span<const LocalDensity> locals) {
  if (locals.empty()) throw Error(ErrorKind::kEmptyInput, "no local densities");
  std::uint64_t total = 0;
  for (const auto& l : locals) {
    if (l.count == 0) throw Error(ErrorKind::kInvalidArgument, "local density with zero count");
    total += l.count;
  }
  double acc = 0.0;
  for (const auto& l : locals) {
    acc += (static_cast<double>(l.count) / static_cast<double>(total)) * l.value;
  }
  return acc;
}

}  // namespace distrel::kde
