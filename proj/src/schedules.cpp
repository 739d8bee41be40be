#include "distrel/schedules.hpp"

#include <spdlog/spdlog.h>

#include <cmath>

#include "distrel/error.hpp"

namespace distrel::schedule {

void ProblemScale::validate() const {
  if (!(m >= 1 && m <= n)) throw Error(ErrorKind::kInvalidArgument, "need 1 <= m <= n");
  if (!(s >= 1)) throw Error(ErrorKind::kInvalidArgument, "need s >= 1");
  if (!(p >= 1)) throw Error(ErrorKind::kInvalidArgument, "need p >= 1");
  if (!(c0_bandwidth > 0)) throw Error(ErrorKind::kInvalidArgument, "need c0 > 0");
  if (!(C0_lambda > 0)) throw Error(ErrorKind::kInvalidArgument, "need C0 > 0");
  if (!(n > 1)) throw Error(ErrorKind::kInvalidArgument, "need n > 1 for log n > 0");
}

namespace {

void require_index(int g, int lowest) {
  if (g < lowest) {
    throw Error(ErrorKind::kInvalidArgument,
                "iteration index must be >= " + std::to_string(lowest));
  }
}

double statistical_term(const ProblemScale& sc) {
  return std::sqrt(sc.s * std::log(sc.n) / sc.n);
}

}  // namespace

double rate_a(const ProblemScale& scale, int g) {
  scale.validate();
  require_index(g, 0);
  const double log_n = std::log(scale.n);
  const double gd = static_cast<double>(g);
  return statistical_term(scale) +
         std::pow(scale.s, (2.0 * gd + 1.0) / 2.0) * std::pow(log_n / scale.m, (gd + 1.0) / 2.0);
}

double rate_a_damped(const ProblemScale& scale, int g) {
  scale.validate();
  require_index(g, 0);
  const double log_n = std::log(scale.n);
  const double contraction = scale.c0_bandwidth * scale.s * scale.s * log_n / scale.m;
  return statistical_term(scale) +
         std::pow(scale.s, -0.5) * std::pow(contraction, (static_cast<double>(g) + 1.0) / 2.0);
}

double bandwidth_h(const ProblemScale& scale, int g) {
  require_index(g, 1);
  return rate_a_damped(scale, g);
}

double lambda_reg(const ProblemScale& scale, int g) {
  require_index(g, 1);
  const double log_n = std::log(scale.n);
  return scale.C0_lambda * (std::sqrt(log_n / scale.n) +
                            rate_a(scale, g - 1) * std::sqrt(scale.s * log_n / scale.m));
}

double lambda_reg_damped(const ProblemScale& scale, int g) {
  require_index(g, 1);
  const double log_n = std::log(scale.n);
  return scale.C0_lambda * (std::sqrt(log_n / scale.n) +
                            rate_a_damped(scale, g - 1) * std::sqrt(scale.s * log_n / scale.m));
}

IterationBudget iteration_budget(const ProblemScale& scale) {
  scale.validate();
  const double log_n = std::log(scale.n);
  const double numer = std::log(scale.n / scale.m);
  if (numer <= 0.0) return {1, false};
  const double ratio = scale.c0_bandwidth * scale.m / (scale.s * scale.s * log_n);
  if (ratio <= 1.0) {
    spdlog::warn("iteration budget: c0 m / (s^2 log n) = {:.4g} <= 1, using cap {}", ratio,
                 kIterationCap);
    return {kIterationCap, true};
  }
  const double bound = numer / std::log(ratio);
  const double t = std::ceil(bound - 1e-12);
  if (t > kIterationCap) return {kIterationCap, true};
  return {std::max(1, static_cast<int>(t)), false};
}

}  // namespace distrel::schedule
