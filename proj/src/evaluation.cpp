#include "distrel/evaluation.hpp"

#include <cmath>
#include <limits>

namespace distrel::eval {

L2Error l2_error(const Coefficients& est, const Coefficients& truth) {
  if (est.size() != truth.size()) throw Error(ErrorKind::kDimensionMismatch, "l2_error");
  L2Error e;
  e.absolute = (est - truth).norm();
  const double scale = truth.norm();
  e.relative = scale > 0.0 ? e.absolute / scale : std::numeric_limits<double>::quiet_NaN();
  return e;
}

SupportMetrics support_metrics(const Coefficients& est, const Coefficients& truth, double zero_tol) {
  if (est.size() != truth.size()) throw Error(ErrorKind::kDimensionMismatch, "support_metrics");
  if (!(zero_tol >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "zero_tol must be >= 0");
  SupportMetrics m;
  for (Index j = 0; j < est.size(); ++j) {
    const bool hat = std::abs(est[j]) > zero_tol;
    const bool real = truth[j] != 0.0;
    if (hat && real) ++m.true_positives;
    else if (hat) ++m.false_positives;
    else if (real) ++m.false_negatives;
  }
  const auto tp = static_cast<double>(m.true_positives);
  const std::size_t selected = m.true_positives + m.false_positives;
  const std::size_t actual = m.true_positives + m.false_negatives;
  m.precision = selected > 0 ? tp / static_cast<double>(selected) : 0.0;
  m.recall = actual > 0 ? tp / static_cast<double>(actual) : 0.0;
  m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

}  // namespace distrel::eval
