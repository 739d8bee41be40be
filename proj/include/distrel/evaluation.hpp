#pragma once

#include <cstddef>

#include "distrel/types.hpp"

namespace distrel::eval {

struct L2Error {
  double absolute = 0.0;
  double relative = 0.0;  // NaN when the truth is zero
};

L2Error l2_error(const Coefficients& est, const Coefficients& truth);

struct SupportMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
};

// Estimated support is |est_j| > zero_tol; the intercept counts as a coordinate.
// An empty estimated support has precision 0 and F1 0.
SupportMetrics support_metrics(const Coefficients& est, const Coefficients& truth,
                               double zero_tol = 0.0);

}  // namespace distrel::eval
