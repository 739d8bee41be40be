#pragma once

#include <cstdint>

namespace distrel::schedule {

// Natural logarithms throughout.
struct ProblemScale {
  double n = 1;             // total samples
  double m = 1;             // samples on the first machine
  double p = 1;             // ambient dimension
  double s = 1;             // assumed sparsity
  double c0_bandwidth = 0.1;
  double C0_lambda = 1.0;

  void validate() const;
};

inline constexpr int kIterationCap = 100;
inline constexpr int kDefaultIterations = 50;

// sqrt(s log n / n) + s^((2g+1)/2) (log n / m)^((g+1)/2),  g >= 0
double rate_a(const ProblemScale& scale, int g);

// Same rate with c0 inside the geometric factor:
// sqrt(s log n / n) + s^(-1/2) (c0 s^2 log n / m)^((g+1)/2),  g >= 0
double rate_a_damped(const ProblemScale& scale, int g);

// h_g = rate_a_damped(g), g >= 1
double bandwidth_h(const ProblemScale& scale, int g);

// C0 (sqrt(log n / n) + rate_a(g-1) sqrt(s log n / m)),  g >= 1
double lambda_reg(const ProblemScale& scale, int g);

// C0 (sqrt(log n / n) + rate_a_damped(g-1) sqrt(s log n / m)),  g >= 1
double lambda_reg_damped(const ProblemScale& scale, int g);

struct IterationBudget {
  int iterations = 1;
  bool capped = false;  // the contraction precondition failed
};

// Smallest t >= log(n/m) / log(c0 m / (s^2 log n)), clamped to [1, kIterationCap].
IterationBudget iteration_budget(const ProblemScale& scale);

}  // namespace distrel::schedule
