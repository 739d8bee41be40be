#pragma once

// Independent reference implementations used only for verification.

#include <functional>
#include <vector>

#include "distrel/pseudo_response.hpp"
#include "distrel/types.hpp"

namespace distrel::oracle {

// Cyclic coordinate descent on 0.5 b'Ab - b'lin + reg |b|_1 (A positive definite).
Vector coordinate_descent(const Matrix& a, const Vector& lin, double reg, double tol = 1e-14,
                          int max_sweeps = 1000000);

// l1-penalized quantile regression as a linear program, solved by a dense
// tableau simplex with Bland's rule. For small instances only.
Vector l1_qr_simplex(const Dataset& data, double tau, double reg);

// Composite Simpson rule with `intervals` (even) subintervals.
double simpson(const std::function<double(double)>& f, double a, double b, int intervals);

// b from pooled dense algebra:
// Sigma_1 beta + (1/n) sum X_i Ytilde_i - (1/n) sum X_i X_i' beta.
Vector dense_linear_term(const std::vector<Dataset>& shards, std::size_t first,
                         const Vector& beta, double f0, double tau);

}  // namespace distrel::oracle
