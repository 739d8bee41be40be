#pragma once

#include "distrel/types.hpp"

namespace distrel::qr {

// rho_tau(x) = x (tau - 1{x <= 0})
double check_loss(double x, double tau) noexcept;

// Mean check loss of the residuals y - x beta.
double mean_check_loss(const Dataset& data, const Coefficients& beta, double tau);

// argmin_x rho_tau(x) + (x - u)^2 / (2 gamma)
double quantile_prox(double u, double gamma, double tau) noexcept;

struct QrProblem {
  const Dataset& data;
  double tau;
  double reg;

  void validate() const;
};

struct AdmmSettings {
  int max_iters = 5000;
  double rel_tol = 1e-4;
  double penalty = 1.0;      // rho
  double relaxation = 1.5;   // over-relaxation factor
  // Residual balancing: rho is doubled or halved every 10 iterations when
  // the scaled residuals differ by more than 10x. The beta system does not
  // depend on rho, so the factorization is kept.
  bool adaptive_penalty = true;
  // Adaptation stops after this many iterations; a penalty that keeps
  // moving can stall the tail of the run.
  int adaptive_until = 1000;
};

struct QrResult {
  Coefficients beta;  // the sparse split variable z
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  bool converged = false;
};

// 0.5 * sqrt(log(max(p, n)) / m)
double default_lambda0(Index p, Index n, Index m);

// l1-penalized quantile regression, (1/m) sum rho_tau(y - x b) + reg |b|_1,
// by over-relaxed ADMM on r = y - x b, z = b.
QrResult solve_l1_qr(const QrProblem& prob, const AdmmSettings& settings = {});

}  // namespace distrel::qr
