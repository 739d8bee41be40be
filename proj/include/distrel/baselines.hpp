#pragma once

#include <span>
#include <vector>

#include "distrel/dist_engine.hpp"
#include "distrel/prox_solvers.hpp"
#include "distrel/qr_init.hpp"

namespace distrel::baseline {

// run_distributed_rel on a single in-process shard.
engine::RelResult pooled_rel(net::ShardPtr data, const engine::RelOptions& options);

// Count-weighted average of per-shard l1-QR fits, solved concurrently.
Coefficients avg_dc(std::span<const net::ShardPtr> shards, double tau, double lambda,
                    const qr::AdmmSettings& settings = {});

// Geometric grid from |X'y/n|_inf (where the fit is all zero) down by `ratio`.
std::vector<double> lasso_grid(const Dataset& data, int count = 40, double ratio = 1e-4);

// (1/2n)|y - X b|^2 + lambda |b|_1 with the full-data Gram.
Coefficients lasso_fit(const Dataset& data, double lambda, const prox::SolverSettings& settings = {});

struct LassoResult {
  Coefficients beta;
  double lambda = 0.0;
  double validation_mse = 0.0;
  std::vector<double> grid;
  std::vector<double> losses;  // validation MSE per grid point
};

// Path over the grid with warm starts; lambda chosen by validation squared loss.
LassoResult pooled_lasso(const Dataset& data, const Dataset& validation, std::span<const double> grid,
                         const prox::SolverSettings& settings = {});

struct DependentResult {
  Coefficients beta;
  Index retained_rows = 0;
};

// Kernel-weighted one-step fit: rows with weight gamma_i = 0 are dropped,
// the 1/n normalization keeps the full sample size.
DependentResult dependent_rel(const Dataset& data, double tau, double h, const Coefficients& beta0,
                              double lambda, const prox::SolverSettings& settings = {});

}  // namespace distrel::baseline
