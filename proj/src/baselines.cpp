#include "distrel/baselines.hpp"

#include <tbb/parallel_for.h>

#include <cmath>
#include <limits>

#include "distrel/kernel_density.hpp"

namespace distrel::baseline {

namespace {

prox::QuadraticProblem least_squares_problem(const Dataset& data) {
  data.validate();
  if (data.rows() < 1) throw Error(ErrorKind::kEmptyInput, "empty dataset");
  prox::QuadraticProblem qp{prox::GramOperator::from_design(data.x),
                            data.x.transpose() * data.y / static_cast<double>(data.rows()), 0.0,
                            std::nullopt};
  qp.lipschitz = prox::largest_eigenvalue(qp.gram, 1e-10);
  return qp;
}

}  // namespace

engine::RelResult pooled_rel(net::ShardPtr data, const engine::RelOptions& options) {
  engine::ClusterConfig cfg;
  cfg.shards = {std::move(data)};
  cfg.options = options;
  return engine::run_distributed_rel(cfg);
}

Coefficients avg_dc(std::span<const net::ShardPtr> shards, double tau, double lambda,
                    const qr::AdmmSettings& settings) {
  if (shards.empty()) throw Error(ErrorKind::kEmptyInput, "no shards");
  for (const auto& s : shards) {
    if (!s || s->rows() < 1) throw Error(ErrorKind::kEmptyInput, "empty shard");
  }
  std::vector<Coefficients> fits(shards.size());
  tbb::parallel_for(std::size_t{0}, shards.size(), [&](std::size_t k) {
    try {
      fits[k] = qr::solve_l1_qr(qr::QrProblem{*shards[k], tau, lambda}, settings).beta;
    } catch (const Error& e) {
      throw Error(e.kind(), "shard " + std::to_string(k) + ": " + e.what());
    }
  });
  Index total = 0;
  for (const auto& s : shards) total += s->rows();
  Coefficients avg = Coefficients::Zero(fits.front().size());
  for (std::size_t k = 0; k < shards.size(); ++k) {
    if (fits[k].size() != avg.size()) throw Error(ErrorKind::kDimensionMismatch, "shard dimensions differ");
    avg += (static_cast<double>(shards[k]->rows()) / static_cast<double>(total)) * fits[k];
  }
  return avg;
}

std::vector<double> lasso_grid(const Dataset& data, int count, double ratio) {
  if (count < 1 || !(ratio > 0.0 && ratio <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "grid needs count >= 1 and ratio in (0,1]");
  }
  data.validate();
  const double top = (data.x.transpose() * data.y).cwiseAbs().maxCoeff() / static_cast<double>(data.rows());
  std::vector<double> grid(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double frac = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    grid[static_cast<std::size_t>(i)] = top * std::pow(ratio, frac);
  }
  return grid;
}

Coefficients lasso_fit(const Dataset& data, double lambda, const prox::SolverSettings& settings) {
  prox::QuadraticProblem qp = least_squares_problem(data);
  qp.reg = lambda;
  return prox::solve_l1_quadratic(qp, Coefficients::Zero(data.cols()), settings).beta;
}

LassoResult pooled_lasso(const Dataset& data, const Dataset& validation, std::span<const double> grid,
                         const prox::SolverSettings& settings) {
  if (grid.empty()) throw Error(ErrorKind::kEmptyInput, "empty lambda grid");
  validation.validate();
  if (validation.cols() != data.cols()) throw Error(ErrorKind::kDimensionMismatch, "validation set");
  prox::QuadraticProblem qp = least_squares_problem(data);
  LassoResult out;
  out.grid.assign(grid.begin(), grid.end());
  out.validation_mse = std::numeric_limits<double>::infinity();
  Coefficients warm = Coefficients::Zero(data.cols());
  for (double lambda : grid) {
    if (!(lambda >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "negative lambda");
    qp.reg = lambda;
    warm = prox::solve_l1_quadratic(qp, warm, settings).beta;
    const double mse = (validation.y - sparse_product(validation.x, warm)).squaredNorm() /
                       static_cast<double>(validation.rows());
    out.losses.push_back(mse);
    if (mse < out.validation_mse) {
      out.validation_mse = mse;
      out.lambda = lambda;
      out.beta = warm;
    }
  }
  return out;
}

DependentResult dependent_rel(const Dataset& data, double tau, double h, const Coefficients& beta0,
                              double lambda, const prox::SolverSettings& settings) {
  data.validate();
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorKind::kInvalidBandwidth, "bandwidth must be > 0");
  if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorKind::kInvalidArgument, "tau must lie in (0,1)");
  if (beta0.size() != data.cols()) throw Error(ErrorKind::kDimensionMismatch, "initial estimate");
  if (!(lambda >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "lambda must be >= 0");

  const Vector fitted = sparse_product(data.x, beta0);
  std::vector<Index> keep;
  std::vector<double> gamma;
  for (Index i = 0; i < data.rows(); ++i) {
    const double w = kde::biweight((data.y[i] - fitted[i]) / h) / h;
    if (w > 0.0) {
      keep.push_back(i);
      gamma.push_back(std::sqrt(w));
    }
  }
  if (keep.empty()) throw Error(ErrorKind::kAllRowsDropped, "no residual inside the kernel support");

  const auto r = static_cast<Index>(keep.size());
  Matrix xt(r, data.cols());
  Vector yt(r);
  for (Index k = 0; k < r; ++k) {
    const Index i = keep[static_cast<std::size_t>(k)];
    const double g = gamma[static_cast<std::size_t>(k)];
    xt.row(k) = g * data.x.row(i);
    const double indicator = data.y[i] <= fitted[i] ? 1.0 : 0.0;
    yt[k] = g * fitted[i] - (indicator - tau) / g;
  }
  const double inv_n = 1.0 / static_cast<double>(data.rows());
  Matrix gram = Matrix::Zero(data.cols(), data.cols());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(xt.transpose(), inv_n);
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  prox::QuadraticProblem qp{prox::GramOperator::explicit_matrix(std::move(gram)),
                            xt.transpose() * yt * inv_n, lambda, std::nullopt};
  DependentResult out;
  out.beta = prox::solve_l1_quadratic(qp, beta0, settings).beta;
  out.retained_rows = r;
  return out;
}

}  // namespace distrel::baseline
