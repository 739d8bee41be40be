#include "distrel/prox_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace distrel::prox {

double soft_threshold(double v, double lambda) noexcept {
  if (v > lambda) return v - lambda;
  if (v < -lambda) return v + lambda;
  return 0.0;
}

GramOperator GramOperator::explicit_matrix(Matrix a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::kDimensionMismatch, "gram matrix is not square");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw Error(ErrorKind::kInvalidArgument, "gram matrix is not symmetric");
  }
  GramOperator op;
  op.matrix_ = std::move(a);
  return op;
}

GramOperator GramOperator::implicit_design(std::shared_ptr<const Matrix> x) {
  if (!x || x->rows() < 1) throw Error(ErrorKind::kEmptyInput, "implicit gram needs a design");
  GramOperator op;
  op.design_ = std::move(x);
  return op;
}

bool GramOperator::should_materialize(Index rows, Index cols) noexcept {
  return cols * cols <= 8 * rows * cols;
}

GramOperator GramOperator::from_design(const Matrix& x) {
  if (x.rows() < 1) throw Error(ErrorKind::kEmptyInput, "gram of an empty design");
  if (!should_materialize(x.rows(), x.cols())) {
    return implicit_design(std::make_shared<const Matrix>(x));
  }
  const double inv = 1.0 / static_cast<double>(x.rows());
  Matrix a = Matrix::Zero(x.cols(), x.cols());
  a.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose(), inv);
  a.triangularView<Eigen::StrictlyUpper>() = a.transpose();
  GramOperator op;
  op.matrix_ = std::move(a);
  return op;
}

Index GramOperator::dimension() const noexcept {
  return design_ ? design_->cols() : matrix_.rows();
}

void GramOperator::apply(const Vector& v, Vector& out) const {
  if (v.size() != dimension()) throw Error(ErrorKind::kDimensionMismatch, "gram apply");
  if (design_) {
    const Matrix& x = *design_;
    const Vector xv = sparse_product(x, v);
    out.noalias() = x.transpose() * xv;
    out /= static_cast<double>(x.rows());
    return;
  }
  const auto idx = nonzero_indices(v);
  if (4 * static_cast<Index>(idx.size()) >= v.size()) {
    out.noalias() = matrix_ * v;
    return;
  }
  out.setZero(matrix_.rows());
  for (Index j : idx) out.noalias() += v[j] * matrix_.col(j);
}

Vector GramOperator::apply(const Vector& v) const {
  Vector out(dimension());
  apply(v, out);
  return out;
}

double GramOperator::diagonal(Index j) const {
  if (design_) return design_->col(j).squaredNorm() / static_cast<double>(design_->rows());
  return matrix_(j, j);
}

void QuadraticProblem::validate() const {
  if (linear.size() != gram.dimension()) {
    throw Error(ErrorKind::kDimensionMismatch, "linear term and gram operator disagree");
  }
  if (!(reg >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "regularization must be >= 0");
}

void SolverSettings::validate() const {
  if (max_iters < 1) throw Error(ErrorKind::kInvalidArgument, "max_iters must be >= 1");
  if (!(rel_tol > 0.0)) throw Error(ErrorKind::kInvalidArgument, "rel_tol must be > 0");
}

namespace {

double objective_from_product(const Vector& beta, const Vector& a_beta, const Vector& b,
                              double reg) {
  return 0.5 * beta.dot(a_beta) - beta.dot(b) + reg * beta.lpNorm<1>();
}

double kkt_from_product(const Vector& beta, const Vector& a_beta, const Vector& b,
                        double reg) {
  double worst = 0.0;
  for (Index j = 0; j < beta.size(); ++j) {
    const double g = a_beta[j] - b[j];
    double r;
    if (beta[j] > 0.0) {
      r = std::abs(g + reg);
    } else if (beta[j] < 0.0) {
      r = std::abs(g - reg);
    } else {
      r = std::max(std::abs(g) - reg, 0.0);
    }
    worst = std::max(worst, r);
  }
  return worst;
}

void prox_step(const Vector& point, const Vector& grad, double inv_l, double reg, Vector& out) {
  out.resize(point.size());
  const double thr = reg * inv_l;
  for (Index j = 0; j < point.size(); ++j) {
    out[j] = soft_threshold(point[j] - inv_l * grad[j], thr);
  }
}

}  // namespace

double objective(const QuadraticProblem& prob, const Coefficients& beta) {
  prob.validate();
  if (beta.size() != prob.gram.dimension()) throw Error(ErrorKind::kDimensionMismatch, "objective");
  return objective_from_product(beta, prob.gram.apply(beta), prob.linear, prob.reg);
}

double kkt_residual(const QuadraticProblem& prob, const Coefficients& beta) {
  prob.validate();
  if (beta.size() != prob.gram.dimension()) {
    throw Error(ErrorKind::kDimensionMismatch, "kkt residual");
  }
  return kkt_from_product(beta, prob.gram.apply(beta), prob.linear, prob.reg);
}

double largest_eigenvalue(const GramOperator& a, double tol, int max_iters) {
  const Index d = a.dimension();
  if (d == 0) return 0.0;
  std::mt19937_64 rng(0x5eedULL);
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  Vector v(d);
  for (Index j = 0; j < d; ++j) v[j] = unif(rng);
  v.normalize();
  Vector av(d);
  // The sparse shortcut in apply() never triggers for a dense start vector.
  a.apply(v, av);
  double rq = v.dot(av);
  for (int it = 0; it < max_iters; ++it) {
    const double norm = av.norm();
    if (norm == 0.0) return 0.0;
    v = av / norm;
    a.apply(v, av);
    const double next = v.dot(av);
    if (std::abs(next - rq) <= tol * std::abs(next)) return next;
    rq = next;
  }
  throw Error(ErrorKind::kNonConvergence, "power iteration did not converge");
}

SolveResult solve_l1_quadratic(const QuadraticProblem& prob, const Coefficients& warm_start,
                               const SolverSettings& settings, ObjectiveTrace* trace) {
  prob.validate();
  settings.validate();
  const Index d = prob.gram.dimension();
  if (warm_start.size() != d) throw Error(ErrorKind::kDimensionMismatch, "warm start size");

  const Vector& b = prob.linear;
  const double reg = prob.reg;
  const double threshold =
      settings.rel_tol * (1.0 + (d > 0 ? b.cwiseAbs().maxCoeff() : 0.0));

  SolveResult result;
  Vector x = warm_start;
  Vector ax = prob.gram.apply(x);
  double fx = objective_from_product(x, ax, b, reg);
  result.kkt = kkt_from_product(x, ax, b, reg);
  if (trace) trace->push_back(fx);
  if (result.kkt <= threshold) {
    result.beta = std::move(x);
    result.converged = true;
    return result;
  }

  double lipschitz = prob.lipschitz ? *prob.lipschitz : largest_eigenvalue(prob.gram, 1e-6);
  if (settings.step_rule == StepRule::kFixed) {
    lipschitz *= 1.001;
  } else {
    lipschitz *= 0.5;
  }
  lipschitz = std::max(lipschitz, 1e-12);

  Vector y = x, ay = ax, grad(d), x_new(d), ax_new(d);
  double momentum_t = 1.0;
  bool at_restart = true;

  for (int it = 1; it <= settings.max_iters; ++it) {
    result.iterations = it;
    grad = ay - b;
    prox_step(y, grad, 1.0 / lipschitz, reg, x_new);
    prob.gram.apply(x_new, ax_new);

    if (settings.step_rule == StepRule::kBacktracking) {
      // Sufficient decrease of the smooth part along the prox step.
      const double fy_smooth = 0.5 * y.dot(ay) - y.dot(b);
      for (int guard = 0; guard < 60; ++guard) {
        const Vector diff = x_new - y;
        const double f_new_smooth = 0.5 * x_new.dot(ax_new) - x_new.dot(b);
        if (f_new_smooth <= fy_smooth + grad.dot(diff) + 0.5 * lipschitz * diff.squaredNorm() +
                                1e-14 * std::max(1.0, std::abs(fy_smooth))) {
          break;
        }
        lipschitz *= 2.0;
        prox_step(y, grad, 1.0 / lipschitz, reg, x_new);
        prob.gram.apply(x_new, ax_new);
      }
    }

    const double f_new = objective_from_product(x_new, ax_new, b, reg);
    const double slack = 1e-12 * std::max(1.0, std::abs(fx));
    if (f_new > fx + slack) {
      if (at_restart) {
        // A plain prox step from x failed to descend: the step is too long.
        lipschitz *= 2.0;
      } else {
        y = x;
        ay = ax;
        momentum_t = 1.0;
        ++result.restarts;
      }
      at_restart = true;
      continue;
    }

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum_t * momentum_t));
    const double mom = (momentum_t - 1.0) / t_next;
    momentum_t = t_next;
    y = x_new + mom * (x_new - x);
    ay = ax_new + mom * (ax_new - ax);
    x.swap(x_new);
    ax.swap(ax_new);
    fx = f_new;
    at_restart = false;
    if (trace) trace->push_back(fx);

    result.kkt = kkt_from_product(x, ax, b, reg);
    if (result.kkt <= threshold) {
      result.converged = true;
      break;
    }
  }
  result.beta = std::move(x);
  return result;
}

}  // namespace distrel::prox
