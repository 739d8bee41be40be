#pragma once

#include <memory>
#include <optional>

#include "distrel/types.hpp"

namespace distrel::prox {

// sign(v) * max(|v| - lambda, 0).
double soft_threshold(double v, double lambda) noexcept;

// Symmetric PSD operator A, either an explicit matrix or the implicit
// (1/m) X^T X applied through the design.
class GramOperator {
 public:
  static GramOperator explicit_matrix(Matrix a);
  static GramOperator implicit_design(std::shared_ptr<const Matrix> x);

  // (1/m) X^T X, materialized iff (p+1)^2 <= 8 m (p+1).
  static GramOperator from_design(const Matrix& x);
  static bool should_materialize(Index rows, Index cols) noexcept;

  Index dimension() const noexcept;
  bool materialized() const noexcept { return design_ == nullptr; }
  const Matrix& matrix() const { return matrix_; }

  // out = A v. Zero coordinates of v are skipped when v is sparse enough.
  void apply(const Vector& v, Vector& out) const;
  Vector apply(const Vector& v) const;

  // A_jj; used by the coordinate-descent style checks.
  double diagonal(Index j) const;

 private:
  Matrix matrix_;
  std::shared_ptr<const Matrix> design_;
};

struct QuadraticProblem {
  GramOperator gram;
  Vector linear;
  double reg = 0.0;
  // Largest eigenvalue of gram when already known (reused across solves).
  std::optional<double> lipschitz;

  void validate() const;
};

enum class StepRule { kFixed, kBacktracking };

struct SolverSettings {
  int max_iters = 20000;
  double rel_tol = 1e-8;
  StepRule step_rule = StepRule::kFixed;

  void validate() const;
};

struct SolveResult {
  Coefficients beta;
  int iterations = 0;
  double kkt = 0.0;
  bool converged = false;
  int restarts = 0;
};

// 0.5 b'Ab - b'linear + reg |b|_1
double objective(const QuadraticProblem& prob, const Coefficients& beta);

// Max over coordinates of the l1 subgradient stationarity violation.
double kkt_residual(const QuadraticProblem& prob, const Coefficients& beta);

// Power iteration from a fixed seed; throws NonConvergence past the cap.
double largest_eigenvalue(const GramOperator& a, double tol, int max_iters = 100000);

// Objective value after every accepted step.
using ObjectiveTrace = std::vector<double>;

// FISTA with function-value restart and step 1/L.
// Stops once kkt_residual <= rel_tol * (1 + |linear|_inf); converged=false
// if max_iters runs out first. Throws DimensionMismatch.
SolveResult solve_l1_quadratic(const QuadraticProblem& prob, const Coefficients& warm_start,
                               const SolverSettings& settings = {},
                               ObjectiveTrace* trace = nullptr);

}  // namespace distrel::prox
