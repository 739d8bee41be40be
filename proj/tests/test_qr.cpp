#include <doctest.h>

#include <algorithm>
#include <random>

#include "checks/oracles.hpp"
#include "distrel/error.hpp"
#include "distrel/qr_init.hpp"

using namespace distrel;
using namespace distrel::qr;

namespace {

// Brute-force minimizer of rho_tau(x) + (x-u)^2 / (2 gamma) on a fine grid.
double grid_prox(double u, double gamma, double tau) {
  double best = 0.0, best_val = 1e300;
  for (int i = -400000; i <= 400000; ++i) {
    const double x = i * 1e-5;
    const double v = check_loss(x, tau) + (x - u) * (x - u) / (2.0 * gamma);
    if (v < best_val) {
      best_val = v;
      best = x;
    }
  }
  return best;
}

Dataset intercept_only(const std::vector<double>& y) {
  Dataset d;
  d.x = Matrix::Ones(static_cast<Index>(y.size()), 1);
  d.y = Eigen::Map<const Vector>(y.data(), static_cast<Index>(y.size()));
  return d;
}

}  // namespace

TEST_SUITE("qr_init") {
  TEST_CASE("check loss") {
    CHECK(check_loss(2.0, 0.3) == doctest::Approx(0.6));
    CHECK(check_loss(-2.0, 0.3) == doctest::Approx(1.4));
    CHECK(check_loss(0.0, 0.3) == 0.0);
  }

  TEST_CASE("quantile prox against grid search") {
    CHECK(quantile_prox(1.0, 1.0, 0.3) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(quantile_prox(-1.0, 1.0, 0.3) == doctest::Approx(-0.3).epsilon(1e-12));
    CHECK(quantile_prox(0.1, 1.0, 0.3) == 0.0);
    for (double u : {1.0, -1.0, 0.1, 0.29, -0.69, 2.5}) {
      for (double gamma : {1.0, 0.4}) {
        CHECK(std::abs(quantile_prox(u, gamma, 0.3) - grid_prox(u, gamma, 0.3)) <= 1e-5);
      }
    }
  }

  TEST_CASE("median regression with no covariates") {
    const auto d = intercept_only({1.0, 2.0, 100.0});
    AdmmSettings s;
    s.rel_tol = 1e-9;
    s.max_iters = 100000;
    const auto r = solve_l1_qr(QrProblem{d, 0.5, 0.0}, s);
    CHECK(r.beta[0] == doctest::Approx(2.0).epsilon(1e-6));
  }

  TEST_CASE("intercept-only tau quantile and residual fraction") {
    std::mt19937_64 rng(500);
    std::normal_distribution<double> n01;
    std::vector<double> y(500);
    for (auto& v : y) v = n01(rng);
    AdmmSettings s;
    s.rel_tol = 1e-9;
    s.max_iters = 200000;
    const auto r = solve_l1_qr(QrProblem{intercept_only(y), 0.3, 0.0}, s);
    CHECK(r.converged);
    std::vector<double> sorted = y;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::abs(r.beta[0] - sorted[149]) <= 0.05);
    const double frac =
        static_cast<double>(std::count_if(y.begin(), y.end(), [&](double v) { return v - r.beta[0] <= 1e-7; })) /
        500.0;
    CHECK(frac >= 0.3 - 1.0 / 500);
    CHECK(frac <= 0.3 + 1.0 / 500);
  }

  TEST_CASE("sparse model with tiny noise agrees with the LP oracle") {
    std::mt19937_64 rng(50);
    std::normal_distribution<double> n01;
    Dataset d;
    d.x.resize(50, 6);
    Vector truth = Vector::Zero(6);
    truth << 1.0, 2.0, 0.0, -1.5, 0.0, 0.0;
    for (Index i = 0; i < 50; ++i) {
      d.x(i, 0) = 1.0;
      for (Index j = 1; j < 6; ++j) d.x(i, j) = n01(rng);
    }
    d.y = d.x * truth;
    for (Index i = 0; i < 50; ++i) d.y[i] += 1e-3 * n01(rng);
    AdmmSettings s;
    s.rel_tol = 1e-10;
    s.max_iters = 500000;
    const auto r = solve_l1_qr(QrProblem{d, 0.5, 0.05}, s);
    const Vector lp = oracle::l1_qr_simplex(d, 0.5, 0.05);
    CHECK((r.beta - lp).cwiseAbs().maxCoeff() <= 1e-4);
    CHECK((r.beta - truth).norm() <= 0.3);
    // The noise leaves inactive coefficients on the order of its scale, not exactly zero.
    for (Index j = 0; j < 6; ++j) {
      if (truth[j] == 0.0) CHECK(std::abs(r.beta[j]) <= 1e-3);
    }
    CHECK(r.primal_residual >= 0.0);
  }

  TEST_CASE("default lambda0") {
    CHECK(default_lambda0(500, 5000, 500) == doctest::Approx(0.5 * std::sqrt(std::log(5000.0) / 500.0)));
    CHECK(default_lambda0(9000, 5000, 500) == doctest::Approx(0.5 * std::sqrt(std::log(9000.0) / 500.0)));
  }

  TEST_CASE("nonzero count over a lambda grid is logged, mostly nonincreasing") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n01;
    Dataset d;
    d.x.resize(120, 21);
    for (Index i = 0; i < 120; ++i) {
      d.x(i, 0) = 1.0;
      for (Index j = 1; j < 21; ++j) d.x(i, j) = n01(rng);
    }
    d.y = 2.0 * d.x.col(1) - d.x.col(2);
    for (Index i = 0; i < 120; ++i) d.y[i] += n01(rng);
    Index prev = d.cols() + 1;
    int violations = 0;
    for (int k = 0; k < 10; ++k) {
      const double lambda = 0.01 * std::pow(1.6, k);
      const auto nnz = static_cast<Index>(nonzero_indices(solve_l1_qr(QrProblem{d, 0.5, lambda}).beta).size());
      if (nnz > prev) ++violations;
      prev = nnz;
    }
    MESSAGE("sparsity monotonicity violations: " << violations);
    CHECK(prev <= 3);
  }

  TEST_CASE("invalid inputs") {
    const auto d = intercept_only({1.0, 2.0});
    CHECK_THROWS_AS(solve_l1_qr(QrProblem{d, 1.0, 0.0}), Error);
    CHECK_THROWS_AS(solve_l1_qr(QrProblem{d, 0.5, -1.0}), Error);
    AdmmSettings bad;
    bad.max_iters = 0;
    CHECK_THROWS_AS(solve_l1_qr(QrProblem{d, 0.5, 0.0}, bad), Error);
  }
}
