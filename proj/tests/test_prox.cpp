#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "checks/oracles.hpp"
#include "distrel/error.hpp"
#include "distrel/prox_solvers.hpp"

using namespace distrel;
using namespace distrel::prox;

namespace {

Matrix random_psd(std::mt19937_64& rng, Index d, Index rows, double ridge) {
  std::normal_distribution<double> n01;
  Matrix m(rows, d);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < d; ++j) m(i, j) = n01(rng);
  Matrix a = m.transpose() * m / static_cast<double>(rows);
  a.diagonal().array() += ridge;
  return a;
}

QuadraticProblem make(const Matrix& a, const Vector& b, double reg) {
  return QuadraticProblem{GramOperator::explicit_matrix(a), b, reg, std::nullopt};
}

}  // namespace

TEST_SUITE("prox_solvers") {
  TEST_CASE("soft threshold") {
    CHECK(soft_threshold(3.0, 1.0) == 2.0);
    CHECK(soft_threshold(-0.5, 1.0) == 0.0);
    CHECK(soft_threshold(-2.0, 0.5) == -1.5);
    CHECK(soft_threshold(1.0, 1.0) == 0.0);
  }

  TEST_CASE("identity quadratic reduces to soft thresholding") {
    Vector b(2);
    b << 3.0, 0.2;
    const auto res = solve_l1_quadratic(make(Matrix::Identity(2, 2), b, 1.0), Vector::Zero(2));
    CHECK(res.converged);
    CHECK(std::abs(res.beta[0] - 2.0) <= 1e-8);
    CHECK(res.beta[1] == 0.0);
    Vector exact(2);
    exact << 2.0, 0.0;
    CHECK(kkt_residual(make(Matrix::Identity(2, 2), b, 1.0), exact) <= 1e-12);

    const auto free = solve_l1_quadratic(make(Matrix::Identity(2, 2), b, 0.0), Vector::Zero(2));
    CHECK((free.beta - b).cwiseAbs().maxCoeff() <= 1e-8);
  }

  TEST_CASE("kkt residual by hand") {
    Vector b(2);
    b << 3.0, 0.2;
    const auto prob = make(Matrix::Identity(2, 2), b, 1.0);
    CHECK(kkt_residual(make(Matrix::Identity(2, 2), Vector::Zero(2), 0.7), Vector::Zero(2)) == 0.0);
    // At beta = b the smooth gradient vanishes, so coordinate 0 violates by exactly lambda.
    CHECK(kkt_residual(prob, b) == doctest::Approx(1.0));
  }

  TEST_CASE("largest eigenvalue") {
    Matrix d = Matrix::Zero(3, 3);
    d.diagonal() << 1.0, 4.0, 9.0;
    CHECK(largest_eigenvalue(GramOperator::explicit_matrix(d), 1e-12) == doctest::Approx(9.0).epsilon(1e-8));
    CHECK(largest_eigenvalue(GramOperator::explicit_matrix(Matrix::Identity(5, 5)), 1e-12) ==
          doctest::Approx(1.0).epsilon(1e-10));
    std::mt19937_64 rng(5);
    const Matrix a = random_psd(rng, 8, 12, 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    const double ref = es.eigenvalues().maxCoeff();
    CHECK(std::abs(largest_eigenvalue(GramOperator::explicit_matrix(a), 1e-13) - ref) <= 1e-8 * ref);
  }

  TEST_CASE("random 10-dim problem matches coordinate descent") {
    std::mt19937_64 rng(10);
    std::normal_distribution<double> n01;
    const Matrix a = random_psd(rng, 10, 30, 0.01);
    Vector b(10);
    for (Index j = 0; j < 10; ++j) b[j] = n01(rng);
    SolverSettings s;
    s.rel_tol = 1e-12;
    s.max_iters = 500000;
    const auto res = solve_l1_quadratic(make(a, b, 0.3), Vector::Zero(10), s);
    const Vector ref = oracle::coordinate_descent(a, b, 0.3);
    CHECK((res.beta - ref).cwiseAbs().maxCoeff() <= 1e-6);
  }

  TEST_CASE("objective is nonincreasing across accepted steps") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n01;
    for (int k = 0; k < 20; ++k) {
      const Index d = 3 + k % 15;
      const Matrix a = random_psd(rng, d, d + 5, 0.0);
      Vector b(d);
      for (Index j = 0; j < d; ++j) b[j] = n01(rng);
      ObjectiveTrace trace;
      solve_l1_quadratic(make(a, b, 0.1), Vector::Zero(d), {}, &trace);
      REQUIRE(!trace.empty());
      for (std::size_t i = 1; i < trace.size(); ++i) {
        CHECK(trace[i] <= trace[i - 1] + 1e-12 * std::max(1.0, std::abs(trace[i - 1])));
      }
    }
  }

  TEST_CASE("warm start from the solution stops almost immediately") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> n01;
    const Matrix a = random_psd(rng, 12, 20, 0.05);
    Vector b(12);
    for (Index j = 0; j < 12; ++j) b[j] = n01(rng);
    const auto prob = make(a, b, 0.2);
    const auto first = solve_l1_quadratic(prob, Vector::Zero(12));
    const auto again = solve_l1_quadratic(prob, first.beta);
    CHECK(again.iterations <= 2);
    CHECK(again.converged);
  }

  TEST_CASE("identity design error bound when |b - beta*| <= lambda/2") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Index d = 30;
    const int s = 5;
    const double lambda = 0.2;
    Vector truth = Vector::Zero(d);
    for (int j = 0; j < s; ++j) truth[j] = 1.0 + j;
    Vector b = truth;
    for (Index j = 0; j < d; ++j) b[j] += 0.5 * lambda * u(rng);
    const auto res = solve_l1_quadratic(make(Matrix::Identity(d, d), b, lambda), Vector::Zero(d));
    CHECK((res.beta - truth).norm() <= 2.0 * std::sqrt(static_cast<double>(s)) * lambda);
  }

  TEST_CASE("implicit and explicit Gram agree") {
    std::mt19937_64 rng(14);
    std::normal_distribution<double> n01;
    auto x = std::make_shared<Matrix>(15, 40);
    for (Index i = 0; i < x->rows(); ++i)
      for (Index j = 0; j < x->cols(); ++j) (*x)(i, j) = n01(rng);
    const Matrix explicit_a = x->transpose() * *x / 15.0;
    const auto implicit = GramOperator::implicit_design(x);
    Vector v(40);
    for (Index j = 0; j < 40; ++j) v[j] = j % 4 == 0 ? n01(rng) : 0.0;
    CHECK((implicit.apply(v) - explicit_a * v).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(implicit.diagonal(3) == doctest::Approx(explicit_a(3, 3)));
    CHECK_FALSE(GramOperator::should_materialize(15, 200));
    CHECK(GramOperator::should_materialize(500, 501));
  }

  TEST_CASE("dimension mismatch throws") {
    const auto prob = make(Matrix::Identity(3, 3), Vector::Zero(3), 0.1);
    CHECK_THROWS_AS(solve_l1_quadratic(prob, Vector::Zero(4)), Error);
  }
}
