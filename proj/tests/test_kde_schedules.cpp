#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "checks/oracles.hpp"
#include "distrel/error.hpp"
#include "distrel/kernel_density.hpp"
#include "distrel/schedules.hpp"

using namespace distrel;

TEST_SUITE("kernel_density") {
  TEST_CASE("kernel values and mass") {
    CHECK(kde::biweight(0.0) == 1.640625);
    CHECK(kde::biweight(1.0) == 0.0);
    CHECK(kde::biweight(-1.0) == 0.0);
    CHECK(kde::biweight(1.5) == 0.0);
    CHECK(kde::biweight(0.3) == kde::biweight(-0.3));
    CHECK(std::abs(oracle::simpson(kde::biweight, -1.0, 1.0, 4000) - 1.0) <= 1e-10);
    // Fourth-order kernel: positive near the centre, negative lobes before the edge.
    CHECK(kde::biweight(0.3) > 0.0);
    CHECK(kde::biweight(0.8) < 0.0);
    CHECK(std::abs(kde::biweight(0.999999)) < 1e-9);
  }

  TEST_CASE("degenerate residuals") {
    const std::vector<double> zeros(7, 0.0);
    CHECK(kde::density_at_zero(zeros, 1.0) == 1.640625);
    const std::vector<double> far{1.0, -1.0, 2.0, -3.5};
    CHECK(kde::density_at_zero(far, 1.0) == 0.0);
    CHECK_THROWS_AS(kde::density_at_zero(far, 0.0), Error);
    CHECK_THROWS_AS(kde::density_at_zero(std::vector<double>{}, 1.0), Error);
  }

  TEST_CASE("normal residuals estimate phi(0)") {
    std::mt19937_64 rng(188);
    std::normal_distribution<double> n01;
    double sum = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<double> r(1000);
      for (auto& v : r) v = n01(rng);
      sum += kde::density_at_zero(r, 0.5);
    }
    CHECK(std::abs(sum / 50 - 1.0 / std::sqrt(2.0 * std::numbers::pi)) <= 0.1);
  }

  TEST_CASE("aggregation") {
    const std::vector<kde::LocalDensity> a{{1.0, 10}, {1.0, 10}};
    CHECK(kde::aggregate_density(a) == 1.0);
    const std::vector<kde::LocalDensity> b{{2.0, 10}, {0.0, 30}};
    CHECK(kde::aggregate_density(b) == 0.5);
  }

  TEST_CASE("shards of one dataset give the pooled density") {
    std::mt19937_64 rng(19);
    std::normal_distribution<double> n01;
    Dataset d;
    d.x.resize(300, 4);
    d.y.resize(300);
    for (Index i = 0; i < 300; ++i) {
      d.x(i, 0) = 1.0;
      for (Index j = 1; j < 4; ++j) d.x(i, j) = n01(rng);
      d.y[i] = d.x(i, 1) + 0.5 * n01(rng);
    }
    Vector beta = Vector::Zero(4);
    beta[1] = 0.9;
    const double pooled = kde::local_density_at_zero(d, beta, 0.3);
    for (Index size : {Index{50}, Index{70}, Index{299}}) {
      std::vector<kde::LocalDensity> locals;
      for (const auto& s : split_even(d, size)) {
        locals.push_back({kde::local_density_at_zero(s, beta, 0.3), static_cast<std::uint64_t>(s.rows())});
      }
      CHECK(std::abs(kde::aggregate_density(locals) - pooled) <= 1e-12);
    }
  }
}

TEST_SUITE("schedules") {
  schedule::ProblemScale table_scale() {
    schedule::ProblemScale sc;
    sc.n = 10000;
    sc.m = 500;
    sc.p = 500;
    sc.s = 20;
    sc.c0_bandwidth = 0.1;
    sc.C0_lambda = 1.0;
    return sc;
  }

  TEST_CASE("rate at g = 0") {
    const auto sc = table_scale();
    const double ln = std::log(10000.0);
    const double ref = std::sqrt(20 * ln / 10000) + std::sqrt(20.0) * std::sqrt(ln / 500);
    CHECK(schedule::rate_a(sc, 0) == doctest::Approx(ref).epsilon(1e-14));
    CHECK(schedule::rate_a(sc, 0) == doctest::Approx(0.7427).epsilon(1e-4));
  }

  TEST_CASE("rate with m = n has equal terms") {
    auto sc = table_scale();
    sc.m = sc.n;
    sc.s = 1;
    const double first = std::sqrt(std::log(sc.n) / sc.n);
    CHECK(schedule::rate_a(sc, 0) == doctest::Approx(2 * first));
  }

  TEST_CASE("rate decays when s^2 log n / m < 1") {
    schedule::ProblemScale sc;
    sc.n = 1e6;
    sc.m = 5000;
    sc.s = 2;
    for (int g = 0; g < 10; ++g) CHECK(schedule::rate_a(sc, g + 1) < schedule::rate_a(sc, g));
  }

  TEST_CASE("bandwidth follows the displayed formula") {
    const auto sc = table_scale();
    const double ln = std::log(10000.0);
    const double q = 0.1 * 400 * ln / 500;
    for (int g = 1; g <= 5; ++g) {
      const double ref = std::sqrt(20 * ln / 10000) + std::pow(20.0, -0.5) * std::pow(q, (g + 1) / 2.0);
      CHECK(schedule::bandwidth_h(sc, g) == doctest::Approx(ref).epsilon(1e-14));
      CHECK(schedule::bandwidth_h(sc, g) > 0.0);
    }
    CHECK(schedule::bandwidth_h(sc, 1) == doctest::Approx(0.30047).epsilon(1e-4));
    // Second term decays by sqrt(q) each iteration.
    const double t1 = schedule::bandwidth_h(sc, 1) - std::sqrt(20 * ln / 10000);
    const double t2 = schedule::bandwidth_h(sc, 2) - std::sqrt(20 * ln / 10000);
    CHECK(t2 / t1 == doctest::Approx(std::sqrt(q)));
    CHECK_THROWS_AS(schedule::bandwidth_h(sc, 0), Error);
  }

  TEST_CASE("bandwidth second term scales with c0") {
    auto sc = table_scale();
    const double base = std::sqrt(20 * std::log(10000.0) / 10000);
    const double before = schedule::bandwidth_h(sc, 1) - base;
    sc.c0_bandwidth *= 10;
    CHECK(schedule::bandwidth_h(sc, 1) - base == doctest::Approx(10 * before));
  }

  TEST_CASE("lambda schedule") {
    auto sc = table_scale();
    CHECK(schedule::lambda_reg(sc, 1) == doctest::Approx(0.4812).epsilon(2e-4));
    const double one = schedule::lambda_reg(sc, 1);
    sc.C0_lambda = 2.0;
    CHECK(schedule::lambda_reg(sc, 1) == doctest::Approx(2 * one));
    sc.C0_lambda = 1.0;
    const double ln = std::log(sc.n);
    CHECK(schedule::lambda_reg_damped(sc, 3) ==
          doctest::Approx(std::sqrt(ln / sc.n) + schedule::rate_a_damped(sc, 2) * std::sqrt(sc.s * ln / sc.m)));
  }

  TEST_CASE("lambda shrinks when the rate shrinks") {
    schedule::ProblemScale sc;
    sc.n = 1e6;
    sc.m = 5000;
    sc.s = 2;
    for (int g = 1; g < 8; ++g) CHECK(schedule::lambda_reg(sc, g + 1) < schedule::lambda_reg(sc, g));
  }

  TEST_CASE("iteration budget") {
    schedule::ProblemScale sc;
    sc.n = 10000;
    sc.m = 500;
    sc.s = 5;
    sc.c0_bandwidth = 1.0;
    const auto b = schedule::iteration_budget(sc);
    CHECK(b.iterations == 4);
    CHECK_FALSE(b.capped);
    sc.m = sc.n;
    CHECK(schedule::iteration_budget(sc).iterations == 1);
    auto hard = table_scale();
    const auto capped = schedule::iteration_budget(hard);
    CHECK(capped.capped);
    CHECK(capped.iterations == schedule::kIterationCap);
  }

  TEST_CASE("outputs positive and finite over a grid of scales") {
    for (double n : {1000.0, 1e4, 1e5}) {
      for (double m : {100.0, 500.0}) {
        for (double s : {1.0, 5.0, 20.0}) {
          schedule::ProblemScale sc;
          sc.n = n;
          sc.m = m;
          sc.s = s;
          for (int g = 1; g < 6; ++g) {
            CHECK(std::isfinite(schedule::bandwidth_h(sc, g)));
            CHECK(schedule::bandwidth_h(sc, g) > 0);
            CHECK(schedule::lambda_reg_damped(sc, g) > 0);
            CHECK(schedule::rate_a(sc, g) > 0);
          }
        }
      }
    }
  }

  TEST_CASE("invalid scales") {
    schedule::ProblemScale sc;
    sc.n = 100;
    sc.m = 200;
    CHECK_THROWS_AS(schedule::rate_a(sc, 0), Error);
    sc.m = 50;
    sc.s = 0;
    CHECK_THROWS_AS(schedule::rate_a(sc, 0), Error);
  }
}
