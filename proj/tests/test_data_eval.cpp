#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>

#include "checks/oracles.hpp"
#include "distrel/baselines.hpp"
#include "distrel/datagen.hpp"
#include "distrel/error.hpp"
#include "distrel/evaluation.hpp"
#include "distrel/kernel_density.hpp"
#include "distrel/qr_init.hpp"

using namespace distrel;

TEST_SUITE("datagen") {
  TEST_CASE("true coefficients") {
    const auto b = data::beta_star(20, 500);
    REQUIRE(b.size() == 501);
    CHECK(b[0] == 0.5);
    CHECK(b[1] == 1.0);
    CHECK(b[19] == 10.0);
    CHECK(b[20] == 0.0);
    CHECK(b.sum() == doctest::Approx(105.0));
    CHECK(b.norm() == doctest::Approx(26.79).epsilon(1e-3));
    const auto one = data::beta_star(1, 5);
    CHECK(one[0] == 10.0);
    CHECK(one.tail(5).isZero());
    CHECK_THROWS_AS(data::beta_star(0, 5), Error);
    CHECK_THROWS_AS(data::beta_star(7, 5), Error);
  }

  TEST_CASE("noise quantiles") {
    CHECK(data::noise_quantile(data::Noise::kNormal, 0.5) == doctest::Approx(0.0));
    CHECK(data::noise_quantile(data::Noise::kCauchy, 0.3) == doctest::Approx(-0.72654).epsilon(1e-5));
    CHECK(data::noise_quantile(data::Noise::kExponential, 0.3) == doctest::Approx(0.356675).epsilon(1e-6));
    CHECK(data::noise_quantile(data::Noise::kNormal, 0.3) == doctest::Approx(-0.5244005).epsilon(1e-6));
  }

  TEST_CASE("empirical noise quantile matches the analytic one") {
    data::SimDesign d;
    d.n = 200000;
    d.noise = data::Noise::kCauchy;
    d.seed = 99;
    Vector e = data::sample_noise(d);
    std::vector<double> v(e.data(), e.data() + e.size());
    std::nth_element(v.begin(), v.begin() + 60000, v.end());
    CHECK(std::abs(v[60000] - data::noise_quantile(data::Noise::kCauchy, 0.3)) <= 0.01);
  }

  TEST_CASE("covariates: intercept column and covariance") {
    data::SimDesign d;
    d.n = 100000;
    d.p = 5;
    d.seed = 5;
    const Matrix x = data::sample_covariates(d);
    CHECK(x.col(0).isOnes());
    const Matrix z = x.rightCols(5);
    const Matrix cov = (z.transpose() * z) / static_cast<double>(d.n);
    const Matrix sigma = data::toeplitz_covariance(5, 0.5);
    CHECK(sigma(0, 0) == 1.0);
    CHECK(sigma(0, 2) == 0.25);
    CHECK((cov - sigma).cwiseAbs().maxCoeff() <= 0.02);
  }

  TEST_CASE("effective truth and P(e <= 0) = tau") {
    for (auto noise : {data::Noise::kNormal, data::Noise::kCauchy, data::Noise::kExponential}) {
      data::SimDesign d;
      d.n = 100000;
      d.p = 4;
      d.s = 3;
      d.noise = noise;
      d.tau = 0.3;
      d.seed = 17;
      const auto g = data::generate(d);
      CHECK(g.effective_beta[0] == doctest::Approx(g.beta_star[0] + data::noise_quantile(noise, 0.3)));
      CHECK(g.effective_beta.tail(4) == g.beta_star.tail(4));
      const Vector r = g.data.y - g.data.x * g.effective_beta;
      const double frac = (r.array() <= 0.0).cast<double>().mean();
      CHECK(std::abs(frac - 0.3) <= 0.01);
    }
    data::SimDesign median;
    median.tau = 0.5;
    const auto g = data::generate(median);
    CHECK(g.effective_beta == g.beta_star);
  }

  TEST_CASE("constant noise hook: quantile fit interpolates the effective truth") {
    data::SimDesign d;
    d.n = 50;
    d.p = 3;
    d.s = 2;
    d.noise = data::Noise::kCauchy;
    d.tau = 0.3;
    d.seed = 8;
    d.constant_noise = data::noise_quantile(d.noise, d.tau);
    const auto g = data::generate(d);
    qr::AdmmSettings s;
    s.rel_tol = 1e-11;
    s.max_iters = 200000;
    const auto fit = qr::solve_l1_qr(qr::QrProblem{g.data, d.tau, 0.0}, s);
    CHECK((fit.beta - g.effective_beta).cwiseAbs().maxCoeff() <= 1e-6);
  }

  TEST_CASE("seed determinism and independence") {
    data::SimDesign d;
    d.n = 300;
    d.p = 20;
    d.noise = data::Noise::kExponential;
    d.seed = 1234;
    const auto a = data::generate(d);
    const auto b = data::generate(d);
    CHECK(a.data.x == b.data.x);
    CHECK(a.data.y == b.data.y);
    const auto v = data::generate_validation(d);
    CHECK(v.data.y != a.data.y);
    d.seed = 1235;
    CHECK(data::generate(d).data.y != a.data.y);
    CHECK(data::derive_seed(1, 2, 3) == data::derive_seed(1, 2, 3));
    CHECK(data::derive_seed(1, 2, 3) != data::derive_seed(1, 3, 2));
  }

  TEST_CASE("counter rng") {
    data::CounterRng r(3, 0);
    for (std::uint64_t i = 0; i < 1000; ++i) {
      const double u = r.uniform(i);
      CHECK(u > 0.0);
      CHECK(u < 1.0);
    }
    CHECK(r.bits(10) == data::CounterRng(3, 0).bits(10));
    CHECK(r.bits(10) != data::CounterRng(3, 1).bits(10));
  }

  TEST_CASE("shard file round trip") {
    data::SimDesign d;
    d.n = 37;
    d.p = 6;
    d.seed = 4;
    const auto g = data::generate(d);
    const auto path = std::filesystem::temp_directory_path() / "distrel_shard_test.bin";
    data::save_shard(path, g.data, 4);
    std::uint64_t seed = 0;
    const auto back = data::load_shard(path, &seed);
    CHECK(seed == 4);
    CHECK(back.x == g.data.x);
    CHECK(back.y == g.data.y);
    std::filesystem::resize_file(path, 50);
    CHECK_THROWS_AS(data::load_shard(path), Error);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(data::load_shard(path), Error);
  }

  TEST_CASE("noise names") {
    CHECK(data::parse_noise("cauchy") == data::Noise::kCauchy);
    CHECK(std::string(data::to_string(data::Noise::kExponential)) == "exponential");
    CHECK_THROWS_AS(data::parse_noise("laplace"), Error);
  }
}

TEST_SUITE("evaluation") {
  TEST_CASE("l2 error") {
    const auto truth = data::beta_star(20, 500);
    const auto self = eval::l2_error(truth, truth);
    CHECK(self.absolute == 0.0);
    CHECK(self.relative == 0.0);
    const auto zero = eval::l2_error(Coefficients::Zero(501), truth);
    CHECK(zero.absolute == doctest::Approx(26.79).epsilon(1e-3));
    CHECK(zero.relative == doctest::Approx(1.0));
    Coefficients bump = truth;
    bump[300] += 1.0;
    CHECK(eval::l2_error(bump, truth).absolute == doctest::Approx(1.0));
    CHECK(std::isnan(eval::l2_error(bump, Coefficients::Zero(501)).relative));
  }

  TEST_CASE("support metrics") {
    const auto truth = data::beta_star(20, 500);
    const auto exact = eval::support_metrics(truth, truth);
    CHECK(exact.precision == 1.0);
    CHECK(exact.recall == 1.0);
    CHECK(exact.f1 == 1.0);
    const auto dense = eval::support_metrics(Coefficients::Ones(501), truth);
    CHECK(dense.precision == doctest::Approx(20.0 / 501));
    CHECK(dense.recall == 1.0);
    CHECK(dense.f1 == doctest::Approx(2 * (20.0 / 501) / (20.0 / 501 + 1)));
    CHECK(dense.f1 == doctest::Approx(0.077).epsilon(0.01));
    Coefficients half = Coefficients::Zero(4);
    half << 1, 1, 1, 1;
    Coefficients t2 = Coefficients::Zero(4);
    t2 << 1, 1, 0, 0;
    CHECK(eval::support_metrics(half, t2).f1 == doctest::Approx(2.0 / 3));
    const auto empty = eval::support_metrics(Coefficients::Zero(501), truth);
    CHECK(empty.precision == 0.0);
    CHECK(empty.f1 == 0.0);
    CHECK(eval::support_metrics(Coefficients::Constant(4, 1e-3), t2, 1e-2).true_positives == 0);
  }

  TEST_CASE("F1 = 1 iff supports agree, and permutation invariance") {
    std::mt19937_64 rng(8);
    std::bernoulli_distribution coin(0.3);
    for (int k = 0; k < 50; ++k) {
      Coefficients a = Coefficients::Zero(12), b = Coefficients::Zero(12);
      for (Index j = 0; j < 12; ++j) {
        if (coin(rng)) a[j] = 1.0 + j;
        if (coin(rng)) b[j] = -2.0;
      }
      b[0] = 1.0;
      bool same = true;
      for (Index j = 0; j < 12; ++j) same = same && ((a[j] != 0.0) == (b[j] != 0.0));
      CHECK((eval::support_metrics(a, b).f1 == 1.0) == same);
      Eigen::PermutationMatrix<Eigen::Dynamic> perm(12);
      perm.setIdentity();
      std::shuffle(perm.indices().data(), perm.indices().data() + 12, rng);
      const Coefficients pa = perm * a, pb = perm * b;
      CHECK(eval::support_metrics(pa, pb).f1 == eval::support_metrics(a, b).f1);
    }
  }
}

TEST_SUITE("baselines") {
  TEST_CASE("lasso on an orthonormal design soft-thresholds X'y/n") {
    Dataset d;
    const Index n = 8;
    Matrix h = Matrix::Identity(n, n);
    // Columns scaled so that X'X/n = I.
    d.x = std::sqrt(static_cast<double>(n)) * h.leftCols(4);
    d.y = Vector::LinSpaced(n, -3, 4);
    const Vector xty = d.x.transpose() * d.y / static_cast<double>(n);
    prox::SolverSettings s;
    s.rel_tol = 1e-13;
    const Vector b = baseline::lasso_fit(d, 0.4, s);
    for (Index j = 0; j < 4; ++j) CHECK(b[j] == doctest::Approx(prox::soft_threshold(xty[j], 0.4)).epsilon(1e-10));
  }

  TEST_CASE("lasso at lambda = 0 is least squares") {
    data::SimDesign design;
    design.n = 200;
    design.p = 10;
    design.seed = 3;
    const auto g = data::generate(design);
    prox::SolverSettings s;
    s.rel_tol = 1e-13;
    s.max_iters = 1000000;
    const Vector b = baseline::lasso_fit(g.data, 0.0, s);
    const Vector ols = (g.data.x.transpose() * g.data.x).ldlt().solve(g.data.x.transpose() * g.data.y);
    CHECK((b - ols).cwiseAbs().maxCoeff() <= 1e-6);
  }

  TEST_CASE("lasso grid and validated path") {
    data::SimDesign design;
    design.n = 400;
    design.p = 30;
    design.seed = 12;
    const auto g = data::generate(design);
    const auto v = data::generate_validation(design);
    const auto grid = baseline::lasso_grid(g.data, 10, 1e-3);
    REQUIRE(grid.size() == 10);
    CHECK(grid.front() == doctest::Approx((g.data.x.transpose() * g.data.y).cwiseAbs().maxCoeff() / 400));
    CHECK(grid.back() == doctest::Approx(grid.front() * 1e-3));
    CHECK(baseline::lasso_fit(g.data, grid.front() * 1.0001).isZero());
    const auto res = baseline::pooled_lasso(g.data, v.data, grid);
    CHECK(res.losses.size() == 10);
    CHECK(res.validation_mse == *std::min_element(res.losses.begin(), res.losses.end()));
    CHECK_THROWS_AS(baseline::lasso_grid(g.data, 0), Error);
  }

  TEST_CASE("avg-dc: one shard and identical shards") {
    data::SimDesign design;
    design.n = 150;
    design.p = 8;
    design.seed = 21;
    const auto g = data::generate(design);
    auto shard = std::make_shared<const Dataset>(g.data);
    const std::vector<net::ShardPtr> one{shard};
    const auto direct = qr::solve_l1_qr(qr::QrProblem{g.data, 0.5, 0.05}).beta;
    CHECK(baseline::avg_dc(one, 0.5, 0.05, {}) == direct);
    const std::vector<net::ShardPtr> three{shard, shard, shard};
    CHECK((baseline::avg_dc(three, 0.5, 0.05, {}) - direct).cwiseAbs().maxCoeff() <= 1e-12);
    const std::vector<net::ShardPtr> none;
    CHECK_THROWS_AS(baseline::avg_dc(none, 0.5, 0.05, {}), Error);
  }

  TEST_CASE("dependent variant: dropped rows and a hand-solved case") {
    Dataset d;
    d.x = Matrix::Ones(3, 1);
    d.y.resize(3);
    d.y << 0.2, 5.0, -7.0;
    const Coefficients beta0 = Coefficients::Zero(1);
    prox::SolverSettings s;
    s.rel_tol = 1e-14;
    const auto r = baseline::dependent_rel(d, 0.3, 1.0, beta0, 0.0, s);
    CHECK(r.retained_rows == 1);
    // One row: gamma^2 beta / n = gamma * Ytilde / n, so beta = Ytilde / gamma.
    const double gamma = std::sqrt(kde::biweight(0.2));
    const double yt = gamma * 0.0 - (0.0 - 0.3) / gamma;
    CHECK(r.beta[0] == doctest::Approx(yt / gamma).epsilon(1e-10));

    Dataset far = d;
    far.y << 3.0, 5.0, -7.0;
    CHECK_THROWS_AS(baseline::dependent_rel(far, 0.3, 1.0, beta0, 0.0, s), Error);
    CHECK_THROWS_AS(baseline::dependent_rel(d, 0.3, 0.0, beta0, 0.0, s), Error);
  }

  TEST_CASE("dependent variant matches a dense Lasso on its transformed data") {
    data::SimDesign design;
    design.n = 300;
    design.p = 6;
    design.seed = 31;
    const auto g = data::generate(design);
    const Coefficients beta0 = g.effective_beta * 0.95;
    const double h = 1.5, lambda = 0.02;
    prox::SolverSettings s;
    s.rel_tol = 1e-13;
    s.max_iters = 500000;
    const auto r = baseline::dependent_rel(g.data, 0.5, h, beta0, lambda, s);
    Matrix a = Matrix::Zero(7, 7);
    Vector b = Vector::Zero(7);
    for (Index i = 0; i < g.data.rows(); ++i) {
      const double fit = g.data.x.row(i).dot(beta0);
      const double w = kde::biweight((g.data.y[i] - fit) / h) / h;
      if (w <= 0.0) continue;
      const double gm = std::sqrt(w);
      const Vector xt = gm * g.data.x.row(i).transpose();
      a += xt * xt.transpose() / 300.0;
      b += xt * (gm * fit - ((g.data.y[i] <= fit ? 1.0 : 0.0) - 0.5) / gm) / 300.0;
    }
    const Vector ref = oracle::coordinate_descent(a, b, lambda);
    CHECK((r.beta - ref).cwiseAbs().maxCoeff() <= 1e-7);
  }
}
