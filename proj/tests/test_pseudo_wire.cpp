#include <doctest.h>

#include <random>

#include "checks/oracles.hpp"
#include "distrel/error.hpp"
#include "distrel/pseudo_response.hpp"
#include "distrel/wire.hpp"

using namespace distrel;

namespace {

Dataset small_shard(std::mt19937_64& rng, Index rows, Index p) {
  std::normal_distribution<double> n01;
  Dataset d;
  d.x.resize(rows, p + 1);
  d.y.resize(rows);
  for (Index i = 0; i < rows; ++i) {
    d.x(i, 0) = 1.0;
    for (Index j = 1; j <= p; ++j) d.x(i, j) = n01(rng);
    d.y[i] = d.x(i, 1) + n01(rng);
  }
  return d;
}

}  // namespace

TEST_SUITE("pseudo_response") {
  TEST_CASE("pseudo responses by hand") {
    Vector y(2), fitted(2);
    fitted << 0.4, -2.0;
    y << 1.4, -3.0;  // residuals +1 and -1
    const Vector yt = pseudo::pseudo_responses_from_fitted(y, fitted, 0.5, 0.3);
    CHECK(yt[0] == doctest::Approx(0.4 + 0.6));
    CHECK(yt[1] == doctest::Approx(-2.0 - 1.4));
  }

  TEST_CASE("ties count as below") {
    Vector y(1), fitted(1);
    y << 1.0;
    fitted << 1.0;
    CHECK(pseudo::pseudo_responses_from_fitted(y, fitted, 1.0, 0.3)[0] == doctest::Approx(1.0 - 0.7));
  }

  TEST_CASE("symmetric residuals cancel at the median") {
    Vector y(4), fitted = Vector::Zero(4);
    y << 1.0, -1.0, 2.0, -2.0;
    const Vector yt = pseudo::pseudo_responses_from_fitted(y, fitted, 1.0, 0.5);
    CHECK(yt.mean() == doctest::Approx(0.0));
  }

  TEST_CASE("summary at beta = 0 and at basis vectors") {
    std::mt19937_64 rng(31);
    const Dataset d = small_shard(rng, 25, 4);
    const Vector zero = Vector::Zero(5);
    const auto s0 = pseudo::shard_summary(d, zero, 1.0, 0.3);
    Vector ref = Vector::Zero(5);
    for (Index i = 0; i < d.rows(); ++i) ref -= d.x.row(i).transpose() * ((d.y[i] <= 0.0 ? 1.0 : 0.0) - 0.3);
    ref /= 25.0;
    CHECK((s0.z_nk - ref).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(s0.count == 25);
    const Matrix gram = d.x.transpose() * d.x / 25.0;
    for (Index j = 0; j < 5; ++j) {
      const auto sj = pseudo::shard_summary(d, Vector::Unit(5, j), 1.0, 0.3);
      CHECK((sj.sigma_beta - gram.col(j)).cwiseAbs().maxCoeff() <= 1e-14);
    }
  }

  TEST_CASE("assembled term: single shard, identical shards, dense oracle") {
    std::mt19937_64 rng(32);
    std::normal_distribution<double> n01;
    const Dataset d = small_shard(rng, 40, 6);
    Vector beta(7);
    for (Index j = 0; j < 7; ++j) beta[j] = n01(rng);
    const auto one = pseudo::shard_summary(d, beta, 0.7, 0.3);
    const std::vector<pseudo::ShardSummary> single{one};
    CHECK((pseudo::assemble_linear_term(single, one.sigma_beta) - one.z_nk).cwiseAbs().maxCoeff() <= 1e-14);

    const std::vector<pseudo::ShardSummary> same{one, one, one};
    CHECK((pseudo::assemble_linear_term(same, one.sigma_beta) - one.z_nk).cwiseAbs().maxCoeff() <= 1e-13);

    const auto parts = split_rows(small_shard(rng, 70, 6), {20, 35, 15});
    std::vector<pseudo::ShardSummary> sums;
    for (const auto& p : parts) sums.push_back(pseudo::shard_summary(p, beta, 0.7, 0.3));
    const Vector b = pseudo::assemble_linear_term(sums, sums[1].sigma_beta);
    CHECK((b - oracle::dense_linear_term(parts, 1, beta, 0.7, 0.3)).cwiseAbs().maxCoeff() <= 1e-10);
  }

  TEST_CASE("assembly is bitwise repeatable") {
    std::mt19937_64 rng(33);
    const auto parts = split_even(small_shard(rng, 90, 5), 30);
    const Vector beta = Vector::Constant(6, 0.25);
    std::vector<pseudo::ShardSummary> sums;
    for (const auto& p : parts) sums.push_back(pseudo::shard_summary(p, beta, 0.4, 0.5));
    const Vector a = pseudo::assemble_linear_term(sums, sums[0].sigma_beta);
    const Vector b = pseudo::assemble_linear_term(sums, sums[0].sigma_beta);
    CHECK(a == b);
  }

  TEST_CASE("summary serialization") {
    std::mt19937_64 rng(34);
    const Dataset d = small_shard(rng, 10, 3);
    auto s = pseudo::shard_summary(d, Vector::Constant(4, 0.1), 0.9, 0.3, 0.42);
    const auto bytes = pseudo::serialize(s);
    CHECK(bytes.size() == pseudo::serialized_size(4));
    // Two (p+1) vectors with their lengths, one f64 and one u64.
    CHECK(pseudo::serialized_size(4) == 8 + 8 * 4 + 8 + 8 * 4 + 8 + 8);
    CHECK(pseudo::serialized_size(1001) - pseudo::serialized_size(501) == 2 * 8 * 500);
    const auto back = pseudo::deserialize_summary(bytes);
    CHECK(back.z_nk == s.z_nk);
    CHECK(back.sigma_beta == s.sigma_beta);
    CHECK(back.density_local == 0.42);
    CHECK(back.count == 10);
    auto cut = bytes;
    cut.pop_back();
    CHECK_THROWS_AS(pseudo::deserialize_summary(cut), Error);
  }
}

TEST_SUITE("wire") {
  TEST_CASE("frame layout") {
    const wire::Bytes payload{0xAA, 0xBB};
    const auto f = wire::encode_frame(wire::Tag::kDensityReq, payload);
    REQUIRE(f.size() == 8);
    CHECK(f[0] == 0x01);
    CHECK(f[1] == 0);
    CHECK(f[2] == 0);
    CHECK(f[3] == 0);
    CHECK(f[4] == 3);
    CHECK(f[5] == 2);
    CHECK(wire::parse_header(std::span(f).first(5)) == 3);
    const auto back = wire::decode_frame(f);
    CHECK(back.tag == wire::Tag::kDensityReq);
    CHECK(back.payload == payload);
  }

  TEST_CASE("payload round trips") {
    Vector beta(3);
    beta << 1.5, -0.0, 3e-300;
    CHECK(wire::parse_beta(wire::beta_payload(beta)) == beta);
    CHECK(wire::parse_density_request(wire::density_request_payload(0.123)) == 0.123);
    const auto [dens, count] = wire::parse_density_response(wire::density_response_payload(0.5, 77));
    CHECK(dens == 0.5);
    CHECK(count == 77);
    const auto [f0, tau] = wire::parse_summary_request(wire::summary_request_payload(0.8, 0.3));
    CHECK(f0 == 0.8);
    CHECK(tau == 0.3);
  }

  TEST_CASE("little-endian scalars") {
    wire::ByteWriter w;
    w.put_u64(0x0102030405060708ULL);
    const auto& b = w.bytes();
    CHECK(b[0] == 0x08);
    CHECK(b[7] == 0x01);
  }

  TEST_CASE("malformed frames are rejected") {
    auto f = wire::encode_frame(wire::Tag::kBetaBcast, wire::beta_payload(Vector::Ones(2)));
    auto bad_version = f;
    bad_version[0] = 0x02;
    CHECK_THROWS_AS(wire::decode_frame(bad_version), Error);
    auto truncated = f;
    truncated.resize(truncated.size() - 1);
    CHECK_THROWS_AS(wire::decode_frame(truncated), Error);
    auto bad_tag = f;
    bad_tag[5] = 9;
    CHECK_THROWS_AS(wire::decode_frame(bad_tag), Error);
    CHECK_THROWS_AS(wire::parse_beta(wire::Bytes{1, 2, 3}), Error);
    const std::uint8_t huge[5] = {0x01, 0xFF, 0xFF, 0xFF, 0xFF};
    CHECK_THROWS_AS(wire::parse_header(huge), Error);
  }
}
