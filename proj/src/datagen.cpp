#include "distrel/datagen.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>

#include "distrel/wire.hpp"

namespace distrel::data {

namespace {

constexpr char kMagic[8] = {'D', 'R', 'E', 'L', 'S', 'H', 'R', 'D'};
constexpr std::uint64_t kShardVersion = 1;
constexpr std::uint64_t kNoiseStream = 0;
constexpr std::uint64_t kValidationSalt = 0x76616c6964617465ULL;

}  // namespace

const char* to_string(Noise noise) noexcept {
  switch (noise) {
    case Noise::kNormal: return "normal";
    case Noise::kCauchy: return "cauchy";
    case Noise::kExponential: return "exponential";
  }
  return "unknown";
}

Noise parse_noise(const std::string& name) {
  if (name == "normal") return Noise::kNormal;
  if (name == "cauchy") return Noise::kCauchy;
  if (name == "exponential") return Noise::kExponential;
  throw Error(ErrorKind::kInvalidArgument, "unknown noise family '" + name + "'");
}

void SimDesign::validate() const {
  if (n < 1) throw Error(ErrorKind::kInvalidArgument, "n must be >= 1");
  if (p < 0) throw Error(ErrorKind::kInvalidArgument, "p must be >= 0");
  if (s < 1 || s > p + 1) throw Error(ErrorKind::kInvalidSparsity, "need 1 <= s <= p+1");
  if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorKind::kInvalidArgument, "rho must lie in (0,1)");
  if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorKind::kInvalidArgument, "tau must lie in (0,1)");
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

std::uint64_t CounterRng::bits(std::uint64_t i) const noexcept {
  return splitmix64(key_ + i * 0x9e3779b97f4a7c15ULL);
}

double CounterRng::uniform(std::uint64_t i) const noexcept {
  return (static_cast<double>(bits(i) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t i) const noexcept {
  const double u1 = uniform(2 * i);
  const double u2 = uniform(2 * i + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) noexcept {
  return splitmix64(splitmix64(splitmix64(base) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

Coefficients beta_star(Index s, Index p) {
  if (p < 0 || s < 1 || s > p + 1) throw Error(ErrorKind::kInvalidSparsity, "need 1 <= s <= p+1");
  Coefficients b = Coefficients::Zero(p + 1);
  for (Index j = 0; j < s; ++j) {
    b[j] = 10.0 * static_cast<double>(j + 1) / static_cast<double>(s);
  }
  return b;
}

Matrix toeplitz_covariance(Index p, double rho) {
  Matrix sigma(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) sigma(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
  }
  return sigma;
}

Matrix sample_covariates(const SimDesign& design) {
  design.validate();
  const Index n = design.n, p = design.p;
  Matrix x(n, p + 1);
  x.col(0).setOnes();
  if (p == 0) return x;
  Matrix z(n, p);
  for (Index j = 0; j < p; ++j) {
    const CounterRng rng(design.seed, static_cast<std::uint64_t>(j) + 1);
    for (Index i = 0; i < n; ++i) z(i, j) = rng.normal(static_cast<std::uint64_t>(i));
  }
  Eigen::LLT<Matrix> llt(toeplitz_covariance(p, design.rho));
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::kCholeskyFailure, "covariance not positive definite");
  // Rows of z L' have covariance L L' = Sigma.
  x.rightCols(p).noalias() = z * llt.matrixL().transpose();
  return x;
}

double noise_quantile(Noise noise, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorKind::kInvalidArgument, "tau must lie in (0,1)");
  switch (noise) {
    case Noise::kNormal: return boost::math::quantile(boost::math::normal_distribution<double>(), tau);
    case Noise::kCauchy: return std::tan(std::numbers::pi * (tau - 0.5));
    case Noise::kExponential: return -std::log1p(-tau);
  }
  return 0.0;
}

Vector sample_noise(const SimDesign& design) {
  design.validate();
  Vector e(design.n);
  if (design.constant_noise) {
    e.setConstant(*design.constant_noise);
    return e;
  }
  const CounterRng rng(design.seed, kNoiseStream);
  for (Index i = 0; i < design.n; ++i) {
    const auto k = static_cast<std::uint64_t>(i);
    switch (design.noise) {
      case Noise::kNormal: e[i] = rng.normal(k); break;
      case Noise::kCauchy: e[i] = std::tan(std::numbers::pi * (rng.uniform(k) - 0.5)); break;
      case Noise::kExponential: e[i] = -std::log1p(-rng.uniform(k)); break;
    }
  }
  return e;
}

Generated generate(const SimDesign& design) {
  design.validate();
  Generated g;
  g.beta_star = beta_star(design.s, design.p);
  g.data.x = sample_covariates(design);
  g.data.y = g.data.x * g.beta_star + sample_noise(design);
  g.effective_beta = g.beta_star;
  g.effective_beta[0] += noise_quantile(design.noise, design.tau);
  if (g.effective_beta[0] == 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "quantile shift zeroes the intercept");
  }
  return g;
}

Generated generate_validation(const SimDesign& design) {
  SimDesign v = design;
  v.seed = derive_seed(design.seed, kValidationSalt);
  return generate(v);
}

void save_shard(const std::filesystem::path& path, const Dataset& shard, std::uint64_t seed) {
  shard.validate();
  wire::ByteWriter w;
  w.put_u64(kShardVersion);
  w.put_u64(static_cast<std::uint64_t>(shard.rows()));
  w.put_u64(static_cast<std::uint64_t>(shard.dimension()));
  w.put_u64(seed);
  for (Index i = 0; i < shard.rows(); ++i) {
    for (Index j = 0; j < shard.cols(); ++j) w.put_f64(shard.x(i, j));
    w.put_f64(shard.y[i]);
  }
  const wire::Bytes body = w.take();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  out.write(kMagic, sizeof kMagic);
  out.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path.string());
}

Dataset load_shard(const std::filesystem::path& path, std::uint64_t* seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  wire::Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < sizeof kMagic || !std::equal(kMagic, kMagic + 8, bytes.begin())) {
    throw Error(ErrorKind::kIo, path.string() + ": not a shard file");
  }
  try {
    wire::ByteReader r(std::span<const std::uint8_t>(bytes).subspan(sizeof kMagic));
    if (r.get_u64() != kShardVersion) throw Error(ErrorKind::kIo, "unsupported shard version");
    const auto n = static_cast<Index>(r.get_u64());
    const auto p = static_cast<Index>(r.get_u64());
    const std::uint64_t s = r.get_u64();
    if (seed) *seed = s;
    Dataset d;
    d.x.resize(n, p + 1);
    d.y.resize(n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j <= p; ++j) d.x(i, j) = r.get_f64();
      d.y[i] = r.get_f64();
    }
    r.expect_done();
    return d;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kIo) throw;
    throw Error(ErrorKind::kIo, path.string() + ": " + e.what());
  }
}

}  // namespace distrel::data
