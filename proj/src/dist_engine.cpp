#include "distrel/dist_engine.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <memory>
#include <numeric>

#include "distrel/kernel_density.hpp"
#include "distrel/pseudo_response.hpp"

namespace distrel::engine {

namespace {

double seconds_since(net::Clock::time_point t0) {
  return std::chrono::duration<double>(net::Clock::now() - t0).count();
}

std::uint64_t total_bytes(const net::Transport& t) {
  return t.traffic().bytes_sent + t.traffic().bytes_received;
}

}  // namespace

void RelOptions::validate() const {
  if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorKind::kInvalidArgument, "tau must lie in (0,1)");
  if (iterations < 0) throw Error(ErrorKind::kInvalidArgument, "iterations must be >= 0");
  if (!(bandwidth_scale > 0.0)) throw Error(ErrorKind::kInvalidBandwidth, "bandwidth scale must be > 0");
  if (lambda0 && !(*lambda0 >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "lambda0 must be >= 0");
  if (timeout.count() <= 0) throw Error(ErrorKind::kInvalidArgument, "timeout must be positive");
  solver.validate();
}

void ClusterConfig::validate() const {
  if (shards.empty()) throw Error(ErrorKind::kEmptyInput, "no shards");
  if (first_shard_index >= shards.size()) {
    throw Error(ErrorKind::kInvalidArgument, "first_shard_index out of range");
  }
  if (!shards[first_shard_index]) throw Error(ErrorKind::kEmptyInput, "first shard has no data");
  const bool external = transport == TransportKind::kSocket && !endpoints.empty();
  if (external && endpoints.size() != shards.size()) {
    throw Error(ErrorKind::kInvalidArgument, "one endpoint per shard required");
  }
  if (!external) {
    for (const auto& s : shards) {
      if (!s) throw Error(ErrorKind::kEmptyInput, "shard without data");
    }
  }
  options.validate();
}

qr::QrResult initial_estimate(const Dataset& first_shard, Index total_rows,
                              const RelOptions& options) {
  const double lambda0 =
      options.lambda0.value_or(qr::default_lambda0(first_shard.dimension(), total_rows, first_shard.rows()));
  return qr::solve_l1_qr(qr::QrProblem{first_shard, options.tau, lambda0}, options.admm);
}

std::vector<std::size_t> broadcast(net::Transport& transport, const wire::Bytes& frame) {
  std::vector<std::size_t> acks;
  acks.reserve(transport.worker_count());
  for (std::size_t k = 0; k < transport.worker_count(); ++k) {
    transport.send(k, frame);
    acks.push_back(k);
  }
  return acks;
}

std::vector<wire::Frame> gather(net::Transport& transport, const wire::Bytes& request,
                                std::chrono::milliseconds timeout) {
  const std::vector<std::size_t> workers = broadcast(transport, request);
  auto received = transport.collect(workers, timeout);
  std::sort(received.begin(), received.end(),
            [](const net::Received& a, const net::Received& b) { return a.worker < b.worker; });
  if (received.size() != workers.size()) throw Error(ErrorKind::kProtocol, "missing responses");
  std::vector<wire::Frame> out;
  out.reserve(received.size());
  for (auto& r : received) out.push_back(std::move(r.frame));
  return out;
}

RelResult run_rel(net::Transport& transport, const Dataset& first_shard,
                  std::size_t first_shard_index, Index total_rows, const RelOptions& options) {
  options.validate();
  first_shard.validate();
  if (first_shard_index >= transport.worker_count()) {
    throw Error(ErrorKind::kInvalidArgument, "first_shard_index out of range");
  }
  const Index d = first_shard.cols();

  schedule::ProblemScale scale = options.scale;
  scale.n = static_cast<double>(total_rows);
  scale.m = static_cast<double>(first_shard.rows());
  scale.p = static_cast<double>(first_shard.dimension());
  scale.validate();

  RelResult result;
  result.lambda0 =
      options.lambda0.value_or(qr::default_lambda0(first_shard.dimension(), total_rows, first_shard.rows()));
  if (options.initial) {
    if (options.initial->size() != d) throw Error(ErrorKind::kDimensionMismatch, "initial estimate");
    result.initial = *options.initial;
  } else {
    const qr::QrResult init = initial_estimate(first_shard, total_rows, options);
    result.initial = init.beta;
    result.initial_iterations = init.iterations;
    result.initial_converged = init.converged;
  }
  result.beta = result.initial;
  if (options.iterations == 0) return result;

  // Sigma_1 and its Lipschitz constant are fixed across iterations.
  prox::QuadraticProblem qp{prox::GramOperator::from_design(first_shard.x), Vector::Zero(d), 0.0,
                            std::nullopt};
  qp.lipschitz = prox::largest_eigenvalue(qp.gram, 1e-10);

  std::vector<kde::LocalDensity> locals(transport.worker_count());
  std::vector<pseudo::ShardSummary> summaries(transport.worker_count());

  for (int g = 1; g <= options.iterations; ++g) {
    const auto t0 = net::Clock::now();
    const std::uint64_t bytes0 = total_bytes(transport);
    IterationRecord rec;
    rec.g = g;
    rec.bandwidth = options.bandwidth_scale * schedule::bandwidth_h(scale, g);
    rec.lambda = options.lambda_rule == LambdaRule::kDamped ? schedule::lambda_reg_damped(scale, g)
                                                            : schedule::lambda_reg(scale, g);

    broadcast(transport, wire::encode_frame(wire::Tag::kBetaBcast, wire::beta_payload(result.beta)));

    const auto dens = gather(
        transport,
        wire::encode_frame(wire::Tag::kDensityReq, wire::density_request_payload(rec.bandwidth)),
        options.timeout);
    std::uint64_t seen = 0;
    for (std::size_t k = 0; k < dens.size(); ++k) {
      if (dens[k].tag != wire::Tag::kDensityResp) throw Error(ErrorKind::kProtocol, "expected DENSITY_RESP");
      const auto [value, count] = wire::parse_density_response(dens[k].payload);
      locals[k] = kde::LocalDensity{value, count};
      seen += count;
    }
    if (seen != static_cast<std::uint64_t>(total_rows)) {
      throw Error(ErrorKind::kInvalidArgument, "workers hold " + std::to_string(seen) +
                                                   " rows, expected " + std::to_string(total_rows));
    }
    rec.density = kde::aggregate_density(locals);
    if (!(rec.density >= pseudo::kDensityFloor)) {
      result.status = RunStatus::kDensityTooSmall;
      result.error = "iteration " + std::to_string(g) + ": density estimate " +
                     std::to_string(rec.density) + " below floor";
      rec.rounds = 1;
      rec.bytes = total_bytes(transport) - bytes0;
      rec.wall_seconds = seconds_since(t0);
      result.trace.records.push_back(rec);
      spdlog::warn("{}", result.error);
      return result;
    }

    const auto sums = gather(
        transport,
        wire::encode_frame(wire::Tag::kSummaryReq, wire::summary_request_payload(rec.density, options.tau)),
        options.timeout);
    for (std::size_t k = 0; k < sums.size(); ++k) {
      if (sums[k].tag != wire::Tag::kSummaryResp) throw Error(ErrorKind::kProtocol, "expected SUMMARY_RESP");
      summaries[k] = pseudo::deserialize_summary(sums[k].payload);
      if (summaries[k].z_nk.size() != d) throw Error(ErrorKind::kDimensionMismatch, "shard summary");
      summaries[k].density_local = locals[k].value;
    }
    qp.linear = pseudo::assemble_linear_term(summaries, summaries[first_shard_index].sigma_beta);
    qp.reg = rec.lambda;

    const prox::SolveResult sol = prox::solve_l1_quadratic(qp, result.beta, options.solver);
    if (!sol.converged) {
      spdlog::debug("iteration {}: quadratic solver stopped at kkt {}", g, sol.kkt);
    }
    result.beta = sol.beta;

    rec.nonzeros = static_cast<Index>(nonzero_indices(result.beta).size());
    rec.kkt = sol.kkt;
    rec.solver_iterations = sol.iterations;
    rec.solver_converged = sol.converged;
    rec.rounds = 2;
    rec.bytes = total_bytes(transport) - bytes0;
    rec.wall_seconds = seconds_since(t0);
    result.trace.records.push_back(rec);
    if (options.record_iterates) result.trace.iterates.push_back(result.beta);
  }
  return result;
}

LocalCluster::LocalCluster(std::vector<net::ShardPtr> shards, TransportKind kind) {
  if (kind == TransportKind::kInProcess) {
    transport_ = std::make_unique<net::InProcessTransport>(std::move(shards));
    return;
  }
  std::vector<net::Endpoint> endpoints;
  for (auto& s : shards) {
    servers_.push_back(std::make_unique<net::SocketWorkerServer>(std::move(s)));
    servers_.back()->start();
    endpoints.push_back(net::Endpoint{"127.0.0.1", servers_.back()->port()});
  }
  transport_ = std::make_unique<net::SocketTransport>(std::move(endpoints));
}

LocalCluster::~LocalCluster() {
  try {
    transport_->shutdown();
  } catch (const std::exception& e) {
    spdlog::warn("cluster shutdown: {}", e.what());
  }
  transport_.reset();
}

RelResult run_distributed_rel(const ClusterConfig& cfg) {
  cfg.validate();
  const Dataset& first = *cfg.shards[cfg.first_shard_index];
  const bool external = cfg.transport == TransportKind::kSocket && !cfg.endpoints.empty();
  if (external) {
    net::SocketTransport transport(cfg.endpoints);
    RelResult r = run_rel(transport, first, cfg.first_shard_index,
                          static_cast<Index>(cfg.options.scale.n), cfg.options);
    transport.shutdown();
    return r;
  }
  Index total = 0;
  for (const auto& s : cfg.shards) total += s->rows();
  LocalCluster cluster(cfg.shards, cfg.transport);
  return run_rel(cluster.transport(), first, cfg.first_shard_index, total, cfg.options);
}

}  // namespace distrel::engine
