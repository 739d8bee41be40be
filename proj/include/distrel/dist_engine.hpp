#pragma once

#include <chrono>
#include <memory>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "distrel/prox_solvers.hpp"
#include "distrel/qr_init.hpp"
#include "distrel/schedules.hpp"
#include "distrel/socket_transport.hpp"
#include "distrel/transport.hpp"

namespace distrel::engine {

enum class TransportKind { kInProcess, kSocket };

// kDamped puts c0 inside the rate the same way the bandwidth does; kLiteral
// uses the undamped rate, which grows with g once s^2 log n / m > 1.
enum class LambdaRule { kDamped, kLiteral };

struct RelOptions {
  double tau = 0.5;
  int iterations = schedule::kDefaultIterations;
  // n, m and p are overwritten from the data; s, c0 and C0 are used as given.
  schedule::ProblemScale scale;
  double bandwidth_scale = 1.0;  // h_g multiplier
  LambdaRule lambda_rule = LambdaRule::kDamped;
  std::optional<double> lambda0;         // default_lambda0 when unset
  std::optional<Coefficients> initial;   // skips the first-shard l1-QR fit
  prox::SolverSettings solver;
  qr::AdmmSettings admm;
  std::chrono::milliseconds timeout{60000};
  bool record_iterates = false;

  void validate() const;
};

struct ClusterConfig {
  // Socket mode with explicit endpoints only needs the first shard's data.
  std::vector<net::ShardPtr> shards;
  std::size_t first_shard_index = 0;
  TransportKind transport = TransportKind::kInProcess;
  // Socket mode: external workers. Empty means one local server per shard.
  std::vector<net::Endpoint> endpoints;
  std::uint64_t seed = 0;  // recorded only; the algorithm itself is deterministic
  RelOptions options;

  void validate() const;
};

struct IterationRecord {
  int g = 0;
  double bandwidth = 0.0;
  double lambda = 0.0;
  double density = 0.0;
  Index nonzeros = 0;
  double kkt = 0.0;
  int solver_iterations = 0;
  bool solver_converged = false;
  double wall_seconds = 0.0;
  std::uint64_t bytes = 0;  // sent plus received during this iteration
  int rounds = 0;           // broadcast+gather rounds
};

struct IterationTrace {
  std::vector<IterationRecord> records;
  std::vector<Coefficients> iterates;  // filled when record_iterates is set
};

enum class RunStatus { kCompleted, kDensityTooSmall };

struct RelResult {
  Coefficients beta;
  Coefficients initial;
  int initial_iterations = 0;
  bool initial_converged = true;
  double lambda0 = 0.0;
  IterationTrace trace;
  RunStatus status = RunStatus::kCompleted;
  std::string error;  // set when status != kCompleted
};

// beta^(0): l1-QR on the first shard with lambda0 (default when unset).
qr::QrResult initial_estimate(const Dataset& first_shard, Index total_rows,
                              const RelOptions& options);

// Sends the frame to every worker; returns the acknowledged shard indices in order.
std::vector<std::size_t> broadcast(net::Transport& transport, const wire::Bytes& frame);

// Sends the request to every worker and returns one response per worker,
// sorted by shard index.
std::vector<wire::Frame> gather(net::Transport& transport, const wire::Bytes& request,
                                std::chrono::milliseconds timeout);

// The iteration loop against an existing transport. Reusable across calls
// because workers keep no state beyond the last broadcast.
RelResult run_rel(net::Transport& transport, const Dataset& first_shard,
                  std::size_t first_shard_index, Index total_rows, const RelOptions& options);

// Workers for every shard on this host, over either transport. Sends
// SHUTDOWN on destruction.
class LocalCluster {
 public:
  LocalCluster(std::vector<net::ShardPtr> shards, TransportKind kind);
  ~LocalCluster();

  LocalCluster(const LocalCluster&) = delete;
  LocalCluster& operator=(const LocalCluster&) = delete;

  net::Transport& transport() noexcept { return *transport_; }

 private:
  std::vector<std::unique_ptr<net::SocketWorkerServer>> servers_;
  std::unique_ptr<net::Transport> transport_;
};

// Builds the transport from the config and runs the loop.
RelResult run_distributed_rel(const ClusterConfig& cfg);

}  // namespace distrel::engine
