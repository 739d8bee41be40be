#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include "distrel/types.hpp"
#include "distrel/wire.hpp"

namespace distrel::net {

using ShardPtr = std::shared_ptr<const Dataset>;
using Clock = std::chrono::steady_clock;

// Worker-side state machine shared by every transport: caches the broadcast
// coefficients and the fitted values x_i' beta between the two rounds.
class WorkerService {
 public:
  explicit WorkerService(ShardPtr shard);

  // Response frame for requests; nullopt for broadcasts and shutdown.
  std::optional<wire::Bytes> handle(const wire::Frame& frame);

  bool stopped() const noexcept { return stopped_; }
  const Dataset& shard() const noexcept { return *shard_; }

 private:
  ShardPtr shard_;
  Vector beta_;
  Vector fitted_;
  bool has_beta_ = false;
  bool stopped_ = false;
};

struct TrafficCounters {
  std::uint64_t bytes_sent = 0;
  std::uint64_t bytes_received = 0;
  std::uint64_t frames_sent = 0;
  std::uint64_t frames_received = 0;
};

struct Received {
  std::size_t worker = 0;
  wire::Frame frame;
};

class Transport {
 public:
  virtual ~Transport() = default;

  virtual std::size_t worker_count() const = 0;

  // Delivers one encoded frame; throws WorkerUnreachable once retries are spent.
  virtual void send(std::size_t worker, const wire::Bytes& frame) = 0;

  // One frame from each listed worker, in arrival order. Throws
  // WorkerUnreachable naming the first worker still missing at the deadline.
  virtual std::vector<Received> collect(std::span<const std::size_t> workers,
                                        std::chrono::milliseconds timeout) = 0;

  // Best-effort SHUTDOWN to every worker.
  virtual void shutdown() = 0;

  const TrafficCounters& traffic() const noexcept { return traffic_; }

 protected:
  TrafficCounters traffic_;
};

inline constexpr int kSendAttempts = 3;

// Test hooks for the in-process transport.
struct Fault {
  std::chrono::milliseconds delay{0};  // before each response
  bool silent = false;                 // swallow responses
  bool dead = false;                   // refuse delivery
};

// One thread per shard; frames travel through queues with the wire encoding.
class InProcessTransport final : public Transport {
 public:
  explicit InProcessTransport(std::vector<ShardPtr> shards);
  ~InProcessTransport() override;

  InProcessTransport(const InProcessTransport&) = delete;
  InProcessTransport& operator=(const InProcessTransport&) = delete;

  std::size_t worker_count() const override { return workers_.size(); }
  void send(std::size_t worker, const wire::Bytes& frame) override;
  std::vector<Received> collect(std::span<const std::size_t> workers,
                                std::chrono::milliseconds timeout) override;
  void shutdown() override;

  void inject_fault(std::size_t worker, Fault fault);

 private:
  struct Worker {
    explicit Worker(ShardPtr shard) : service(std::move(shard)) {}
    WorkerService service;
    std::deque<wire::Bytes> inbox;
    Fault fault;
    std::thread thread;
  };

  void run_worker(std::size_t index);

  std::mutex mutex_;
  std::condition_variable inbox_cv_;
  std::condition_variable outbox_cv_;
  std::vector<std::unique_ptr<Worker>> workers_;
  std::deque<std::pair<std::size_t, wire::Bytes>> outbox_;
  bool closing_ = false;
};

}  // namespace distrel::net
