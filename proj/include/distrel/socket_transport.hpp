#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "distrel/transport.hpp"

namespace distrel::net {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
};

// Parses "host:port"; a bare port means 127.0.0.1.
Endpoint parse_endpoint(const std::string& text);

// Serves one shard over TCP. Connections are handled one at a time so a
// coordinator may reconnect after a dropped link.
class SocketWorkerServer {
 public:
  SocketWorkerServer(ShardPtr shard, std::uint16_t port = 0, const std::string& bind_host = "127.0.0.1");
  ~SocketWorkerServer();

  SocketWorkerServer(const SocketWorkerServer&) = delete;
  SocketWorkerServer& operator=(const SocketWorkerServer&) = delete;

  std::uint16_t port() const noexcept { return port_; }

  // Blocks until SHUTDOWN arrives or stop() is called.
  void serve();

  // serve() on a background thread.
  void start();

  // Abrupt stop: drops the listener and any live connection.
  void stop();

 private:
  void serve_connection(int fd);

  WorkerService service_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::atomic<int> conn_fd_{-1};
  std::thread thread_;
};

class SocketTransport final : public Transport {
 public:
  explicit SocketTransport(std::vector<Endpoint> endpoints,
                           std::chrono::milliseconds connect_wait = std::chrono::milliseconds(5000));
  ~SocketTransport() override;

  SocketTransport(const SocketTransport&) = delete;
  SocketTransport& operator=(const SocketTransport&) = delete;

  std::size_t worker_count() const override { return endpoints_.size(); }
  void send(std::size_t worker, const wire::Bytes& frame) override;
  std::vector<Received> collect(std::span<const std::size_t> workers,
                                std::chrono::milliseconds timeout) override;
  void shutdown() override;

 private:
  bool connect_worker(std::size_t worker, std::chrono::milliseconds wait);
  void drop(std::size_t worker);

  std::vector<Endpoint> endpoints_;
  std::vector<int> fds_;
};

}  // namespace distrel::net
