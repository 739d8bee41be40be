#include "distrel/socket_transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cerrno>
#include <cstring>

namespace distrel::net {

namespace {

constexpr int kPollSliceMs = 100;

Error io_error(const std::string& what) {
  return Error(ErrorKind::kIo, what + ": " + std::strerror(errno));
}

void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

bool write_all(int fd, const std::uint8_t* data, std::size_t n) {
  while (n > 0) {
    const ssize_t k = ::send(fd, data, n, MSG_NOSIGNAL);
    if (k < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data += k;
    n -= static_cast<std::size_t>(k);
  }
  return true;
}

enum class ReadStatus { kOk, kClosed, kTimeout, kStopped };

// Reads exactly n bytes, waking periodically to honour the deadline or stop flag.
ReadStatus read_exact(int fd, std::uint8_t* data, std::size_t n, Clock::time_point deadline,
                      const std::atomic<bool>* stop) {
  while (n > 0) {
    if (stop && stop->load()) return ReadStatus::kStopped;
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (left.count() <= 0) return ReadStatus::kTimeout;
    pollfd p{fd, POLLIN, 0};
    const int r = ::poll(&p, 1, static_cast<int>(std::min<long long>(left.count(), kPollSliceMs)));
    if (r < 0 && errno != EINTR) return ReadStatus::kClosed;
    if (r <= 0) continue;
    const ssize_t k = ::recv(fd, data, n, 0);
    if (k == 0) return ReadStatus::kClosed;
    if (k < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      return ReadStatus::kClosed;
    }
    data += k;
    n -= static_cast<std::size_t>(k);
  }
  return ReadStatus::kOk;
}

ReadStatus read_frame(int fd, wire::Bytes& out, Clock::time_point deadline,
                      const std::atomic<bool>* stop) {
  out.resize(wire::kHeaderSize);
  ReadStatus st = read_exact(fd, out.data(), wire::kHeaderSize, deadline, stop);
  if (st != ReadStatus::kOk) return st;
  const std::uint32_t len = wire::parse_header(out);
  out.resize(wire::kHeaderSize + len);
  return read_exact(fd, out.data() + wire::kHeaderSize, len, deadline, stop);
}

int open_connection(const Endpoint& ep) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(ep.port);
  if (::getaddrinfo(ep.host.c_str(), port.c_str(), &hints, &res) != 0) return -1;
  int fd = -1;
  for (addrinfo* a = res; a; a = a->ai_next) {
    fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd >= 0) set_nodelay(fd);
  return fd;
}

}  // namespace

Endpoint parse_endpoint(const std::string& text) {
  Endpoint ep;
  std::string port = text;
  const auto colon = text.rfind(':');
  if (colon != std::string::npos) {
    ep.host = text.substr(0, colon);
    port = text.substr(colon + 1);
  }
  try {
    const unsigned long v = std::stoul(port);
    if (v == 0 || v > 65535) throw std::out_of_range("port");
    ep.port = static_cast<std::uint16_t>(v);
  } catch (const std::exception&) {
    throw Error(ErrorKind::kInvalidArgument, "bad endpoint '" + text + "'");
  }
  return ep;
}

SocketWorkerServer::SocketWorkerServer(ShardPtr shard, std::uint16_t port,
                                       const std::string& bind_host)
    : service_(std::move(shard)) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw io_error("socket");
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, bind_host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw Error(ErrorKind::kInvalidArgument, "bind address must be IPv4: " + bind_host);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(listen_fd_, 4) != 0) {
    const Error e = io_error("bind/listen");
    ::close(listen_fd_);
    throw e;
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

SocketWorkerServer::~SocketWorkerServer() {
  stop();
  if (thread_.joinable()) thread_.join();
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void SocketWorkerServer::start() {
  thread_ = std::thread([this] {
    try {
      serve();
    } catch (const std::exception& e) {
      spdlog::error("worker on port {}: {}", port_, e.what());
    }
  });
}

void SocketWorkerServer::stop() {
  stopping_ = true;
  const int c = conn_fd_.load();
  if (c >= 0) ::shutdown(c, SHUT_RDWR);
  if (listen_fd_ >= 0) ::shutdown(listen_fd_, SHUT_RDWR);
}

void SocketWorkerServer::serve() {
  while (!stopping_ && !service_.stopped()) {
    pollfd p{listen_fd_, POLLIN, 0};
    const int r = ::poll(&p, 1, kPollSliceMs);
    if (r <= 0 || stopping_) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    set_nodelay(fd);
    conn_fd_ = fd;
    serve_connection(fd);
    conn_fd_ = -1;
    ::close(fd);
  }
}

void SocketWorkerServer::serve_connection(int fd) {
  wire::Bytes buf;
  const auto forever = Clock::time_point::max();
  while (!stopping_) {
    if (read_frame(fd, buf, forever, &stopping_) != ReadStatus::kOk) return;
    std::optional<wire::Bytes> response;
    try {
      response = service_.handle(wire::decode_frame(buf));
    } catch (const std::exception& e) {
      // A malformed exchange poisons the stream; drop the link.
      spdlog::error("worker on port {}: {}", port_, e.what());
      return;
    }
    if (service_.stopped()) return;
    if (response && !write_all(fd, response->data(), response->size())) return;
  }
}

SocketTransport::SocketTransport(std::vector<Endpoint> endpoints,
                                 std::chrono::milliseconds connect_wait)
    : endpoints_(std::move(endpoints)), fds_(endpoints_.size(), -1) {
  if (endpoints_.empty()) throw Error(ErrorKind::kEmptyInput, "no worker endpoints");
  for (std::size_t k = 0; k < endpoints_.size(); ++k) {
    if (!connect_worker(k, connect_wait)) {
      throw WorkerUnreachable(k, "cannot connect to " + endpoints_[k].host + ":" +
                                     std::to_string(endpoints_[k].port));
    }
  }
}

SocketTransport::~SocketTransport() {
  for (std::size_t k = 0; k < fds_.size(); ++k) drop(k);
}

bool SocketTransport::connect_worker(std::size_t worker, std::chrono::milliseconds wait) {
  const auto deadline = Clock::now() + wait;
  for (;;) {
    fds_[worker] = open_connection(endpoints_[worker]);
    if (fds_[worker] >= 0) return true;
    if (Clock::now() >= deadline) return false;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

void SocketTransport::drop(std::size_t worker) {
  if (fds_[worker] >= 0) ::close(fds_[worker]);
  fds_[worker] = -1;
}

void SocketTransport::send(std::size_t worker, const wire::Bytes& frame) {
  if (worker >= fds_.size()) throw Error(ErrorKind::kInvalidArgument, "no such worker");
  for (int attempt = 0; attempt < kSendAttempts; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(50 * attempt));
    if (fds_[worker] < 0 && !connect_worker(worker, std::chrono::milliseconds(0))) continue;
    if (write_all(fds_[worker], frame.data(), frame.size())) {
      traffic_.bytes_sent += frame.size();
      ++traffic_.frames_sent;
      return;
    }
    drop(worker);
  }
  throw WorkerUnreachable(worker, "send failed after " + std::to_string(kSendAttempts) + " attempts");
}

std::vector<Received> SocketTransport::collect(std::span<const std::size_t> workers,
                                               std::chrono::milliseconds timeout) {
  std::vector<std::size_t> pending;
  for (std::size_t w : workers) {
    if (w >= fds_.size()) throw Error(ErrorKind::kInvalidArgument, "no such worker");
    if (std::find(pending.begin(), pending.end(), w) == pending.end()) pending.push_back(w);
  }
  std::vector<Received> out;
  out.reserve(pending.size());
  const auto deadline = Clock::now() + timeout;
  wire::Bytes buf;
  while (!pending.empty()) {
    std::vector<pollfd> pfds;
    for (std::size_t w : pending) {
      if (fds_[w] < 0) throw WorkerUnreachable(w, "connection lost");
      pfds.push_back(pollfd{fds_[w], POLLIN, 0});
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (left.count() <= 0) throw WorkerUnreachable(pending.front(), "no response before timeout");
    const int r = ::poll(pfds.data(), pfds.size(), static_cast<int>(left.count()));
    if (r < 0 && errno != EINTR) throw io_error("poll");
    if (r <= 0) continue;
    std::vector<std::size_t> still;
    for (std::size_t i = 0; i < pfds.size(); ++i) {
      const std::size_t w = pending[i];
      if (!(pfds[i].revents & (POLLIN | POLLHUP | POLLERR))) {
        still.push_back(w);
        continue;
      }
      const ReadStatus st = read_frame(fds_[w], buf, deadline, nullptr);
      if (st != ReadStatus::kOk) {
        drop(w);
        throw WorkerUnreachable(w, st == ReadStatus::kTimeout ? "response timed out"
                                                              : "connection closed by worker");
      }
      traffic_.bytes_received += buf.size();
      ++traffic_.frames_received;
      out.push_back(Received{w, wire::decode_frame(buf)});
    }
    pending = std::move(still);
  }
  return out;
}

void SocketTransport::shutdown() {
  const wire::Bytes frame = wire::encode_frame(wire::Tag::kShutdown, wire::Bytes{});
  for (std::size_t k = 0; k < fds_.size(); ++k) {
    if (fds_[k] >= 0) write_all(fds_[k], frame.data(), frame.size());
    drop(k);
  }
}

}  // namespace distrel::net
