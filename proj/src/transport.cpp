#include "distrel/transport.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>

#include "distrel/kernel_density.hpp"
#include "distrel/pseudo_response.hpp"

namespace distrel::net {

WorkerService::WorkerService(ShardPtr shard) : shard_(std::move(shard)) {
  if (!shard_ || shard_->rows() < 1) throw Error(ErrorKind::kEmptyInput, "worker without data");
  shard_->validate();
}

std::optional<wire::Bytes> WorkerService::handle(const wire::Frame& frame) {
  switch (frame.tag) {
    case wire::Tag::kBetaBcast: {
      Vector beta = wire::parse_beta(frame.payload);
      if (beta.size() != shard_->cols()) {
        throw Error(ErrorKind::kDimensionMismatch, "broadcast coefficients do not match shard");
      }
      fitted_ = sparse_product(shard_->x, beta);
      beta_ = std::move(beta);
      has_beta_ = true;
      return std::nullopt;
    }
    case wire::Tag::kDensityReq: {
      if (!has_beta_) throw Error(ErrorKind::kProtocol, "density request before broadcast");
      const double h = wire::parse_density_request(frame.payload);
      const Vector resid = shard_->y - fitted_;
      const double value = kde::density_at_zero(
          std::span<const double>(resid.data(), static_cast<std::size_t>(resid.size())), h);
      return wire::encode_frame(
          wire::Tag::kDensityResp,
          wire::density_response_payload(value, static_cast<std::uint64_t>(shard_->rows())));
    }
    case wire::Tag::kSummaryReq: {
      if (!has_beta_) throw Error(ErrorKind::kProtocol, "summary request before broadcast");
      const auto [f0, tau] = wire::parse_summary_request(frame.payload);
      const auto summary = pseudo::shard_summary_from_fitted(*shard_, fitted_, f0, tau);
      return wire::encode_frame(wire::Tag::kSummaryResp, pseudo::serialize(summary));
    }
    case wire::Tag::kShutdown:
      stopped_ = true;
      return std::nullopt;
    case wire::Tag::kDensityResp:
    case wire::Tag::kSummaryResp:
      break;
  }
  throw Error(ErrorKind::kProtocol, std::string("worker cannot handle ") + wire::to_string(frame.tag));
}

InProcessTransport::InProcessTransport(std::vector<ShardPtr> shards) {
  if (shards.empty()) throw Error(ErrorKind::kEmptyInput, "no shards");
  workers_.reserve(shards.size());
  for (auto& s : shards) workers_.push_back(std::make_unique<Worker>(std::move(s)));
  for (std::size_t k = 0; k < workers_.size(); ++k) {
    workers_[k]->thread = std::thread([this, k] { run_worker(k); });
  }
}

InProcessTransport::~InProcessTransport() {
  {
    std::lock_guard lock(mutex_);
    closing_ = true;
  }
  inbox_cv_.notify_all();
  for (auto& w : workers_) {
    if (w->thread.joinable()) w->thread.join();
  }
}

void InProcessTransport::inject_fault(std::size_t worker, Fault fault) {
  std::lock_guard lock(mutex_);
  workers_.at(worker)->fault = fault;
}

void InProcessTransport::run_worker(std::size_t index) {
  Worker& self = *workers_[index];
  for (;;) {
    wire::Bytes bytes;
    {
      std::unique_lock lock(mutex_);
      inbox_cv_.wait(lock, [&] { return closing_ || !self.inbox.empty(); });
      if (self.inbox.empty()) return;
      bytes = std::move(self.inbox.front());
      self.inbox.pop_front();
    }
    std::optional<wire::Bytes> response;
    try {
      response = self.service.handle(wire::decode_frame(bytes));
    } catch (const std::exception& e) {
      spdlog::error("in-process worker {}: {}", index, e.what());
    }
    if (self.service.stopped()) return;
    if (!response) continue;
    Fault fault;
    {
      std::lock_guard lock(mutex_);
      fault = self.fault;
    }
    if (fault.delay.count() > 0) std::this_thread::sleep_for(fault.delay);
    if (fault.silent) continue;
    {
      std::lock_guard lock(mutex_);
      outbox_.emplace_back(index, std::move(*response));
    }
    outbox_cv_.notify_all();
  }
}

void InProcessTransport::send(std::size_t worker, const wire::Bytes& frame) {
  if (worker >= workers_.size()) throw Error(ErrorKind::kInvalidArgument, "no such worker");
  {
    std::lock_guard lock(mutex_);
    Worker& w = *workers_[worker];
    if (w.fault.dead || w.service.stopped()) {
      throw WorkerUnreachable(worker, "delivery refused after " + std::to_string(kSendAttempts) +
                                          " attempts");
    }
    w.inbox.push_back(frame);
    traffic_.bytes_sent += frame.size();
    ++traffic_.frames_sent;
  }
  inbox_cv_.notify_all();
}

std::vector<Received> InProcessTransport::collect(std::span<const std::size_t> workers,
                                                  std::chrono::milliseconds timeout) {
  std::vector<char> pending(workers_.size(), 0);
  std::size_t remaining = 0;
  for (std::size_t w : workers) {
    if (w >= workers_.size()) throw Error(ErrorKind::kInvalidArgument, "no such worker");
    if (!pending[w]) ++remaining;
    pending[w] = 1;
  }
  std::vector<Received> out;
  out.reserve(remaining);
  const auto deadline = Clock::now() + timeout;
  std::unique_lock lock(mutex_);
  while (remaining > 0) {
    auto it = std::find_if(outbox_.begin(), outbox_.end(),
                           [&](const auto& item) { return pending[item.first] != 0; });
    if (it != outbox_.end()) {
      traffic_.bytes_received += it->second.size();
      ++traffic_.frames_received;
      out.push_back(Received{it->first, wire::decode_frame(it->second)});
      pending[it->first] = 0;
      --remaining;
      outbox_.erase(it);
      continue;
    }
    if (outbox_cv_.wait_until(lock, deadline) == std::cv_status::timeout) {
      const auto missing = std::find(pending.begin(), pending.end(), 1);
      const auto idx = static_cast<std::size_t>(missing - pending.begin());
      throw WorkerUnreachable(idx, "no response before timeout");
    }
  }
  return out;
}

void InProcessTransport::shutdown() {
  for (std::size_t k = 0; k < workers_.size(); ++k) {
    try {
      send(k, wire::encode_frame(wire::Tag::kShutdown, wire::Bytes{}));
    } catch (const WorkerUnreachable&) {
    }
  }
}

}  // namespace distrel::net
