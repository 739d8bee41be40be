#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace distrel {

enum class ErrorKind {
  kInvalidArgument,
  kDimensionMismatch,
  kNonConvergence,
  kDegenerateDesign,
  kInvalidBandwidth,
  kEmptyInput,
  kDensityTooSmall,
  kWorkerUnreachable,
  kInvalidSparsity,
  kCholeskyFailure,
  kAllRowsDropped,
  kProtocol,
  kIo,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Carries the index of the shard whose worker failed.
class WorkerUnreachable : public Error {
 public:
  WorkerUnreachable(std::size_t shard, const std::string& what)
      : Error(ErrorKind::kWorkerUnreachable,
              "shard " + std::to_string(shard) + ": " + what),
        shard_(shard) {}

  std::size_t shard() const noexcept { return shard_; }

 private:
  std::size_t shard_;
};

}  // namespace distrel
