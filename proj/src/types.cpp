#include "distrel/types.hpp"

#include <numeric>

namespace distrel {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kNonConvergence: return "NonConvergence";
    case ErrorKind::kDegenerateDesign: return "DegenerateDesign";
    case ErrorKind::kInvalidBandwidth: return "InvalidBandwidth";
    case ErrorKind::kEmptyInput: return "EmptyInput";
    case ErrorKind::kDensityTooSmall: return "DensityTooSmall";
    case ErrorKind::kWorkerUnreachable: return "WorkerUnreachable";
    case ErrorKind::kInvalidSparsity: return "InvalidSparsity";
    case ErrorKind::kCholeskyFailure: return "CholeskyFailure";
    case ErrorKind::kAllRowsDropped: return "AllRowsDropped";
    case ErrorKind::kProtocol: return "Protocol";
    case ErrorKind::kIo: return "Io";
  }
  return "Unknown";
}

void Dataset::validate() const {
  if (x.cols() < 1) throw Error(ErrorKind::kDimensionMismatch, "design has no columns");
  if (x.rows() != y.size()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "design has " + std::to_string(x.rows()) + " rows but " +
                    std::to_string(y.size()) + " responses");
  }
}

Dataset Dataset::slice(Index begin, Index count) const {
  if (begin < 0 || count < 0 || begin + count > rows()) {
    throw Error(ErrorKind::kInvalidArgument, "row slice out of range");
  }
  return Dataset{x.middleRows(begin, count), y.segment(begin, count)};
}

std::vector<Dataset> split_rows(const Dataset& data, const std::vector<Index>& sizes) {
  const Index total = std::accumulate(sizes.begin(), sizes.end(), Index{0});
  if (total != data.rows()) {
    throw Error(ErrorKind::kDimensionMismatch, "shard sizes do not sum to the row count");
  }
  std::vector<Dataset> shards;
  shards.reserve(sizes.size());
  Index begin = 0;
  for (Index size : sizes) {
    if (size < 1) throw Error(ErrorKind::kEmptyInput, "empty shard");
    shards.push_back(data.slice(begin, size));
    begin += size;
  }
  return shards;
}

std::vector<Dataset> split_even(const Dataset& data, Index shard_size) {
  if (shard_size < 1) throw Error(ErrorKind::kInvalidArgument, "shard size must be positive");
  std::vector<Index> sizes;
  Index remaining = data.rows();
  while (remaining > 0) {
    const Index take = remaining >= 2 * shard_size ? shard_size : remaining;
    sizes.push_back(take);
    remaining -= take;
  }
  return split_rows(data, sizes);
}

Dataset concatenate(const std::vector<Dataset>& shards) {
  if (shards.empty()) throw Error(ErrorKind::kEmptyInput, "no shards to concatenate");
  Index rows = 0;
  for (const auto& s : shards) rows += s.rows();
  Dataset out{Matrix(rows, shards.front().cols()), Vector(rows)};
  Index at = 0;
  for (const auto& s : shards) {
    if (s.cols() != out.cols()) throw Error(ErrorKind::kDimensionMismatch, "shard widths differ");
    out.x.middleRows(at, s.rows()) = s.x;
    out.y.segment(at, s.rows()) = s.y;
    at += s.rows();
  }
  return out;
}

std::vector<Index> nonzero_indices(const Vector& beta) {
  std::vector<Index> idx;
  for (Index j = 0; j < beta.size(); ++j) {
    if (beta[j] != 0.0) idx.push_back(j);
  }
  return idx;
}

Vector sparse_product(const Matrix& x, const Vector& beta) {
  const auto idx = nonzero_indices(beta);
  if (4 * static_cast<Index>(idx.size()) >= beta.size()) return x * beta;
  Vector out = Vector::Zero(x.rows());
  for (Index j : idx) out.noalias() += beta[j] * x.col(j);
  return out;
}

}  // namespace distrel
