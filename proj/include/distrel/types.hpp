#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "distrel/error.hpp"

namespace distrel {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// (p+1)-vector; index 0 is the intercept.
using Coefficients = Eigen::VectorXd;

// Design matrix with the intercept column of ones at index 0, plus responses.
struct Dataset {
  Matrix x;
  Vector y;

  Index rows() const { return x.rows(); }
  Index cols() const { return x.cols(); }
  Index dimension() const { return x.cols() - 1; }

  // Throws DimensionMismatch when x and y disagree or there is no column.
  void validate() const;

  // Contiguous row range [begin, begin + count).
  Dataset slice(Index begin, Index count) const;
};

// Splits rows into consecutive shards of the given sizes (sizes must sum to rows()).
std::vector<Dataset> split_rows(const Dataset& data, const std::vector<Index>& sizes);

// Splits into ceil(rows / shard_size) shards; the last one absorbs the remainder.
std::vector<Dataset> split_even(const Dataset& data, Index shard_size);

// Concatenates shards back into one dataset, in order.
Dataset concatenate(const std::vector<Dataset>& shards);

// Indices j with beta_j != 0.
std::vector<Index> nonzero_indices(const Vector& beta);

// x * beta, skipping zero coordinates of beta.
Vector sparse_product(const Matrix& x, const Vector& beta);

}  // namespace distrel
