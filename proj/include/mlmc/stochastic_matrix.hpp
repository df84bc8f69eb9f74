#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mlmc/partition.hpp"

namespace mlmc {

/// Row-stochastic matrix over the states of a partition.
///
/// Stored twice: CSR for row access and a CSC mirror so that the left action
/// v^T P (the density update) is a gather-dot per column. Column indices
/// within a row, and row indices within a column, are ascending.
class StochasticMatrix {
 public:
  struct Entry {
    std::int32_t index;
    double value;
  };

  static constexpr double default_row_tolerance = 1e-10;

  /// Rows must be sorted by column. Throws not-normalized if a row sum is off
  /// by more than tol or an entry is negative.
  static StochasticMatrix from_rows(const Partition& partition, std::vector<std::vector<Entry>> rows,
                                    double tol = default_row_tolerance);
  /// Row-major dense input; exact zeros are not stored.
  static StochasticMatrix from_dense(const Partition& partition, std::span<const double> dense,
                                     double tol = default_row_tolerance);
  /// Divides every row by its (ascending-order) sum before validation.
  static StochasticMatrix from_rows_renormalized(const Partition& partition, std::vector<std::vector<Entry>> rows,
                                                 double* max_delta = nullptr);

  const Partition& partition() const noexcept { return partition_; }
  std::size_t size() const noexcept { return partition_.size(); }
  std::size_t nnz() const noexcept { return values_.size(); }
  /// Max nonzeros in any row (s).
  std::size_t sparsity() const noexcept { return sparsity_; }

  std::span<const std::int32_t> row_indices(std::size_t i) const;
  std::span<const double> row_values(std::size_t i) const;
  std::span<const std::int32_t> col_indices(std::size_t j) const;
  std::span<const double> col_values(std::size_t j) const;

  double at(std::size_t i, std::size_t j) const;
  std::vector<double> dense() const;
  void dense_row(std::size_t i, std::span<double> out) const;

  /// v^T P.
  std::vector<double> left_multiply(std::span<const double> v) const;
  /// P x.
  std::vector<double> right_multiply(std::span<const double> x) const;

  double max_row_sum_error() const;

  friend bool operator==(const StochasticMatrix& a, const StochasticMatrix& b) {
    return a.partition_ == b.partition_ && a.row_ptr_ == b.row_ptr_ && a.cols_ == b.cols_ && a.values_ == b.values_;
  }

 private:
  StochasticMatrix(const Partition& partition, std::vector<std::vector<Entry>> rows, double tol);

  Partition partition_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::int32_t> cols_;
  std::vector<double> values_;
  std::vector<std::size_t> col_ptr_;
  std::vector<std::int32_t> rows_;
  std::vector<double> col_values_;
  std::size_t sparsity_ = 0;
};

/// Induced norm of A - B for the left action: max over rows of sum |A(i,j) - B(i,j)|.
double max_row_l1_distance(const StochasticMatrix& a, const StochasticMatrix& b);

/// Largest |A(i,j) - B(i,j)|.
double max_abs_difference(const StochasticMatrix& a, const StochasticMatrix& b);

}  // namespace mlmc
