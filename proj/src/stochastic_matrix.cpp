#include "mlmc/stochastic_matrix.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "mlmc/error.hpp"
#include "mlmc/parallel.hpp"
#include "mlmc/simd/kernels.hpp"

namespace mlmc {

namespace {

double ordered_sum(const std::vector<StochasticMatrix::Entry>& row) {
  double s = 0.0;
  for (const auto& e : row) s += e.value;
  return s;
}

void require_partition(const StochasticMatrix& a, const StochasticMatrix& b) {
  if (!(a.partition() == b.partition())) fail(ErrorCode::partition_mismatch, "matrices live on different partitions");
}

}  // namespace

StochasticMatrix::StochasticMatrix(const Partition& partition, std::vector<std::vector<Entry>> rows, double tol)
    : partition_(partition) {
  const std::size_t n = partition.size();
  if (rows.size() != n)
    fail(ErrorCode::partition_mismatch, fmt::format("matrix has {} rows, partition has {} states", rows.size(), n));
  row_ptr_.assign(n + 1, 0);
  std::vector<std::size_t> col_count(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = rows[i];
    std::int32_t prev = -1;
    for (const auto& e : row) {
      if (e.index <= prev || static_cast<std::size_t>(e.index) >= n)
        fail(ErrorCode::invalid_parameter, fmt::format("row {} has unsorted or out-of-range column {}", i, e.index));
      if (!(e.value >= 0.0) || !std::isfinite(e.value))
        fail(ErrorCode::not_normalized, fmt::format("entry ({},{}) = {} is not a probability", i, e.index, e.value));
      prev = e.index;
      ++col_count[static_cast<std::size_t>(e.index)];
    }
    const double s = ordered_sum(row);
    if (std::abs(s - 1.0) > tol)
      fail(ErrorCode::not_normalized, fmt::format("row {} sums to {:.17g}", i, s));
    row_ptr_[i + 1] = row_ptr_[i] + row.size();
    sparsity_ = std::max(sparsity_, row.size());
  }
  cols_.reserve(row_ptr_[n]);
  values_.reserve(row_ptr_[n]);
  for (auto& row : rows)
    for (const auto& e : row) {
      cols_.push_back(e.index);
      values_.push_back(e.value);
    }

  col_ptr_.assign(n + 1, 0);
  for (std::size_t j = 0; j < n; ++j) col_ptr_[j + 1] = col_ptr_[j] + col_count[j];
  rows_.resize(cols_.size());
  col_values_.resize(cols_.size());
  std::vector<std::size_t> fill(col_ptr_.begin(), col_ptr_.end() - 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const auto j = static_cast<std::size_t>(cols_[k]);
      rows_[fill[j]] = static_cast<std::int32_t>(i);
      col_values_[fill[j]] = values_[k];
      ++fill[j];
    }
}

StochasticMatrix StochasticMatrix::from_rows(const Partition& partition, std::vector<std::vector<Entry>> rows,
                                             double tol) {
  return StochasticMatrix(partition, std::move(rows), tol);
}

StochasticMatrix StochasticMatrix::from_dense(const Partition& partition, std::span<const double> dense, double tol) {
  const std::size_t n = partition.size();
  if (dense.size() != n * n)
    fail(ErrorCode::partition_mismatch, fmt::format("dense matrix has {} entries, expected {}", dense.size(), n * n));
  std::vector<std::vector<Entry>> rows(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (const double v = dense[i * n + j]; v != 0.0) rows[i].push_back({static_cast<std::int32_t>(j), v});
  return StochasticMatrix(partition, std::move(rows), tol);
}

StochasticMatrix StochasticMatrix::from_rows_renormalized(const Partition& partition,
                                                          std::vector<std::vector<Entry>> rows, double* max_delta) {
  double delta = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double s = ordered_sum(rows[i]);
    if (!(s > 0.0)) fail(ErrorCode::not_normalized, fmt::format("row {} has no mass", i));
    delta = std::max(delta, std::abs(s - 1.0));
    if (s != 1.0)
      for (auto& e : rows[i]) e.value /= s;
  }
  if (max_delta != nullptr) *max_delta = delta;
  return StochasticMatrix(partition, std::move(rows), default_row_tolerance);
}

std::span<const std::int32_t> StochasticMatrix::row_indices(std::size_t i) const {
  return {cols_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
}

std::span<const double> StochasticMatrix::row_values(std::size_t i) const {
  return {values_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
}

std::span<const std::int32_t> StochasticMatrix::col_indices(std::size_t j) const {
  return {rows_.data() + col_ptr_[j], col_ptr_[j + 1] - col_ptr_[j]};
}

std::span<const double> StochasticMatrix::col_values(std::size_t j) const {
  return {col_values_.data() + col_ptr_[j], col_ptr_[j + 1] - col_ptr_[j]};
}

double StochasticMatrix::at(std::size_t i, std::size_t j) const {
  const auto idx = row_indices(i);
  const auto it = std::lower_bound(idx.begin(), idx.end(), static_cast<std::int32_t>(j));
  if (it == idx.end() || *it != static_cast<std::int32_t>(j)) return 0.0;
  return values_[row_ptr_[i] + static_cast<std::size_t>(it - idx.begin())];
}

void StochasticMatrix::dense_row(std::size_t i, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  const auto idx = row_indices(i);
  const auto val = row_values(i);
  for (std::size_t k = 0; k < idx.size(); ++k) out[static_cast<std::size_t>(idx[k])] = val[k];
}

std::vector<double> StochasticMatrix::dense() const {
  const std::size_t n = size();
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) dense_row(i, std::span<double>(out.data() + i * n, n));
  return out;
}

std::vector<double> StochasticMatrix::left_multiply(std::span<const double> v) const {
  const std::size_t n = size();
  if (v.size() != n) fail(ErrorCode::partition_mismatch, "vector length does not match the matrix");
  std::vector<double> y(n);
  parallel_for(n, [&](std::size_t j) { y[j] = simd::gather_dot(col_values(j), col_indices(j), v); });
  return y;
}

std::vector<double> StochasticMatrix::right_multiply(std::span<const double> x) const {
  const std::size_t n = size();
  if (x.size() != n) fail(ErrorCode::partition_mismatch, "vector length does not match the matrix");
  std::vector<double> y(n);
  parallel_for(n, [&](std::size_t i) { y[i] = simd::gather_dot(row_values(i), row_indices(i), x); });
  return y;
}

double StochasticMatrix::max_row_sum_error() const {
  double e = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    double s = 0.0;
    for (double v : row_values(i)) s += v;
    e = std::max(e, std::abs(s - 1.0));
  }
  return e;
}

double max_row_l1_distance(const StochasticMatrix& a, const StochasticMatrix& b) {
  require_partition(a, b);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto ia = a.row_indices(i), ib = b.row_indices(i);
    const auto va = a.row_values(i), vb = b.row_values(i);
    std::size_t p = 0, q = 0;
    double s = 0.0;
    while (p < ia.size() || q < ib.size()) {
      if (q == ib.size() || (p < ia.size() && ia[p] < ib[q])) {
        s += std::abs(va[p++]);
      } else if (p == ia.size() || ib[q] < ia[p]) {
        s += std::abs(vb[q++]);
      } else {
        s += std::abs(va[p++] - vb[q++]);
      }
    }
    worst = std::max(worst, s);
  }
  return worst;
}

double max_abs_difference(const StochasticMatrix& a, const StochasticMatrix& b) {
  require_partition(a, b);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto ia = a.row_indices(i), ib = b.row_indices(i);
    const auto va = a.row_values(i), vb = b.row_values(i);
    std::size_t p = 0, q = 0;
    while (p < ia.size() || q < ib.size()) {
      double d;
      if (q == ib.size() || (p < ia.size() && ia[p] < ib[q])) {
        d = va[p++];
      } else if (p == ia.size() || ib[q] < ia[p]) {
        d = vb[q++];
      } else {
        d = va[p++] - vb[q++];
      }
      worst = std::max(worst, std::abs(d));
    }
  }
  return worst;
}

}  // namespace mlmc
