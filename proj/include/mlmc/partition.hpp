#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mlmc {

/// Bin side length h = 1/N, N a positive integer. Stored exactly.
class Resolution {
 public:
  static Resolution from_inverse(std::int64_t n);
  /// h = num/den; requires den to be a positive multiple of num.
  static Resolution from_rational(std::int64_t num, std::int64_t den);
  /// Accepts "1/16", "0.0625" or "1".
  static Resolution parse(std::string_view text);

  std::int64_t inverse() const noexcept { return inverse_; }
  double value() const noexcept { return 1.0 / static_cast<double>(inverse_); }
  bool can_coarsen() const noexcept { return inverse_ % 2 == 0; }
  Resolution coarser() const;
  Resolution finer() const;
  std::string str() const;

  friend auto operator<=>(const Resolution& a, const Resolution& b) {
    // larger h means smaller inverse
    return b.inverse_ <=> a.inverse_;
  }
  friend bool operator==(const Resolution&, const Resolution&) = default;

 private:
  explicit Resolution(std::int64_t inverse) : inverse_(inverse) {}
  std::int64_t inverse_;
};

/// d-tuple of bin indices, each in [-N, N).
using MultiIndex = std::vector<int>;

/// Uniform partition of [-1,1)^d into half-open cubes of side h.
///
/// Linear order is row-major with component 0 slowest.
class Partition {
 public:
  static constexpr std::size_t default_state_cap = std::size_t{1} << 20;
  static constexpr std::string_view index_order = "row-major-c0-slowest";

  Partition(Resolution h, int d, std::size_t state_cap = default_state_cap);

  Resolution resolution() const noexcept { return h_; }
  double h() const noexcept { return h_.value(); }
  int dim() const noexcept { return d_; }
  /// Bins per axis, 2N.
  std::int64_t per_axis() const noexcept { return 2 * h_.inverse(); }
  std::size_t size() const noexcept { return size_; }
  double bin_volume() const;

  std::size_t flatten(std::span<const int> j) const;
  MultiIndex unflatten(std::size_t index) const;
  /// Axis offset of component k of a linear index (0 .. 2N-1).
  std::int64_t axis_offset(std::size_t index, int k) const;

  MultiIndex bin_of(std::span<const double> x) const;
  std::size_t linear_bin_of(std::span<const double> x) const;
  std::vector<double> bin_lower(std::span<const int> j) const;
  std::vector<double> bin_center(std::span<const int> j) const;
  bool contains(std::span<const int> j) const;

  friend bool operator==(const Partition& a, const Partition& b) {
    return a.h_ == b.h_ && a.d_ == b.d_;
  }

 private:
  Resolution h_;
  int d_;
  std::size_t size_;
  std::vector<std::size_t> strides_;
};

Partition build_partition(Resolution h, int d, std::size_t state_cap = Partition::default_state_cap);

/// Coarse partition (2h) of a fine one.
Partition coarsen(const Partition& fine);

/// Throws invalid-level unless coarse is exactly the 2h partition of fine.
void require_dyadic_pair(const Partition& fine, const Partition& coarse);

MultiIndex parent_index(const Partition& fine, const Partition& coarse, std::span<const int> j);
std::vector<MultiIndex> children_of(const Partition& coarse, const Partition& fine, std::span<const int> k);

}  // namespace mlmc
