#include "mlmc/partition.hpp"

#include <charconv>
#include <cmath>
#include <algorithm>
#include <limits>

#include <fmt/format.h>

#include "mlmc/error.hpp"

namespace mlmc {

namespace {

std::int64_t floor_div2(std::int64_t v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); }

std::int64_t parse_int(std::string_view text, std::string_view what) {
  std::int64_t v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end)
    fail(ErrorCode::invalid_resolution, fmt::format("cannot parse {} '{}'", what, text));
  return v;
}

}  // namespace

Resolution Resolution::from_inverse(std::int64_t n) {
  if (n < 1) fail(ErrorCode::invalid_resolution, fmt::format("1/h must be a positive integer, got {}", n));
  return Resolution(n);
}

Resolution Resolution::from_rational(std::int64_t num, std::int64_t den) {
  if (num <= 0 || den <= 0)
    fail(ErrorCode::invalid_resolution, fmt::format("h = {}/{} must be positive", num, den));
  if (den % num != 0)
    fail(ErrorCode::invalid_resolution, fmt::format("1/h = {}/{} is not an integer", den, num));
  return Resolution(den / num);
}

Resolution Resolution::parse(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (const auto slash = text.find('/'); slash != std::string_view::npos)
    return from_rational(parse_int(text.substr(0, slash), "numerator"),
                         parse_int(text.substr(slash + 1), "denominator"));
  double h = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, h);
  if (ec != std::errc{} || ptr != end || !(h > 0.0))
    fail(ErrorCode::invalid_resolution, fmt::format("cannot parse resolution '{}'", text));
  const double inv = 1.0 / h;
  const double rounded = std::round(inv);
  if (std::abs(inv - rounded) > 1e-9 * rounded)
    fail(ErrorCode::invalid_resolution, fmt::format("1/h = {} is not an integer", inv));
  return from_inverse(static_cast<std::int64_t>(rounded));
}

Resolution Resolution::coarser() const {
  if (!can_coarsen())
    fail(ErrorCode::invalid_level, fmt::format("h = {} has no dyadic coarsening", str()));
  return Resolution(inverse_ / 2);
}

Resolution Resolution::finer() const { return Resolution(inverse_ * 2); }

std::string Resolution::str() const { return inverse_ == 1 ? "1" : fmt::format("1/{}", inverse_); }

Partition::Partition(Resolution h, int d, std::size_t state_cap) : h_(h), d_(d) {
  if (d < 1) fail(ErrorCode::invalid_parameter, fmt::format("dimension must be >= 1, got {}", d));
  const auto axis = static_cast<double>(per_axis());
  const double count = std::pow(axis, d);
  if (count > static_cast<double>(state_cap))
    fail(ErrorCode::capacity,
         fmt::format("partition h={} d={} has {} states, cap is {}", h.str(), d, count, state_cap));
  size_ = static_cast<std::size_t>(std::llround(count));
  strides_.assign(static_cast<std::size_t>(d), 1);
  for (int k = d - 2; k >= 0; --k)
    strides_[static_cast<std::size_t>(k)] = strides_[static_cast<std::size_t>(k + 1)] * static_cast<std::size_t>(per_axis());
}

double Partition::bin_volume() const { return std::pow(h(), d_); }

bool Partition::contains(std::span<const int> j) const {
  if (static_cast<int>(j.size()) != d_) return false;
  const std::int64_t n = h_.inverse();
  for (int c : j)
    if (c < -n || c >= n) return false;
  return true;
}

std::size_t Partition::flatten(std::span<const int> j) const {
  if (!contains(j)) fail(ErrorCode::out_of_domain, "multi-index outside the partition");
  const std::int64_t n = h_.inverse();
  std::size_t idx = 0;
  for (int k = 0; k < d_; ++k)
    idx += static_cast<std::size_t>(j[static_cast<std::size_t>(k)] + n) * strides_[static_cast<std::size_t>(k)];
  return idx;
}

std::int64_t Partition::axis_offset(std::size_t index, int k) const {
  return static_cast<std::int64_t>((index / strides_[static_cast<std::size_t>(k)]) %
                                   static_cast<std::size_t>(per_axis()));
}

MultiIndex Partition::unflatten(std::size_t index) const {
  if (index >= size_) fail(ErrorCode::out_of_domain, fmt::format("linear index {} >= {}", index, size_));
  MultiIndex j(static_cast<std::size_t>(d_));
  const std::int64_t n = h_.inverse();
  for (int k = 0; k < d_; ++k) j[static_cast<std::size_t>(k)] = static_cast<int>(axis_offset(index, k) - n);
  return j;
}

MultiIndex Partition::bin_of(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != d_)
    fail(ErrorCode::out_of_domain, fmt::format("point has {} components, partition has d={}", x.size(), d_));
  const std::int64_t n = h_.inverse();
  MultiIndex j(static_cast<std::size_t>(d_));
  for (int k = 0; k < d_; ++k) {
    const double xk = x[static_cast<std::size_t>(k)];
    if (!(xk >= -1.0 && xk < 1.0))
      fail(ErrorCode::out_of_domain, fmt::format("x[{}] = {} outside [-1,1)", k, xk));
    auto c = static_cast<std::int64_t>(std::floor(xk * static_cast<double>(n)));
    c = std::clamp<std::int64_t>(c, -n, n - 1);
    j[static_cast<std::size_t>(k)] = static_cast<int>(c);
  }
  return j;
}

std::size_t Partition::linear_bin_of(std::span<const double> x) const {
  const MultiIndex j = bin_of(x);
  return flatten(j);
}

std::vector<double> Partition::bin_lower(std::span<const int> j) const {
  std::vector<double> lo(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) lo[k] = static_cast<double>(j[k]) * h();
  return lo;
}

std::vector<double> Partition::bin_center(std::span<const int> j) const {
  std::vector<double> c(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) c[k] = (static_cast<double>(j[k]) + 0.5) * h();
  return c;
}

Partition build_partition(Resolution h, int d, std::size_t state_cap) { return Partition(h, d, state_cap); }

Partition coarsen(const Partition& fine) {
  return Partition(fine.resolution().coarser(), fine.dim(), std::numeric_limits<std::size_t>::max());
}

void require_dyadic_pair(const Partition& fine, const Partition& coarse) {
  if (fine.dim() != coarse.dim())
    fail(ErrorCode::invalid_level, fmt::format("dimension mismatch {} vs {}", fine.dim(), coarse.dim()));
  if (fine.resolution().inverse() != 2 * coarse.resolution().inverse())
    fail(ErrorCode::invalid_level, fmt::format("h={} is not the dyadic refinement of h={}",
                                               fine.resolution().str(), coarse.resolution().str()));
}

MultiIndex parent_index(const Partition& fine, const Partition& coarse, std::span<const int> j) {
  require_dyadic_pair(fine, coarse);
  if (!fine.contains(j)) fail(ErrorCode::out_of_domain, "fine multi-index outside the partition");
  MultiIndex k(j.size());
  for (std::size_t c = 0; c < j.size(); ++c) k[c] = static_cast<int>(floor_div2(j[c]));
  return k;
}

std::vector<MultiIndex> children_of(const Partition& coarse, const Partition& fine, std::span<const int> k) {
  require_dyadic_pair(fine, coarse);
  if (!coarse.contains(k)) fail(ErrorCode::out_of_domain, "coarse multi-index outside the partition");
  const std::size_t d = k.size();
  std::vector<MultiIndex> out;
  out.reserve(std::size_t{1} << d);
  // bit c of the mask (component 0 = most significant) selects the upper child
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    MultiIndex child(d);
    for (std::size_t c = 0; c < d; ++c) child[c] = 2 * k[c] + static_cast<int>((mask >> (d - 1 - c)) & 1u);
    out.push_back(std::move(child));
  }
  return out;
}

}  // namespace mlmc
