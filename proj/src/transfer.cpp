#include "mlmc/transfer.hpp"

#include <cmath>
#include <algorithm>
#include <limits>

#include <fmt/format.h>

#include "mlmc/error.hpp"
#include "mlmc/parallel.hpp"

namespace mlmc {

namespace {

void require_size(std::size_t got, std::size_t want, std::string_view what) {
  if (got != want) fail(ErrorCode::invalid_level, fmt::format("{} has {} entries, level expects {}", what, got, want));
}

}  // namespace

LevelPair::LevelPair(const Partition& fine)
    : fine_(fine), coarse_(coarsen(fine)), branching_(std::size_t{1} << fine.dim()) {
  require_dyadic_pair(fine_, coarse_);
  const std::size_t n = fine_.size();
  const int d = fine_.dim();
  const auto coarse_axis = static_cast<std::size_t>(coarse_.per_axis());
  parent_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    // axis offsets halve exactly: offset = j + N, parent offset = floor(j/2) + N/2
    std::size_t k = 0;
    for (int c = 0; c < d; ++c) k = k * coarse_axis + static_cast<std::size_t>(fine_.axis_offset(i, c) / 2);
    parent_[i] = k;
  }
  std::vector<std::size_t> fill(coarse_.size(), 0);
  children_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = parent_[i];
    children_[k * branching_ + fill[k]++] = i;
  }
}

std::span<const std::size_t> LevelPair::children(std::size_t coarse_index) const {
  return {children_.data() + coarse_index * branching_, branching_};
}

std::vector<double> restrict_sum(const LevelPair& levels, std::span<const double> fine) {
  require_size(fine.size(), levels.fine().size(), "fine vector");
  std::vector<double> out(levels.coarse().size(), 0.0);
  for (std::size_t k = 0; k < out.size(); ++k)
    for (std::size_t i : levels.children(k)) out[k] += fine[i];
  return out;
}

std::vector<double> prolong_copy(const LevelPair& levels, std::span<const double> coarse) {
  require_size(coarse.size(), levels.coarse().size(), "coarse vector");
  std::vector<double> out(levels.fine().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = coarse[levels.parent(i)];
  return out;
}

DiscreteDensity prolong_mass(const LevelPair& levels, const DiscreteDensity& coarse) {
  require_same_partition(coarse.partition(), levels.coarse());
  const double share = 1.0 / static_cast<double>(levels.children_per_parent());
  std::vector<double> out(levels.fine().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = coarse[levels.parent(i)] * share;
  return DiscreteDensity(levels.fine(), std::move(out));
}

std::vector<double> prolong_amplitude(const LevelPair& levels, std::span<const double> psi) {
  require_size(psi.size(), levels.coarse().size(), "amplitude vector");
  double norm2 = 0.0;
  for (double a : psi) norm2 += a * a;
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12)
    fail(ErrorCode::not_normalized, fmt::format("amplitude vector has 2-norm {:.17g}", std::sqrt(norm2)));
  const double scale = 1.0 / std::sqrt(static_cast<double>(levels.children_per_parent()));
  std::vector<double> out(levels.fine().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = psi[levels.parent(i)] * scale;
  return out;
}

std::vector<double> prolong(const LevelPair& levels, std::span<const double> coarse, TransferConvention convention) {
  switch (convention) {
    case TransferConvention::value_copy: return prolong_copy(levels, coarse);
    case TransferConvention::amplitude: return prolong_amplitude(levels, coarse);
    case TransferConvention::mass_split: {
      auto out = prolong_copy(levels, coarse);
      const double share = 1.0 / static_cast<double>(levels.children_per_parent());
      for (double& v : out) v *= share;
      return out;
    }
  }
  return {};
}

StochasticMatrix coarsen_matrix(const LevelPair& levels, const StochasticMatrix& fine) {
  require_same_partition(fine.partition(), levels.fine());
  const std::size_t m = levels.coarse().size();
  const double share = 1.0 / static_cast<double>(levels.children_per_parent());
  std::vector<std::vector<StochasticMatrix::Entry>> rows(m);
  parallel_for(m, [&](std::size_t k) {
    std::vector<double> acc(m, 0.0);
    std::vector<char> touched(m, 0);
    for (std::size_t i : levels.children(k)) {
      const auto idx = fine.row_indices(i);
      const auto val = fine.row_values(i);
      for (std::size_t e = 0; e < idx.size(); ++e) {
        const std::size_t l = levels.parent(static_cast<std::size_t>(idx[e]));
        acc[l] += val[e];
        touched[l] = 1;
      }
    }
    for (std::size_t l = 0; l < m; ++l)
      if (touched[l]) rows[k].push_back({static_cast<std::int32_t>(l), acc[l] * share});
  });
  auto out = StochasticMatrix::from_rows(levels.coarse(), std::move(rows), 1e-12);
  return out;
}

StochasticMatrix lift_matrix(const LevelPair& levels, const StochasticMatrix& coarse) {
  require_same_partition(coarse.partition(), levels.coarse());
  const std::size_t n = levels.fine().size();
  const double share = 1.0 / static_cast<double>(levels.children_per_parent());
  std::vector<std::vector<StochasticMatrix::Entry>> rows(n);
  parallel_for(n, [&](std::size_t i) {
    const std::size_t k = levels.parent(i);
    const auto idx = coarse.row_indices(k);
    const auto val = coarse.row_values(k);
    auto& row = rows[i];
    row.reserve(idx.size() * levels.children_per_parent());
    for (std::size_t e = 0; e < idx.size(); ++e)
      for (std::size_t j : levels.children(static_cast<std::size_t>(idx[e])))
        row.push_back({static_cast<std::int32_t>(j), val[e] * share});
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
  });
  return StochasticMatrix::from_rows(levels.fine(), std::move(rows), 1e-12);
}

}  // namespace mlmc
