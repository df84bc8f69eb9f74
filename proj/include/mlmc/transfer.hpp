#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mlmc/density.hpp"
#include "mlmc/stochastic_matrix.hpp"

namespace mlmc {

/// The three prolongation normalizations. Each transfer function is named
/// after exactly one of them; none is overloaded.
enum class TransferConvention {
  value_copy,  // child = parent
  mass_split,  // child = parent / 2^d
  amplitude,   // child = parent / sqrt(2^d)
};

/// Fine partition (h) with its dyadic coarsening (2h) and the index maps.
class LevelPair {
 public:
  explicit LevelPair(const Partition& fine);

  const Partition& fine() const noexcept { return fine_; }
  const Partition& coarse() const noexcept { return coarse_; }
  std::size_t children_per_parent() const noexcept { return branching_; }
  std::size_t parent(std::size_t fine_index) const { return parent_[fine_index]; }
  /// Children of a coarse state, ascending.
  std::span<const std::size_t> children(std::size_t coarse_index) const;

 private:
  Partition fine_;
  Partition coarse_;
  std::size_t branching_;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> children_;
};

/// Coarse entry = sum over its children.
std::vector<double> restrict_sum(const LevelPair& levels, std::span<const double> fine);

std::vector<double> prolong_copy(const LevelPair& levels, std::span<const double> coarse);

/// L1-preserving prolongation of a density.
DiscreteDensity prolong_mass(const LevelPair& levels, const DiscreteDensity& coarse);

/// 2-norm-preserving prolongation of amplitudes; input must have unit norm within 1e-12.
std::vector<double> prolong_amplitude(const LevelPair& levels, std::span<const double> psi);

std::vector<double> prolong(const LevelPair& levels, std::span<const double> coarse, TransferConvention convention);

/// P_2h(k, l) = 2^-d * sum_{i in children(k)} sum_{j in children(l)} P(i, j).
StochasticMatrix coarsen_matrix(const LevelPair& levels, const StochasticMatrix& fine);

/// Lifted chain: P_hat(i, j) = P_2h(parent(i), parent(j)) / 2^d.
StochasticMatrix lift_matrix(const LevelPair& levels, const StochasticMatrix& coarse);

/// Dense lift over any field (used with exact rationals in tests).
template <class T>
std::vector<T> lift_dense(const LevelPair& levels, std::span<const T> coarse) {
  const std::size_t n = levels.fine().size();
  const std::size_t m = levels.coarse().size();
  const T scale = T(static_cast<long>(levels.children_per_parent()));
  std::vector<T> out(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = coarse[levels.parent(i) * m + levels.parent(j)] / scale;
  return out;
}

}  // namespace mlmc
