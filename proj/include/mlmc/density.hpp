#pragma once

#include <span>
#include <vector>

#include "mlmc/partition.hpp"

namespace mlmc {

/// Probability masses over the bins of a partition (pi_h).
class DiscreteDensity {
 public:
  static constexpr double mass_tolerance = 1e-12;

  /// Validates nonnegativity and unit mass within mass_tolerance.
  DiscreteDensity(const Partition& partition, std::vector<double> mass);

  /// Divides by the total; reports |total - 1| through delta.
  static DiscreteDensity normalized(const Partition& partition, std::vector<double> weights, double* delta = nullptr);
  static DiscreteDensity uniform(const Partition& partition);
  /// Squares a unit 2-norm amplitude vector.
  static DiscreteDensity from_amplitudes(const Partition& partition, std::span<const double> amplitudes);

  const Partition& partition() const noexcept { return partition_; }
  std::span<const double> mass() const noexcept { return mass_; }
  std::size_t size() const noexcept { return mass_.size(); }
  double operator[](std::size_t i) const { return mass_[i]; }

  /// sqrt(pi), the amplitude encoding.
  std::vector<double> amplitudes() const;

 private:
  Partition partition_;
  std::vector<double> mass_;
};

/// Density values (1/volume) constant on each bin: value(j) = pi(j) / h^d.
class PiecewiseConstantDensity {
 public:
  PiecewiseConstantDensity(const Partition& partition, std::vector<double> values);

  const Partition& partition() const noexcept { return partition_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator()(std::span<const double> x) const;
  double integral() const;

 private:
  Partition partition_;
  std::vector<double> values_;
};

void require_same_partition(const Partition& a, const Partition& b);

}  // namespace mlmc
