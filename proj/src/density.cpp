#include "mlmc/density.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "mlmc/error.hpp"

namespace mlmc {

void require_same_partition(const Partition& a, const Partition& b) {
  if (!(a == b))
    fail(ErrorCode::partition_mismatch, fmt::format("partitions differ: h={} d={} vs h={} d={}",
                                                    a.resolution().str(), a.dim(), b.resolution().str(), b.dim()));
}

DiscreteDensity::DiscreteDensity(const Partition& partition, std::vector<double> mass)
    : partition_(partition), mass_(std::move(mass)) {
  if (mass_.size() != partition_.size())
    fail(ErrorCode::partition_mismatch,
         fmt::format("density has {} entries, partition has {} states", mass_.size(), partition_.size()));
  double total = 0.0;
  for (std::size_t i = 0; i < mass_.size(); ++i) {
    if (!(mass_[i] >= 0.0) || !std::isfinite(mass_[i]))
      fail(ErrorCode::bad_density, fmt::format("mass[{}] = {} is not a probability", i, mass_[i]));
    total += mass_[i];
  }
  if (std::abs(total - 1.0) > mass_tolerance)
    fail(ErrorCode::bad_density, fmt::format("masses sum to {:.17g}", total));
}

DiscreteDensity DiscreteDensity::normalized(const Partition& partition, std::vector<double> weights, double* delta) {
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i]))
      fail(ErrorCode::bad_density, fmt::format("weight[{}] = {} is negative or not finite", i, weights[i]));
    total += weights[i];
  }
  if (!(total > 0.0)) fail(ErrorCode::bad_density, "density has no mass");
  if (delta != nullptr) *delta = std::abs(total - 1.0);
  if (total != 1.0)
    for (double& w : weights) w /= total;
  return DiscreteDensity(partition, std::move(weights));
}

DiscreteDensity DiscreteDensity::uniform(const Partition& partition) {
  return DiscreteDensity(partition, std::vector<double>(partition.size(), 1.0 / static_cast<double>(partition.size())));
}

DiscreteDensity DiscreteDensity::from_amplitudes(const Partition& partition, std::span<const double> amplitudes) {
  std::vector<double> m(amplitudes.size());
  std::transform(amplitudes.begin(), amplitudes.end(), m.begin(), [](double a) { return a * a; });
  return normalized(partition, std::move(m));
}

std::vector<double> DiscreteDensity::amplitudes() const {
  std::vector<double> a(mass_.size());
  std::transform(mass_.begin(), mass_.end(), a.begin(), [](double m) { return std::sqrt(m); });
  return a;
}

PiecewiseConstantDensity::PiecewiseConstantDensity(const Partition& partition, std::vector<double> values)
    : partition_(partition), values_(std::move(values)) {
  if (values_.size() != partition_.size())
    fail(ErrorCode::partition_mismatch, "piecewise-constant density size does not match the partition");
  for (double v : values_)
    if (!(v >= 0.0)) fail(ErrorCode::bad_density, "density values must be nonnegative");
}

double PiecewiseConstantDensity::operator()(std::span<const double> x) const {
  return values_[partition_.linear_bin_of(x)];
}

double PiecewiseConstantDensity::integral() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * partition_.bin_volume();
}

}  // namespace mlmc
