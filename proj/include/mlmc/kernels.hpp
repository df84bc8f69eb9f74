#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string_view>

#include "mlmc/stochastic_matrix.hpp"

namespace mlmc {

enum class KernelFamily { gauss_ar1, uniform_window, grid_defined };
enum class BoundaryPolicy { renormalize_rows, reflect };

std::string_view to_string(KernelFamily family);
std::string_view to_string(BoundaryPolicy policy);
KernelFamily parse_kernel_family(std::string_view text);
BoundaryPolicy parse_boundary_policy(std::string_view text);

/// Transition density K(x, y) on [-1,1]^d.
///
/// gauss-ar1 and uniform-window are coordinatewise products of one axis
/// kernel, so every d-dimensional integral over a box factorizes into axis
/// integrals. grid-defined is the piecewise-constant kernel of a stochastic
/// matrix: K(x, y) = M(i, j) / h^d for x in bin i, y in bin j.
class KernelSpec {
 public:
  static KernelSpec gauss_ar1(double a, double sigma, BoundaryPolicy policy = BoundaryPolicy::renormalize_rows);
  static KernelSpec uniform_window(double w, BoundaryPolicy policy = BoundaryPolicy::renormalize_rows);
  static KernelSpec grid_defined(StochasticMatrix matrix);

  /// Replaces the analytic Lipschitz bound with a user-supplied one.
  KernelSpec with_lipschitz(double lambda) const;

  KernelFamily family() const noexcept { return family_; }
  BoundaryPolicy boundary() const noexcept { return policy_; }
  bool is_product() const noexcept { return family_ != KernelFamily::grid_defined; }
  double a() const noexcept { return a_; }
  double sigma() const noexcept { return sigma_; }
  double width() const noexcept { return w_; }
  const StochasticMatrix& grid_matrix() const;

  /// Lipschitz constant of y -> K(x, y) in the max-norm, for dimension d.
  /// Infinite for the window and grid families unless supplied.
  double lipschitz_bound(int d) const;
  bool lipschitz_is_user_supplied() const noexcept { return lambda_.has_value(); }

  /// Boundary-adjusted kernel value.
  double eval(std::span<const double> x, std::span<const double> y) const;
  /// Raw kernel value before the boundary policy.
  double eval_raw(std::span<const double> x, std::span<const double> y) const;
  /// Integral of the raw kernel over D by quadrature.
  double row_mass_in_domain(std::span<const double> x) const;

  // Axis pieces of the product families.
  double axis_density_raw(double x, double y) const;
  /// Integral of the raw axis kernel over (-inf, y].
  double axis_cdf_raw(double x, double y) const;
  /// Integral of the raw axis kernel over [-1, 1], by quadrature.
  double axis_mass_quadrature(double x) const;
  /// Boundary-adjusted axis density.
  double axis_density(double x, double y) const;
  /// Boundary-adjusted integral over [lo, hi] (a subset of [-1, 1]).
  double axis_interval_mass(double x, double lo, double hi) const;

 private:
  KernelSpec() = default;
  double axis_mass_exact(double x) const;
  int image_count() const;

  KernelFamily family_ = KernelFamily::gauss_ar1;
  BoundaryPolicy policy_ = BoundaryPolicy::renormalize_rows;
  double a_ = 0.0;
  double sigma_ = 1.0;
  double w_ = 1.0;
  std::shared_ptr<const StochasticMatrix> grid_;
  std::optional<double> lambda_;
};

}  // namespace mlmc
