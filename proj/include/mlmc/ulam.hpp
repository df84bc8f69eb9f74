#pragma once

#include <functional>
#include <span>

#include "mlmc/density.hpp"
#include "mlmc/kernels.hpp"
#include "mlmc/quadrature.hpp"
#include "mlmc/stochastic_matrix.hpp"

namespace mlmc {

/// Continuous density p(x) on [-1,1]^d.
using DensityFunction = std::function<double(std::span<const double>)>;

struct LumpResult {
  DiscreteDensity density;
  /// |sum of quadrature masses - 1| before renormalization.
  double renorm_delta;
};

/// pi(j) = integral of p over bin j, renormalized to unit mass.
LumpResult lump_density(const DensityFunction& p, const Partition& partition, const QuadratureSpec& quad = {});

/// values(j) = pi(j) / h^d.
PiecewiseConstantDensity interpolate_density(const DiscreteDensity& pi);

/// Lumps a piecewise-constant density back to bin masses.
DiscreteDensity lump_piecewise(const PiecewiseConstantDensity& p);

struct InterpolationError {
  double l1 = 0.0;
  double linf = 0.0;
  /// Lambda * h.
  double bound = 0.0;
  bool within_bound = false;
};

/// ||p - I_h A^h p|| in L1 and sup norms, measured with a reference rule
/// finer than the lumping rule. The sup norm is sampled at reference nodes.
InterpolationError interpolation_error(const DensityFunction& p, double lipschitz, const Partition& partition,
                                       const QuadratureSpec& lump_quad = {},
                                       const QuadratureSpec& reference = {16, 8});

struct DiscretizeOptions {
  QuadratureSpec quad{};
  /// Entries below threshold * (row max) are dropped before the final renormalization.
  double drop_threshold = 1e-14;
};

struct Discretization {
  StochasticMatrix matrix;
  /// Largest |row sum - 1| of the quadrature matrix before any renormalization.
  double renorm_max_delta = 0.0;
  /// Largest row mass removed by the sparsity threshold.
  double dropped_max = 0.0;
  /// Largest raw-kernel mass leaving D over the quadrature nodes.
  double leaked_max = 0.0;
};

/// P(i, j) = h^-d * integral over bin i (x) and bin j (y) of K(x, y).
///
/// Product kernels integrate y exactly through the axis CDF and x with the
/// composite Gauss-Legendre rule; the d-dimensional matrix is the product of
/// the axis matrices. Grid-defined kernels are integrated exactly.
Discretization discretize_kernel(const KernelSpec& kernel, const Partition& partition,
                                 const DiscretizeOptions& options = {});

/// Piecewise-constant kernel K_h(x, y) = P(i, j) / h^d.
KernelSpec lift_kernel(const StochasticMatrix& p);

}  // namespace mlmc
