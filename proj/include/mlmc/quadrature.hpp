#pragma once

#include <vector>

namespace mlmc {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendre gauss_legendre(int points);

/// Composite Gauss-Legendre: `points` nodes on each of `subdivisions` equal
/// panels of every bin. Subdividing a coarse bin in two reproduces the
/// union of the rules on its children, which makes nested rules exact.
struct QuadratureSpec {
  int points = 8;
  int subdivisions = 1;
};

/// Appends the composite rule for [lo, hi] to x and w.
void composite_rule(const GaussLegendre& rule, double lo, double hi, int subdivisions, std::vector<double>& x,
                    std::vector<double>& w);

}  // namespace mlmc
