#include "mlmc/quadrature.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "mlmc/error.hpp"

namespace mlmc {

GaussLegendre gauss_legendre(int points) {
  if (points < 1 || points > 256)
    fail(ErrorCode::invalid_parameter, fmt::format("Gauss-Legendre points must be in [1,256], got {}", points));
  const auto n = static_cast<std::size_t>(points);
  GaussLegendre rule{std::vector<double>(n), std::vector<double>(n)};
  // Newton on P_n from the Tricomi initial guess; roots are symmetric.
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * static_cast<double>(k) - 1.0) * x * p1 - (static_cast<double>(k) - 1.0) * p0) /
                          static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

void composite_rule(const GaussLegendre& rule, double lo, double hi, int subdivisions, std::vector<double>& x,
                    std::vector<double>& w) {
  if (subdivisions < 1) fail(ErrorCode::invalid_parameter, "quadrature subdivisions must be >= 1");
  const double panel = (hi - lo) / subdivisions;
  for (int s = 0; s < subdivisions; ++s) {
    const double a = lo + panel * s;
    const double half = 0.5 * panel;
    const double mid = a + half;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      x.push_back(mid + half * rule.nodes[k]);
      w.push_back(half * rule.weights[k]);
    }
  }
}

}  // namespace mlmc
