#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "mlmc/error.hpp"
#include "mlmc/kernels.hpp"
#include "mlmc/quadrature.hpp"

using namespace mlmc;

namespace {

double pt_eval(const KernelSpec& k, double x, double y) {
  const std::vector<double> xs{x}, ys{y};
  return k.eval(xs, ys);
}

// integral over [-1,1] of y -> K(x, y), panels split at every window edge and its mirror images
double row_integral(const KernelSpec& k, double x) {
  const auto r = gauss_legendre(64);
  std::vector<double> cuts;
  for (int b = 0; b <= 16; ++b) cuts.push_back(-1.0 + b / 8.0);
  if (k.family() == KernelFamily::uniform_window)
    for (double e : {x - k.width(), x + k.width()})
      for (double c : {e, -2.0 - e, 2.0 - e})
        if (c > -1.0 && c < 1.0) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> nodes, weights;
  for (std::size_t b = 0; b + 1 < cuts.size(); ++b)
    if (cuts[b + 1] > cuts[b]) composite_rule(r, cuts[b], cuts[b + 1], 1, nodes, weights);
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * pt_eval(k, x, nodes[i]);
  return s;
}

}  // namespace

TEST(Kernels, GaussRawDensityAtOrigin) {
  const auto k = KernelSpec::gauss_ar1(0.5, 0.3);
  const std::vector<double> o{0.0};
  EXPECT_NEAR(k.eval_raw(o, o), 1.0 / (0.3 * std::sqrt(2.0 * std::numbers::pi)), 1e-12);
  EXPECT_NEAR(k.eval_raw(o, o), 1.32981, 1e-5);
}

TEST(Kernels, WindowValues) {
  const auto half = KernelSpec::uniform_window(0.5);
  EXPECT_EQ(pt_eval(half, 0.9, 0.2), 0.0);
  const std::vector<double> a{0.9}, b{0.0};
  EXPECT_NEAR(half.row_mass_in_domain(a), 0.6, 1e-12);
  EXPECT_NEAR(half.row_mass_in_domain(b), 1.0, 1e-12);
  // a window of half-width 2 covers D from every x
  const auto wide = KernelSpec::uniform_window(2.0);
  for (double x : {-1.0, -0.3, 0.0, 0.7, 0.99})
    for (double y : {-1.0, 0.2, 0.9}) EXPECT_NEAR(pt_eval(wide, x, y), 0.5, 1e-14);
  // half-width 1 does not: from x = 0.5 the in-domain part is [-0.5, 1]
  const auto unit = KernelSpec::uniform_window(1.0);
  EXPECT_NEAR(pt_eval(unit, 0.5, 0.0), 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(pt_eval(unit, 0.0, 0.5), 0.5, 1e-14);
}

TEST(Kernels, GaussNarrowRowMassIsOne) {
  const auto k = KernelSpec::gauss_ar1(0.0, 0.1);
  const std::vector<double> o{0.0};
  EXPECT_NEAR(k.row_mass_in_domain(o), 1.0, 1e-12);
  EXPECT_NEAR(k.row_mass_in_domain(o), std::erf(1.0 / (0.1 * std::sqrt(2.0))), 1e-12);
}

TEST(Kernels, RowsIntegrateToOneAfterBoundaryPolicy) {
  for (auto policy : {BoundaryPolicy::renormalize_rows, BoundaryPolicy::reflect}) {
    for (const auto& k : {KernelSpec::gauss_ar1(0.5, 0.3, policy), KernelSpec::gauss_ar1(-0.8, 0.7, policy),
                          KernelSpec::uniform_window(0.5, policy), KernelSpec::uniform_window(1.3, policy)}) {
      for (double x : {-1.0, -0.75, -0.1, 0.0, 0.33, 0.9, 0.999}) EXPECT_NEAR(row_integral(k, x), 1.0, 1e-8);
    }
  }
}

TEST(Kernels, ReflectAgreesWithRenormalizeWhenNothingLeaks) {
  const auto a = KernelSpec::uniform_window(0.5, BoundaryPolicy::renormalize_rows);
  const auto b = KernelSpec::uniform_window(0.5, BoundaryPolicy::reflect);
  for (double x : {-0.5, -0.2, 0.0, 0.4})
    for (double y : {-0.9, -0.5, 0.0, 0.3, 0.8}) EXPECT_EQ(pt_eval(a, x, y), pt_eval(b, x, y));
}

TEST(Kernels, ZeroAutoregressionGivesIdenticalRows) {
  const auto k = KernelSpec::gauss_ar1(0.0, 0.3);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const double x = u(rng), xp = u(rng), y = u(rng);
    worst = std::max(worst, std::abs(pt_eval(k, x, y) - pt_eval(k, xp, y)));
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(Kernels, ProductStructureInTwoDimensions) {
  const auto k = KernelSpec::gauss_ar1(0.5, 0.3);
  const std::vector<double> x{0.2, -0.4}, y{0.1, 0.6};
  EXPECT_NEAR(k.eval(x, y), pt_eval(k, 0.2, 0.1) * pt_eval(k, -0.4, 0.6), 1e-14);
}

TEST(Kernels, LipschitzBounds) {
  const auto g = KernelSpec::gauss_ar1(0.5, 0.3);
  EXPECT_TRUE(std::isfinite(g.lipschitz_bound(1)));
  EXPECT_GT(g.lipschitz_bound(1), 0.0);
  // the bound dominates finite differences of y -> K(x, y)
  double worst = 0.0;
  for (double x = -1.0; x < 1.0; x += 0.125)
    for (double y = -1.0; y < 0.99; y += 0.01) worst = std::max(worst, std::abs(pt_eval(g, x, y + 0.01) - pt_eval(g, x, y)) / 0.01);
  EXPECT_LE(worst, g.lipschitz_bound(1));
  EXPECT_TRUE(std::isinf(KernelSpec::uniform_window(0.5).lipschitz_bound(1)));
  EXPECT_EQ(KernelSpec::uniform_window(0.5).with_lipschitz(3.0).lipschitz_bound(1), 3.0);
}

TEST(Kernels, InvalidParametersAndNames) {
  EXPECT_THROW(KernelSpec::gauss_ar1(1.0, 0.3), Error);
  EXPECT_THROW(KernelSpec::gauss_ar1(0.5, 0.0), Error);
  EXPECT_THROW(KernelSpec::uniform_window(-1.0), Error);
  EXPECT_EQ(parse_kernel_family("uniform-window"), KernelFamily::uniform_window);
  EXPECT_EQ(parse_boundary_policy("reflect"), BoundaryPolicy::reflect);
  EXPECT_THROW(parse_kernel_family("cauchy"), Error);
  const std::vector<double> x{1.5}, y{0.0};
  EXPECT_THROW(KernelSpec::gauss_ar1(0.5, 0.3).eval(x, y), Error);
}
