#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mlmc/error.hpp"
#include "mlmc/ulam.hpp"

using namespace mlmc;

namespace {

Partition part(std::int64_t inv, int d = 1) { return Partition(Resolution::from_inverse(inv), d); }

double tent(std::span<const double> x) { return 1.0 - std::abs(x[0]); }

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return ErrorCode::io;
}

}  // namespace

TEST(Lump, UniformAndTent) {
  const auto u = lump_density([](std::span<const double>) { return 0.5; }, part(2)).density;
  for (double m : u.mass()) EXPECT_NEAR(m, 0.25, 1e-15);
  const auto t1 = lump_density(tent, part(1)).density;
  EXPECT_NEAR(t1[0], 0.5, 1e-15);
  EXPECT_NEAR(t1[1], 0.5, 1e-15);
  const auto t2 = lump_density(tent, part(2)).density;
  const double expect[] = {1.0 / 8, 3.0 / 8, 3.0 / 8, 1.0 / 8};
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(t2[static_cast<std::size_t>(j)], expect[j], 1e-15);
}

TEST(Lump, NegativeDensityIsRejected) {
  EXPECT_EQ(code_of([] { lump_density([](std::span<const double> x) { return x[0]; }, part(2)); }),
            ErrorCode::bad_density);
}

TEST(Lump, TwoDimensionalProductMasses) {
  const auto pi = lump_density([](std::span<const double> x) { return (1.0 - std::abs(x[0])) * 0.5; }, part(1, 2));
  for (double m : pi.density.mass()) EXPECT_NEAR(m, 0.25, 1e-15);
}

TEST(Interpolate, Examples) {
  const auto p = part(2);
  const auto c = interpolate_density(DiscreteDensity::uniform(p));
  for (double v : c.values()) EXPECT_DOUBLE_EQ(v, 0.5);
  const auto q = interpolate_density(DiscreteDensity(part(1), {1.0, 0.0}));
  const std::vector<double> a{-0.5}, b{0.5};
  EXPECT_DOUBLE_EQ(q(a), 1.0);
  EXPECT_DOUBLE_EQ(q(b), 0.0);
  const auto t = interpolate_density(DiscreteDensity(p, {0.125, 0.375, 0.375, 0.125}));
  const double expect[] = {0.25, 0.75, 0.75, 0.25};
  for (int j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(t.values()[static_cast<std::size_t>(j)], expect[j]);
  EXPECT_NEAR(t.integral(), 1.0, 1e-15);
  const auto back = lump_piecewise(t);
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(back[static_cast<std::size_t>(j)], expect[j] / 2, 1e-15);
}

TEST(InterpolationError, TentHasClosedFormResidual) {
  // on each bin the tent is linear, so the residual is a sawtooth of height h/2 and L1 mass h^2/4 per bin
  for (std::int64_t inv : {1, 2, 4, 8, 16}) {
    const double h = 1.0 / static_cast<double>(inv);
    const auto e = interpolation_error(tent, 1.0, part(inv));
    EXPECT_NEAR(e.l1, h / 2, 1e-12) << inv;
    EXPECT_LE(e.l1, e.bound);
    EXPECT_NEAR(e.bound, h, 1e-15);
    EXPECT_TRUE(e.within_bound);
  }
  EXPECT_LE(interpolation_error(tent, 1.0, part(4)).l1, 0.25);
}

TEST(InterpolationError, ConstantDensityIsExact) {
  const auto e = interpolation_error([](std::span<const double>) { return 0.25; }, 0.0, part(4, 2));
  EXPECT_NEAR(e.l1, 0.0, 1e-15);
  EXPECT_NEAR(e.linf, 0.0, 1e-15);
}

TEST(InterpolationError, HalvesWithTheBinWidthForASmoothDensity) {
  auto p = [](std::span<const double> x) { return 0.5 + 0.25 * std::sin(std::numbers::pi * x[0]); };
  const double lambda = 0.25 * std::numbers::pi;
  double prev = 0.0;
  for (std::int64_t inv : {4, 8, 16, 32, 64}) {
    const auto e = interpolation_error(p, lambda, part(inv));
    EXPECT_TRUE(e.within_bound);
    if (prev > 0.0) EXPECT_NEAR(prev / e.l1, 2.0, 0.1);
    prev = e.l1;
  }
}

TEST(Discretize, WideWindowIsConstant) {
  const auto d = discretize_kernel(KernelSpec::uniform_window(2.0), part(1));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(d.matrix.at(i, j), 0.5, 1e-14);
}

TEST(Discretize, UnitWindowAtUnitResolution) {
  // half-width 1: K(x, y) = 1 / (2 - |x|) on the overlap, so P(0,0) = int_{-1}^0 dx / (x + 2) = ln 2
  const auto d = discretize_kernel(KernelSpec::uniform_window(1.0), part(1), {{16, 4}, 0.0});
  EXPECT_NEAR(d.matrix.at(0, 0), std::log(2.0), 1e-12);
  EXPECT_NEAR(d.matrix.at(0, 1), 1.0 - std::log(2.0), 1e-12);
  EXPECT_NEAR(d.matrix.at(1, 1), std::log(2.0), 1e-12);
}

TEST(Discretize, GridKernelAtItsOwnResolutionIsTheIdentityMap) {
  const auto p = part(1);
  const auto m = StochasticMatrix::from_dense(p, std::vector<double>{0.9, 0.1, 0.2, 0.8});
  EXPECT_EQ(discretize_kernel(KernelSpec::grid_defined(m), p).matrix, m);
  EXPECT_EQ(discretize_kernel(lift_kernel(m), p).matrix, m);
}

TEST(Discretize, GridKernelRefinedThenCoarsenedRoundTrips) {
  const auto p = part(1);
  const auto m = StochasticMatrix::from_dense(p, std::vector<double>{0.9, 0.1, 0.2, 0.8});
  const auto fine = discretize_kernel(lift_kernel(m), part(4)).matrix;
  // each fine row of source bin 0 spreads 0.9 evenly over the 4 fine bins of bin 0
  EXPECT_NEAR(fine.at(0, 0), 0.9 / 4, 1e-15);
  EXPECT_NEAR(fine.at(2, 5), 0.1 / 4, 1e-15);
  EXPECT_NEAR(fine.at(5, 7), 0.8 / 4, 1e-15);
  const auto back = discretize_kernel(lift_kernel(fine), p).matrix;
  EXPECT_LE(max_abs_difference(back, m), 1e-15);
}

TEST(Discretize, LiftedKernelValues) {
  const auto p = part(1);
  const auto id = lift_kernel(StochasticMatrix::from_dense(p, std::vector<double>{1, 0, 0, 1}));
  const std::vector<double> a{-0.3}, b{-0.9}, c{0.4};
  EXPECT_EQ(id.eval(a, b), 1.0);
  EXPECT_EQ(id.eval(a, c), 0.0);
  const auto half = lift_kernel(StochasticMatrix::from_dense(p, std::vector<double>{.5, .5, .5, .5}));
  EXPECT_EQ(half.eval(a, c), 0.5);
  EXPECT_EQ(half.eval(c, b), 0.5);
}

TEST(Discretize, ZeroAutoregressionRowsAreIdentical) {
  for (std::int64_t inv : {1, 4, 16}) {
    const auto m = discretize_kernel(KernelSpec::gauss_ar1(0.0, 0.3), part(inv)).matrix;
    const auto dense = m.dense();
    const std::size_t n = m.size();
    double worst = 0.0;
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) worst = std::max(worst, std::abs(dense[i * n + j] - dense[j]));
    EXPECT_LE(worst, 1e-10) << inv;
  }
}

TEST(Discretize, RowsAreStochasticAndProductStructured) {
  const auto k = KernelSpec::gauss_ar1(0.5, 0.3);
  const auto one = discretize_kernel(k, part(4)).matrix;
  const auto two = discretize_kernel(k, part(4, 2)).matrix;
  EXPECT_LE(two.max_row_sum_error(), 1e-12);
  EXPECT_EQ(two.size(), 64u);
  // P2((i0,i1),(j0,j1)) = P1(i0,j0) P1(i1,j1)
  for (std::size_t i = 0; i < 64; i += 7)
    for (std::size_t j = 0; j < 64; j += 3) {
      const double expect = one.at(i / 8, j / 8) * one.at(i % 8, j % 8);
      EXPECT_NEAR(two.at(i, j), expect, 1e-13);
    }
}

TEST(Discretize, AgreesWithBruteForceQuadrature) {
  const auto k = KernelSpec::gauss_ar1(0.5, 0.3);
  const auto p = part(2);
  const auto m = discretize_kernel(k, p, {{8, 1}, 0.0}).matrix;
  const auto r = gauss_legendre(32);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      std::vector<double> x, wx, y, wy;
      composite_rule(r, -1.0 + 0.5 * static_cast<double>(i), -0.5 + 0.5 * static_cast<double>(i), 4, x, wx);
      composite_rule(r, -1.0 + 0.5 * static_cast<double>(j), -0.5 + 0.5 * static_cast<double>(j), 4, y, wy);
      double s = 0.0;
      for (std::size_t a = 0; a < x.size(); ++a)
        for (std::size_t b = 0; b < y.size(); ++b) {
          const std::vector<double> xa{x[a]}, yb{y[b]};
          s += wx[a] * wy[b] * k.eval(xa, yb);
        }
      EXPECT_NEAR(m.at(i, j), s / 0.5, 1e-9) << i << "," << j;
    }
}

TEST(Discretize, LeakageNeedsTheReflectBoundary) {
  EXPECT_EQ(code_of([] { discretize_kernel(KernelSpec::gauss_ar1(0.0, 10.0), part(2)); }), ErrorCode::kernel_leakage);
  const auto d = discretize_kernel(KernelSpec::gauss_ar1(0.0, 10.0, BoundaryPolicy::reflect), part(2));
  EXPECT_LE(d.matrix.max_row_sum_error(), 1e-12);
  EXPECT_GT(d.leaked_max, 0.5);
}
