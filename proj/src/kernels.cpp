#include "mlmc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "mlmc/error.hpp"
#include "mlmc/quadrature.hpp"

namespace mlmc {

namespace {

constexpr double inv_sqrt_2pi = 0.3989422804014327;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

void require_in_domain(std::span<const double> p, std::string_view what) {
  for (std::size_t k = 0; k < p.size(); ++k)
    if (!(p[k] >= -1.0 && p[k] <= 1.0))
      fail(ErrorCode::out_of_domain, fmt::format("{}[{}] = {} outside [-1,1]", what, k, p[k]));
}

const GaussLegendre& reference_rule() {
  static const GaussLegendre rule = gauss_legendre(16);
  return rule;
}

}  // namespace

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::gauss_ar1: return "gauss-ar1";
    case KernelFamily::uniform_window: return "uniform-window";
    case KernelFamily::grid_defined: return "grid-defined";
  }
  return "unknown";
}

std::string_view to_string(BoundaryPolicy policy) {
  return policy == BoundaryPolicy::reflect ? "reflect" : "renormalize-rows";
}

KernelFamily parse_kernel_family(std::string_view text) {
  if (text == "gauss-ar1") return KernelFamily::gauss_ar1;
  if (text == "uniform-window") return KernelFamily::uniform_window;
  if (text == "grid-defined") return KernelFamily::grid_defined;
  fail(ErrorCode::config, fmt::format("unknown kernel family '{}'", text));
}

BoundaryPolicy parse_boundary_policy(std::string_view text) {
  if (text == "renormalize-rows") return BoundaryPolicy::renormalize_rows;
  if (text == "reflect") return BoundaryPolicy::reflect;
  fail(ErrorCode::config, fmt::format("unknown boundary policy '{}'", text));
}

KernelSpec KernelSpec::gauss_ar1(double a, double sigma, BoundaryPolicy policy) {
  if (!(a > -1.0 && a < 1.0)) fail(ErrorCode::invalid_parameter, fmt::format("gauss-ar1 needs a in (-1,1), got {}", a));
  if (!(sigma > 0.0)) fail(ErrorCode::invalid_parameter, fmt::format("gauss-ar1 needs sigma > 0, got {}", sigma));
  KernelSpec k;
  k.family_ = KernelFamily::gauss_ar1;
  k.policy_ = policy;
  k.a_ = a;
  k.sigma_ = sigma;
  return k;
}

KernelSpec KernelSpec::uniform_window(double w, BoundaryPolicy policy) {
  if (!(w > 0.0)) fail(ErrorCode::invalid_parameter, fmt::format("uniform-window needs w > 0, got {}", w));
  KernelSpec k;
  k.family_ = KernelFamily::uniform_window;
  k.policy_ = policy;
  k.w_ = w;
  return k;
}

KernelSpec KernelSpec::grid_defined(StochasticMatrix matrix) {
  KernelSpec k;
  k.family_ = KernelFamily::grid_defined;
  k.grid_ = std::make_shared<const StochasticMatrix>(std::move(matrix));
  return k;
}

KernelSpec KernelSpec::with_lipschitz(double lambda) const {
  if (!(lambda >= 0.0)) fail(ErrorCode::invalid_parameter, "Lipschitz bound must be nonnegative");
  KernelSpec k = *this;
  k.lambda_ = lambda;
  return k;
}

const StochasticMatrix& KernelSpec::grid_matrix() const {
  if (!grid_) fail(ErrorCode::invalid_parameter, "kernel is not grid-defined");
  return *grid_;
}

double KernelSpec::lipschitz_bound(int d) const {
  if (lambda_) return *lambda_;
  if (family_ != KernelFamily::gauss_ar1) return std::numeric_limits<double>::infinity();
  // Per axis: |d/dy phi((y - a x)/sigma)/sigma| <= 1/(sigma^2 sqrt(2 pi e)); the
  // renormalized kernel divides by the smallest in-domain mass, reached at |x| = 1.
  const double fold = policy_ == BoundaryPolicy::reflect ? 2.0 : 1.0;
  const double m_min = policy_ == BoundaryPolicy::reflect ? 1.0 : std::min(axis_mass_exact(-1.0), axis_mass_exact(1.0));
  const double slope = fold * inv_sqrt_2pi * std::exp(-0.5) / (sigma_ * sigma_ * m_min);
  const double peak = fold * inv_sqrt_2pi / (sigma_ * m_min);
  return static_cast<double>(d) * slope * std::pow(peak, d - 1);
}

double KernelSpec::axis_density_raw(double x, double y) const {
  if (family_ == KernelFamily::gauss_ar1) {
    const double z = (y - a_ * x) / sigma_;
    return inv_sqrt_2pi * std::exp(-0.5 * z * z) / sigma_;
  }
  return std::abs(y - x) <= w_ ? 0.5 / w_ : 0.0;
}

double KernelSpec::axis_cdf_raw(double x, double y) const {
  if (family_ == KernelFamily::gauss_ar1) return normal_cdf((y - a_ * x) / sigma_);
  return std::clamp((y - (x - w_)) / (2.0 * w_), 0.0, 1.0);
}

double KernelSpec::axis_mass_exact(double x) const { return axis_cdf_raw(x, 1.0) - axis_cdf_raw(x, -1.0); }

double KernelSpec::axis_mass_quadrature(double x) const {
  std::vector<double> nodes, weights;
  if (family_ == KernelFamily::gauss_ar1) {
    composite_rule(reference_rule(), -1.0, 1.0, 64, nodes, weights);
  } else {
    // break at the window edges so every panel integrates a constant
    std::vector<double> cuts{-1.0, 1.0};
    for (double c : {x - w_, x + w_})
      if (c > -1.0 && c < 1.0) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) composite_rule(reference_rule(), cuts[k], cuts[k + 1], 1, nodes, weights);
  }
  double m = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) m += weights[k] * axis_density_raw(x, nodes[k]);
  if (!std::isfinite(m)) fail(ErrorCode::invalid_parameter, "row mass quadrature produced a non-finite value");
  return m;
}

int KernelSpec::image_count() const {
  const double reach = family_ == KernelFamily::gauss_ar1 ? std::abs(a_) + 40.0 * sigma_ : 1.0 + w_;
  return static_cast<int>(std::ceil((2.0 + reach) / 4.0)) + 1;
}

double KernelSpec::axis_density(double x, double y) const {
  if (policy_ == BoundaryPolicy::renormalize_rows) return axis_density_raw(x, y) / axis_mass_exact(x);
  // Folding at both walls maps y to the orbit {y + 4m, 2 - y + 4m}.
  const int images = image_count();
  double v = 0.0;
  for (int m = -images; m <= images; ++m)
    v += axis_density_raw(x, y + 4.0 * m) + axis_density_raw(x, 2.0 - y + 4.0 * m);
  return v;
}

double KernelSpec::axis_interval_mass(double x, double lo, double hi) const {
  if (policy_ == BoundaryPolicy::renormalize_rows)
    return (axis_cdf_raw(x, hi) - axis_cdf_raw(x, lo)) / axis_mass_exact(x);
  const int images = image_count();
  double v = 0.0;
  for (int m = -images; m <= images; ++m) {
    const double shift = 4.0 * m;
    v += axis_cdf_raw(x, hi + shift) - axis_cdf_raw(x, lo + shift);
    v += axis_cdf_raw(x, 2.0 - lo + shift) - axis_cdf_raw(x, 2.0 - hi + shift);
  }
  return v;
}

double KernelSpec::eval_raw(std::span<const double> x, std::span<const double> y) const {
  if (x.size() != y.size()) fail(ErrorCode::invalid_parameter, "x and y dimensions differ");
  require_in_domain(x, "x");
  require_in_domain(y, "y");
  if (family_ == KernelFamily::grid_defined) return eval(x, y);
  double v = 1.0;
  for (std::size_t k = 0; k < x.size(); ++k) v *= axis_density_raw(x[k], y[k]);
  return v;
}

double KernelSpec::eval(std::span<const double> x, std::span<const double> y) const {
  if (x.size() != y.size()) fail(ErrorCode::invalid_parameter, "x and y dimensions differ");
  require_in_domain(x, "x");
  require_in_domain(y, "y");
  if (family_ == KernelFamily::grid_defined) {
    const Partition& part = grid_->partition();
    if (static_cast<int>(x.size()) != part.dim())
      fail(ErrorCode::invalid_parameter, "point dimension does not match the grid kernel");
    // right face x = 1 belongs to the last bin
    auto clamp_pt = [](std::span<const double> p) {
      std::vector<double> q(p.begin(), p.end());
      for (double& c : q) c = std::min(c, std::nextafter(1.0, 0.0));
      return q;
    };
    const auto i = part.linear_bin_of(clamp_pt(x));
    const auto j = part.linear_bin_of(clamp_pt(y));
    return grid_->at(i, j) / part.bin_volume();
  }
  double v = 1.0;
  for (std::size_t k = 0; k < x.size(); ++k) v *= axis_density(x[k], y[k]);
  return v;
}

double KernelSpec::row_mass_in_domain(std::span<const double> x) const {
  require_in_domain(x, "x");
  if (family_ == KernelFamily::grid_defined) return 1.0;
  double m = 1.0;
  for (double xk : x) m *= axis_mass_quadrature(xk);
  return m;
}

}  // namespace mlmc
