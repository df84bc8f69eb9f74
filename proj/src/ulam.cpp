#include "mlmc/ulam.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "mlmc/error.hpp"
#include "mlmc/parallel.hpp"

namespace mlmc {

namespace {

// Tensor-product composite rule over one bin.
struct BinRule {
  std::vector<std::vector<double>> axis_nodes;  // per axis, local offsets in [0, h)
  std::vector<double> axis_weights;             // shared by all axes
};

BinRule make_bin_rule(double h, int d, const QuadratureSpec& quad) {
  const GaussLegendre rule = gauss_legendre(quad.points);
  std::vector<double> x, w;
  composite_rule(rule, 0.0, h, quad.subdivisions, x, w);
  return BinRule{std::vector<std::vector<double>>(static_cast<std::size_t>(d), x), w};
}

// Calls f(point, weight) for every tensor node inside bin `index`.
template <class F>
void for_each_node(const Partition& part, std::size_t index, const BinRule& rule, std::vector<double>& point, F&& f) {
  const int d = part.dim();
  const std::size_t m = rule.axis_weights.size();
  const auto lower = part.bin_lower(part.unflatten(index));
  std::vector<std::size_t> odo(static_cast<std::size_t>(d), 0);
  point.resize(static_cast<std::size_t>(d));
  while (true) {
    double w = 1.0;
    for (int k = 0; k < d; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      point[kk] = lower[kk] + rule.axis_nodes[kk][odo[kk]];
      w *= rule.axis_weights[odo[kk]];
    }
    f(std::span<const double>(point), w);
    int k = d - 1;
    while (k >= 0 && ++odo[static_cast<std::size_t>(k)] == m) odo[static_cast<std::size_t>(k--)] = 0;
    if (k < 0) break;
  }
}

std::vector<std::vector<StochasticMatrix::Entry>> threshold_rows(const std::vector<std::vector<double>>& dense_rows,
                                                                 double threshold, double& dropped_max) {
  std::vector<std::vector<StochasticMatrix::Entry>> rows(dense_rows.size());
  std::vector<double> dropped(dense_rows.size(), 0.0);
  parallel_for(dense_rows.size(), [&](std::size_t i) {
    const auto& r = dense_rows[i];
    const double cut = threshold * *std::max_element(r.begin(), r.end());
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (r[j] > 0.0 && r[j] >= cut)
        rows[i].push_back({static_cast<std::int32_t>(j), r[j]});
      else
        dropped[i] += r[j];
    }
  });
  dropped_max = dropped.empty() ? 0.0 : *std::max_element(dropped.begin(), dropped.end());
  return rows;
}

Discretization finish(const Partition& partition, std::vector<std::vector<double>> dense_rows, double threshold,
                      double leaked_max) {
  double renorm = 0.0;
  for (std::size_t i = 0; i < dense_rows.size(); ++i) {
    double s = 0.0;
    for (double v : dense_rows[i]) s += v;
    if (s < 0.5)
      fail(ErrorCode::kernel_leakage,
           fmt::format("row {} keeps only {} of its mass in D; check the boundary policy", i, s));
    renorm = std::max(renorm, std::abs(s - 1.0));
  }
  double dropped = 0.0;
  auto rows = threshold_rows(dense_rows, threshold, dropped);
  double ignored = 0.0;
  return Discretization{StochasticMatrix::from_rows_renormalized(partition, std::move(rows), &ignored), renorm,
                        dropped, leaked_max};
}

Discretization discretize_product(const KernelSpec& kernel, const Partition& partition,
                                  const DiscretizeOptions& options) {
  const auto axis = static_cast<std::size_t>(partition.per_axis());
  const double h = partition.h();
  const GaussLegendre rule = gauss_legendre(options.quad.points);

  // Axis matrix A(p, q) = (1/h) int_{bin p} int_{bin q} K1(x, y) dy dx.
  std::vector<double> a(axis * axis, 0.0);
  std::vector<double> leaked(axis, 0.0);
  parallel_for(axis, [&](std::size_t p) {
    std::vector<double> x, w;
    const double lo = -1.0 + static_cast<double>(p) * h;
    composite_rule(rule, lo, lo + h, options.quad.subdivisions, x, w);
    for (std::size_t k = 0; k < x.size(); ++k) {
      leaked[p] = std::max(leaked[p], 1.0 - (kernel.axis_cdf_raw(x[k], 1.0) - kernel.axis_cdf_raw(x[k], -1.0)));
      for (std::size_t q = 0; q < axis; ++q) {
        const double ylo = -1.0 + static_cast<double>(q) * h;
        a[p * axis + q] += w[k] * kernel.axis_interval_mass(x[k], ylo, ylo + h);
      }
    }
    for (std::size_t q = 0; q < axis; ++q) a[p * axis + q] /= h;
  });
  // leakage of the product kernel is 1 - prod(axis masses)
  const double worst_axis = *std::max_element(leaked.begin(), leaked.end());
  const double leaked_max = 1.0 - std::pow(1.0 - worst_axis, partition.dim());
  if (kernel.boundary() == BoundaryPolicy::renormalize_rows && leaked_max > 0.5)
    fail(ErrorCode::kernel_leakage,
         fmt::format("raw kernel keeps only {} of its mass in D; use the reflect boundary", 1.0 - leaked_max));

  const std::size_t n = partition.size();
  const int d = partition.dim();
  std::vector<std::vector<double>> dense_rows(n);
  parallel_for(n, [&](std::size_t i) {
    auto& row = dense_rows[i];
    row.assign(n, 1.0);
    for (int k = 0; k < d; ++k) {
      const auto pi = static_cast<std::size_t>(partition.axis_offset(i, k));
      for (std::size_t j = 0; j < n; ++j)
        row[j] *= a[pi * axis + static_cast<std::size_t>(partition.axis_offset(j, k))];
    }
  });
  return finish(partition, std::move(dense_rows), options.drop_threshold, leaked_max);
}

// Overlaps of target axis bins with reference axis bins, as fractions of the first.
std::vector<std::vector<std::pair<std::size_t, double>>> axis_overlaps(std::int64_t from_inverse,
                                                                       std::int64_t to_inverse) {
  const auto nf = static_cast<std::size_t>(2 * from_inverse);
  const auto nt = static_cast<std::size_t>(2 * to_inverse);
  const double hf = 1.0 / static_cast<double>(from_inverse);
  const double ht = 1.0 / static_cast<double>(to_inverse);
  std::vector<std::vector<std::pair<std::size_t, double>>> out(nf);
  for (std::size_t p = 0; p < nf; ++p) {
    const double lo = -1.0 + static_cast<double>(p) * hf;
    const double hi = lo + hf;
    const auto first = static_cast<std::size_t>(std::max(0.0, std::floor((lo + 1.0) / ht)));
    for (std::size_t q = first; q < nt; ++q) {
      const double qlo = -1.0 + static_cast<double>(q) * ht;
      if (qlo >= hi) break;
      const double overlap = std::min(hi, qlo + ht) - std::max(lo, qlo);
      if (overlap > 0.0) out[p].push_back({q, overlap / hf});
    }
  }
  return out;
}

// Expands per-axis weighted lists into linear indices of a partition.
void expand(const Partition& part, const std::vector<const std::vector<std::pair<std::size_t, double>>*>& lists,
            std::vector<std::pair<std::size_t, double>>& out) {
  out.clear();
  out.push_back({0, 1.0});
  const auto axis = static_cast<std::size_t>(part.per_axis());
  for (const auto* list : lists) {
    std::vector<std::pair<std::size_t, double>> next;
    next.reserve(out.size() * list->size());
    for (const auto& [idx, w] : out)
      for (const auto& [q, f] : *list) next.push_back({idx * axis + q, w * f});
    out.swap(next);
  }
}

Discretization discretize_grid(const KernelSpec& kernel, const Partition& partition, const DiscretizeOptions& options) {
  const StochasticMatrix& m = kernel.grid_matrix();
  const Partition& ref = m.partition();
  if (ref.dim() != partition.dim())
    fail(ErrorCode::invalid_parameter, fmt::format("grid kernel has d={}, target partition has d={}", ref.dim(),
                                                   partition.dim()));
  // Lumping a piecewise-constant kernel at its own resolution is the identity.
  if (ref == partition) return Discretization{m, m.max_row_sum_error(), 0.0, 0.0};

  const auto w_axis = axis_overlaps(partition.resolution().inverse(), ref.resolution().inverse());
  const auto v_axis = axis_overlaps(ref.resolution().inverse(), partition.resolution().inverse());
  const std::size_t n = partition.size();
  const int d = partition.dim();
  std::vector<std::vector<double>> dense_rows(n);
  parallel_for(n, [&](std::size_t i) {
    auto& row = dense_rows[i];
    row.assign(n, 0.0);
    std::vector<const std::vector<std::pair<std::size_t, double>>*> lists(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k)
      lists[static_cast<std::size_t>(k)] = &w_axis[static_cast<std::size_t>(partition.axis_offset(i, k))];
    std::vector<std::pair<std::size_t, double>> sources, targets;
    expand(ref, lists, sources);
    for (const auto& [src, wsrc] : sources) {
      const auto idx = m.row_indices(src);
      const auto val = m.row_values(src);
      for (std::size_t e = 0; e < idx.size(); ++e) {
        const auto b = static_cast<std::size_t>(idx[e]);
        for (int k = 0; k < d; ++k)
          lists[static_cast<std::size_t>(k)] = &v_axis[static_cast<std::size_t>(ref.axis_offset(b, k))];
        expand(partition, lists, targets);
        for (const auto& [j, wt] : targets) row[j] += wsrc * val[e] * wt;
      }
    }
  });
  return finish(partition, std::move(dense_rows), options.drop_threshold, 0.0);
}

}  // namespace

LumpResult lump_density(const DensityFunction& p, const Partition& partition, const QuadratureSpec& quad) {
  const BinRule rule = make_bin_rule(partition.h(), partition.dim(), quad);
  std::vector<double> mass(partition.size(), 0.0);
  parallel_for(partition.size(), [&](std::size_t j) {
    std::vector<double> point;
    double s = 0.0;
    for_each_node(partition, j, rule, point, [&](std::span<const double> x, double w) { s += w * p(x); });
    mass[j] = s;
  });
  for (std::size_t j = 0; j < mass.size(); ++j)
    if (!(mass[j] >= 0.0))
      fail(ErrorCode::bad_density, fmt::format("bin {} integrates to {} (negative density?)", j, mass[j]));
  double delta = 0.0;
  DiscreteDensity pi = DiscreteDensity::normalized(partition, std::move(mass), &delta);
  return LumpResult{std::move(pi), delta};
}

PiecewiseConstantDensity interpolate_density(const DiscreteDensity& pi) {
  const double inv_vol = 1.0 / pi.partition().bin_volume();
  std::vector<double> values(pi.size());
  for (std::size_t j = 0; j < pi.size(); ++j) values[j] = pi[j] * inv_vol;
  return PiecewiseConstantDensity(pi.partition(), std::move(values));
}

DiscreteDensity lump_piecewise(const PiecewiseConstantDensity& p) {
  const double vol = p.partition().bin_volume();
  std::vector<double> mass(p.values().begin(), p.values().end());
  for (double& m : mass) m *= vol;
  return DiscreteDensity::normalized(p.partition(), std::move(mass));
}

InterpolationError interpolation_error(const DensityFunction& p, double lipschitz, const Partition& partition,
                                       const QuadratureSpec& lump_quad, const QuadratureSpec& reference) {
  const auto ph = interpolate_density(lump_density(p, partition, lump_quad).density);
  const BinRule rule = make_bin_rule(partition.h(), partition.dim(), reference);
  std::vector<double> l1(partition.size(), 0.0), linf(partition.size(), 0.0);
  parallel_for(partition.size(), [&](std::size_t j) {
    std::vector<double> point;
    const double v = ph.values()[j];
    for_each_node(partition, j, rule, point, [&](std::span<const double> x, double w) {
      const double e = std::abs(p(x) - v);
      l1[j] += w * e;
      linf[j] = std::max(linf[j], e);
    });
  });
  InterpolationError out;
  for (std::size_t j = 0; j < l1.size(); ++j) {
    out.l1 += l1[j];
    out.linf = std::max(out.linf, linf[j]);
  }
  out.bound = lipschitz * partition.h();
  out.within_bound = out.l1 <= out.bound && out.linf <= out.bound;
  return out;
}

Discretization discretize_kernel(const KernelSpec& kernel, const Partition& partition,
                                 const DiscretizeOptions& options) {
  if (kernel.family() == KernelFamily::grid_defined) return discretize_grid(kernel, partition, options);
  return discretize_product(kernel, partition, options);
}

KernelSpec lift_kernel(const StochasticMatrix& p) { return KernelSpec::grid_defined(p); }

}  // namespace mlmc
