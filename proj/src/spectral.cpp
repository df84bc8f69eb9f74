#include "mlmc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <random>
#include <utility>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "mlmc/error.hpp"
#include "mlmc/parallel.hpp"
#include "mlmc/simd/kernels.hpp"
#include "mlmc/transfer.hpp"

namespace mlmc {

namespace {

void normalize_in_place(std::vector<double>& v) {
  const double total = simd::sum(v);
  for (double& x : v) x /= total;
}

Eigen::MatrixXd to_eigen(const StochasticMatrix& p) {
  const std::size_t n = p.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto idx = p.row_indices(i);
    const auto val = p.row_values(i);
    for (std::size_t e = 0; e < idx.size(); ++e) m(static_cast<Eigen::Index>(i), idx[e]) = val[e];
  }
  return m;
}

// D^{1/2} P D^{-1/2}
Eigen::MatrixXd symmetrized(const StochasticMatrix& p, std::span<const double> pi) {
  Eigen::MatrixXd s = to_eigen(p);
  const auto n = s.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (s(i, j) != 0.0) s(i, j) *= std::sqrt(pi[i] / pi[j]);
  return s;
}

double max_abs_row_sum(const Eigen::MatrixXcd& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

std::size_t gcd_size(std::size_t a, std::size_t b) { return std::gcd(a, b); }

// Largest eigenvalue of a symmetric positive semidefinite operator restricted
// to the complement of the unit vector u.
template <class Apply>
double deflated_power(std::size_t n, std::span<const double> u, Apply&& apply) {
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> gauss;
  std::vector<double> x(n);
  for (double& v : x) v = gauss(rng);
  auto project = [&](std::vector<double>& v) {
    const double c = simd::dot(v, u);
    simd::axpy(-c, u, v);
    const double norm = std::sqrt(simd::dot(v, v));
    if (norm > 0.0)
      for (double& a : v) a /= norm;
    return norm;
  };
  project(x);
  double mu = 0.0;
  for (int it = 0; it < 200000; ++it) {
    std::vector<double> y = apply(x);
    const double rayleigh = simd::dot(x, y);
    if (project(y) == 0.0) return 0.0;
    x.swap(y);
    if (it > 10 && std::abs(rayleigh - mu) <= 1e-14 * std::max(1.0, std::abs(rayleigh))) return rayleigh;
    mu = rayleigh;
  }
  return mu;
}

void require_positive_mass(std::span<const double> pi) {
  std::vector<std::size_t> empty;
  for (std::size_t j = 0; j < pi.size(); ++j)
    if (!(pi[j] > 0.0)) empty.push_back(j);
  if (empty.empty()) return;
  std::string list;
  for (std::size_t k = 0; k < std::min<std::size_t>(empty.size(), 10); ++k)
    list += fmt::format("{}{}", k ? ", " : "", empty[k]);
  if (empty.size() > 10) list += ", ...";
  fail(ErrorCode::symmetrization,
       fmt::format("stationary density has zero mass in {} bin(s): {}", empty.size(), list));
}

}  // namespace

DiscreteDensity evolve(const DiscreteDensity& pi, const StochasticMatrix& p, std::size_t steps) {
  require_same_partition(pi.partition(), p.partition());
  std::vector<double> cur(pi.mass().begin(), pi.mass().end());
  for (std::size_t s = 0; s < steps; ++s) {
    cur = p.left_multiply(cur);
    normalize_in_place(cur);
  }
  return DiscreteDensity(p.partition(), std::move(cur));
}

double stationary_residual(const StochasticMatrix& p, const DiscreteDensity& pi) {
  require_same_partition(pi.partition(), p.partition());
  const auto next = p.left_multiply(pi.mass());
  return simd::l1_distance(next, pi.mass());
}

PowerIteration power_iterate(const StochasticMatrix& p, const DiscreteDensity& start, double tol,
                             std::size_t max_iterations) {
  require_same_partition(start.partition(), p.partition());
  std::vector<double> cur(start.mass().begin(), start.mass().end());
  std::size_t matvecs = 0;
  double residual = std::numeric_limits<double>::infinity();
  while (matvecs < max_iterations) {
    std::vector<double> next = p.left_multiply(cur);
    ++matvecs;
    residual = simd::l1_distance(next, cur);
    if (residual <= tol) return {DiscreteDensity(p.partition(), std::move(cur)), matvecs, residual, true};
    normalize_in_place(next);
    cur.swap(next);
  }
  return {DiscreteDensity(p.partition(), std::move(cur)), matvecs, residual, false};
}

ChainStructure analyze_structure(const StochasticMatrix& p) {
  const std::size_t n = p.size();
  constexpr std::size_t unvisited = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(n, unvisited), low(n, 0), comp(n, unvisited);
  std::vector<char> on_stack(n, 0);
  std::vector<std::size_t> stack;
  std::size_t counter = 0, classes = 0;

  auto successors = [&](std::size_t v) { return p.row_indices(v); };

  // iterative Tarjan
  std::vector<std::pair<std::size_t, std::size_t>> call;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [v, edge] = call.back();
      const auto next = successors(v);
      const auto vals = p.row_values(v);
      if (edge < next.size()) {
        const std::size_t e = edge++;
        if (!(vals[e] > 0.0)) continue;
        const auto w = static_cast<std::size_t>(next[e]);
        if (index[w] == unvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const std::size_t done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      if (low[done] == index[done]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = classes;
        } while (w != done);
        ++classes;
      }
    }
  }

  std::vector<char> closed(classes, 1);
  for (std::size_t v = 0; v < n; ++v) {
    const auto idx = p.row_indices(v);
    const auto vals = p.row_values(v);
    for (std::size_t e = 0; e < idx.size(); ++e)
      if (vals[e] > 0.0 && comp[static_cast<std::size_t>(idx[e])] != comp[v]) closed[comp[v]] = 0;
  }
  ChainStructure out;
  out.classes = classes;
  std::size_t closed_id = unvisited;
  for (std::size_t c = 0; c < classes; ++c)
    if (closed[c]) {
      ++out.closed_classes;
      closed_id = c;
    }
  out.irreducible = classes == 1;
  if (out.closed_classes != 1) return out;

  // period of the closed class: gcd of level differences along its edges
  std::vector<std::size_t> level(n, unvisited);
  std::size_t root = 0;
  while (comp[root] != closed_id) ++root;
  std::vector<std::size_t> queue{root};
  level[root] = 0;
  std::size_t period = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t v = queue[head];
    const auto idx = p.row_indices(v);
    const auto vals = p.row_values(v);
    for (std::size_t e = 0; e < idx.size(); ++e) {
      if (!(vals[e] > 0.0)) continue;
      const auto w = static_cast<std::size_t>(idx[e]);
      if (level[w] == unvisited) {
        level[w] = level[v] + 1;
        queue.push_back(w);
      } else {
        const auto a = level[v] + 1, b = level[w];
        period = gcd_size(period, a > b ? a - b : b - a);
      }
    }
  }
  out.period = period;
  out.aperiodic = period == 1;
  return out;
}

DiscreteDensity stationary_density_direct(const StochasticMatrix& p) {
  const std::size_t n = p.size();
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd a = to_eigen(p).transpose();
  a.diagonal().array() -= 1.0;
  a.row(ni - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(ni);
  b(ni - 1) = 1.0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  if (!(lu.rcond() > 1e-13)) fail(ErrorCode::not_unique, "stationary density is not unique");
  const Eigen::VectorXd x = lu.solve(b);
  std::vector<double> mass(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double v = x(static_cast<Eigen::Index>(j));
    if (v < -1e-9) fail(ErrorCode::not_unique, fmt::format("direct solve produced negative mass {} in bin {}", v, j));
    mass[j] = std::max(v, 0.0);
  }
  return DiscreteDensity::normalized(p.partition(), std::move(mass));
}

DiscreteDensity stationary_density(const StochasticMatrix& p, double tol) {
  const auto structure = analyze_structure(p);
  if (structure.closed_classes != 1)
    fail(ErrorCode::not_unique,
         fmt::format("stationary density not unique: chain has {} closed classes", structure.closed_classes));
  const bool dense_ok = p.size() <= dense_fallback_states;
  if (!structure.aperiodic) {
    if (dense_ok) return stationary_density_direct(p);
    fail(ErrorCode::no_convergence,
         fmt::format("power iteration cannot converge: closed class has period {}", structure.period));
  }
  auto run = power_iterate(p, DiscreteDensity::uniform(p.partition()), tol);
  if (run.converged) return std::move(run.density);
  if (dense_ok) return stationary_density_direct(p);
  fail(ErrorCode::no_convergence,
       fmt::format("power iteration stopped after {} steps with residual {:.3e}", run.matvecs, run.residual));
}

double dobrushin_tau(const StochasticMatrix& p) {
  const std::size_t n = p.size();
  if (n < 2) return 0.0;
  std::vector<double> row_max(n, 0.0);
  if (n <= 4096) {
    const std::vector<double> dense = p.dense();
    parallel_for(n, [&](std::size_t i) {
      const std::span<const double> a(dense.data() + i * n, n);
      double best = 0.0;
      for (std::size_t k = i + 1; k < n; ++k)
        best = std::max(best, simd::l1_distance(a, std::span<const double>(dense.data() + k * n, n)));
      row_max[i] = best;
    });
  } else {
    parallel_for(n, [&](std::size_t i) {
      const auto ai = p.row_indices(i);
      const auto av = p.row_values(i);
      double best = 0.0;
      for (std::size_t k = i + 1; k < n; ++k) {
        const auto bi = p.row_indices(k);
        const auto bv = p.row_values(k);
        double dist = 0.0;
        std::size_t x = 0, y = 0;
        while (x < ai.size() || y < bi.size()) {
          if (y == bi.size() || (x < ai.size() && ai[x] < bi[y])) {
            dist += std::abs(av[x++]);
          } else if (x == ai.size() || bi[y] < ai[x]) {
            dist += std::abs(bv[y++]);
          } else {
            dist += std::abs(av[x++] - bv[y++]);
          }
        }
        best = std::max(best, dist);
      }
      row_max[i] = best;
    });
  }
  return std::min(1.0, 0.5 * *std::max_element(row_max.begin(), row_max.end()));
}

TauSampling sample_tau_quotients(const StochasticMatrix& p, std::size_t samples, std::uint64_t seed) {
  const std::size_t n = p.size();
  TauSampling out;
  if (n < 2) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<double> v(n);
  for (std::size_t s = 0; s < samples; ++s) {
    if (s % 2 == 0) {
      for (double& x : v) x = gauss(rng);
      const double mean = simd::sum(v) / static_cast<double>(n);
      for (double& x : v) x -= mean;
    } else {
      std::fill(v.begin(), v.end(), 0.0);
      const std::size_t i = pick(rng);
      std::size_t k = pick(rng);
      while (k == i) k = pick(rng);
      v[i] = 1.0;
      v[k] = -1.0;
    }
    double norm = 0.0;
    for (double x : v) norm += std::abs(x);
    if (norm == 0.0) continue;
    const auto w = p.left_multiply(v);
    double image = 0.0;
    for (double x : w) image += std::abs(x);
    out.max_quotient = std::max(out.max_quotient, image / norm);
    ++out.samples;
  }
  return out;
}

Reversibility check_reversibility(const StochasticMatrix& p, const DiscreteDensity& pi, double tol) {
  require_same_partition(pi.partition(), p.partition());
  const std::size_t n = p.size();
  std::vector<double> worst(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    const auto idx = p.row_indices(i);
    const auto val = p.row_values(i);
    double w = 0.0;
    for (std::size_t e = 0; e < idx.size(); ++e) {
      const auto j = static_cast<std::size_t>(idx[e]);
      w = std::max(w, std::abs(pi[i] * val[e] - pi[j] * p.at(j, i)));
    }
    worst[i] = w;
  });
  const double v = worst.empty() ? 0.0 : *std::max_element(worst.begin(), worst.end());
  return {v <= tol, v};
}

SpectralGap spectral_gap(const StochasticMatrix& p, const DiscreteDensity& pi) {
  require_same_partition(pi.partition(), p.partition());
  require_positive_mass(pi.mass());
  const std::size_t n = p.size();
  SpectralGap out;
  const auto rev = check_reversibility(p, pi);
  out.reversible = rev.reversible;
  out.max_violation = rev.max_violation;
  out.singular_value_fallback = !rev.reversible;
  if (n == 1) {
    out.delta = out.delta_abs = 1.0;
    return out;
  }

  if (n <= dense_eigen_states) {
    const Eigen::MatrixXd s = symmetrized(p, pi.mass());
    const auto ni = static_cast<Eigen::Index>(n);
    if (rev.reversible) {
      const Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
      out.lambda2 = eig.eigenvalues()(ni - 2);
      out.lambda_min = eig.eigenvalues()(0);
    } else {
      Eigen::BDCSVD<Eigen::MatrixXd> svd(s);
      out.lambda2 = svd.singularValues()(1);
      out.lambda_min = -out.lambda2;
    }
  } else {
    std::vector<double> u(n), inv_sqrt(n);
    for (std::size_t j = 0; j < n; ++j) {
      u[j] = std::sqrt(pi[j]);
      inv_sqrt[j] = 1.0 / u[j];
    }
    auto apply_s = [&](const std::vector<double>& x) {
      std::vector<double> t(n);
      for (std::size_t j = 0; j < n; ++j) t[j] = x[j] * inv_sqrt[j];
      auto y = p.right_multiply(t);
      for (std::size_t j = 0; j < n; ++j) y[j] *= u[j];
      return y;
    };
    auto apply_st = [&](const std::vector<double>& x) {
      std::vector<double> t(n);
      for (std::size_t j = 0; j < n; ++j) t[j] = x[j] * u[j];
      auto y = p.left_multiply(t);
      for (std::size_t j = 0; j < n; ++j) y[j] *= inv_sqrt[j];
      return y;
    };
    if (rev.reversible) {
      auto shifted = [&](double sign) {
        return [&, sign](const std::vector<double>& x) {
          const auto a = apply_s(x);
          const auto b = apply_st(x);
          std::vector<double> y(n);
          for (std::size_t j = 0; j < n; ++j) y[j] = 0.5 * (x[j] + sign * 0.5 * (a[j] + b[j]));
          return y;
        };
      };
      out.lambda2 = 2.0 * deflated_power(n, u, shifted(1.0)) - 1.0;
      out.lambda_min = 1.0 - 2.0 * deflated_power(n, u, shifted(-1.0));
    } else {
      const double top = deflated_power(n, u, [&](const std::vector<double>& x) { return apply_st(apply_s(x)); });
      out.lambda2 = std::sqrt(std::max(0.0, top));
      out.lambda_min = -out.lambda2;
    }
  }
  out.delta = std::clamp(1.0 - out.lambda2, 0.0, 1.0);
  out.delta_abs = std::clamp(1.0 - std::max(std::abs(out.lambda2), std::abs(out.lambda_min)), 0.0, 1.0);
  return out;
}

Overlap overlap(const DiscreteDensity& a, const DiscreteDensity& b) {
  require_same_partition(a.partition(), b.partition());
  Overlap out;
  out.fidelity = simd::sqrt_product_sum(a.mass(), b.mass());
  out.q = 1.0 - out.fidelity;
  out.l1 = simd::l1_distance(a.mass(), b.mass());
  out.hellinger_ok = out.q <= 0.5 * out.l1 + 1e-15;
  return out;
}

double variation_estimate(const PiecewiseConstantDensity& p) {
  const LevelPair levels(p.partition());
  const auto values = p.values();
  double worst = 0.0;
  for (std::size_t k = 0; k < levels.coarse().size(); ++k) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i : levels.children(k)) {
      lo = std::min(lo, values[i]);
      hi = std::max(hi, values[i]);
    }
    worst = std::max(worst, hi - lo);
  }
  return worst / p.partition().h();
}

double kernel_variation_estimate(const StochasticMatrix& p) {
  const LevelPair levels(p.partition());
  const std::size_t n = p.size();
  const double scale = 1.0 / p.partition().bin_volume();
  const std::size_t full = levels.children_per_parent();
  std::vector<double> per_row(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    const auto idx = p.row_indices(i);
    const auto val = p.row_values(i);
    std::vector<std::pair<std::size_t, double>> entries(idx.size());
    for (std::size_t e = 0; e < idx.size(); ++e)
      entries[e] = {levels.parent(static_cast<std::size_t>(idx[e])), val[e] * scale};
    std::sort(entries.begin(), entries.end());
    double worst = 0.0;
    for (std::size_t a = 0; a < entries.size();) {
      std::size_t b = a;
      double lo = entries[a].second, hi = lo;
      while (b < entries.size() && entries[b].first == entries[a].first) {
        lo = std::min(lo, entries[b].second);
        hi = std::max(hi, entries[b].second);
        ++b;
      }
      if (b - a < full) lo = std::min(lo, 0.0);
      worst = std::max(worst, hi - lo);
      a = b;
    }
    per_row[i] = worst;
  });
  return *std::max_element(per_row.begin(), per_row.end()) / p.partition().h();
}

TauComparison tau_level_comparison(const StochasticMatrix& p_h, const StochasticMatrix& p_2h, double slack) {
  require_dyadic_pair(p_h.partition(), p_2h.partition());
  TauComparison out;
  out.tau_h = dobrushin_tau(p_h);
  out.tau_2h = dobrushin_tau(p_2h);
  out.diff = std::abs(out.tau_h - out.tau_2h);
  out.lambda_hat = kernel_variation_estimate(p_h);
  out.bound = out.lambda_hat * p_h.partition().h();
  out.slack = slack;
  out.pass = out.diff <= out.bound * (1.0 + slack) + 1e-12;
  return out;
}

SenetaCheck seneta_bound_check(const StochasticMatrix& p, const StochasticMatrix& p_hat) {
  require_same_partition(p.partition(), p_hat.partition());
  const auto pi = stationary_density(p);
  const auto pi_hat = stationary_density(p_hat);
  SenetaCheck out;
  out.lhs = simd::l1_distance(pi_hat.mass(), pi.mass());
  out.perturbation = max_row_l1_distance(p, p_hat);
  out.tau = dobrushin_tau(p);
  const double inf = std::numeric_limits<double>::infinity();
  out.rhs = out.tau < 1.0 ? out.perturbation / (1.0 - out.tau) : inf;
  double delta = 0.0;
  try {
    delta = spectral_gap(p, pi).delta;
  } catch (const Error&) {
  }
  out.rhs_eigen = delta > 0.0 ? out.perturbation / delta : inf;
  out.pass = out.lhs <= out.rhs + 1e-12;
  return out;
}

std::optional<BauerFike> bauer_fike_constant(const StochasticMatrix& p, const DiscreteDensity& pi) {
  require_same_partition(pi.partition(), p.partition());
  const std::size_t n = p.size();
  if (n > dense_fallback_states) return std::nullopt;
  if (n == 1) return BauerFike{1.0, 1.0};
  BauerFike out;
  const bool positive = std::all_of(pi.mass().begin(), pi.mass().end(), [](double v) { return v > 0.0; });
  if (positive && check_reversibility(p, pi).reversible) {
    const Eigen::MatrixXd s = symmetrized(p, pi.mass());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (s + s.transpose()));
    const auto& q = eig.eigenvectors();
    const auto ni = static_cast<Eigen::Index>(n);
    Eigen::VectorXd sq(ni);
    for (Eigen::Index j = 0; j < ni; ++j) sq(j) = std::sqrt(pi[static_cast<std::size_t>(j)]);
    const Eigen::MatrixXd v = sq.cwiseInverse().asDiagonal() * q;
    const Eigen::MatrixXd v_inv = q.transpose() * sq.asDiagonal();
    out.constant = v.cwiseAbs().rowwise().sum().maxCoeff() * v_inv.cwiseAbs().rowwise().sum().maxCoeff();
    out.gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k + 1 < ni; ++k) out.gap = std::min(out.gap, std::abs(1.0 - eig.eigenvalues()(k)));
    return out;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> eig(to_eigen(p));
  if (eig.info() != Eigen::Success) return std::nullopt;
  const Eigen::MatrixXcd v = eig.eigenvectors();
  const Eigen::MatrixXcd v_inv = v.inverse();
  out.constant = max_abs_row_sum(v) * max_abs_row_sum(v_inv);
  const auto& lambda = eig.eigenvalues();
  Eigen::Index top = 0;
  for (Eigen::Index k = 1; k < lambda.size(); ++k)
    if (std::abs(1.0 - lambda(k)) < std::abs(1.0 - lambda(top))) top = k;
  out.gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < lambda.size(); ++k)
    if (k != top) out.gap = std::min(out.gap, std::abs(1.0 - lambda(k)));
  return out;
}

SpectralReport spectral_report(const StochasticMatrix& p) {
  auto pi = stationary_density(p);
  SpectralReport out{pi, stationary_residual(p, pi), spectral_gap(p, pi), 0.0, 0.0, 0.0, std::nullopt};
  out.tau = dobrushin_tau(p);
  out.delta_tau = 1.0 - out.tau;
  if (p.partition().resolution().can_coarsen()) out.lambda_hat = kernel_variation_estimate(p);
  out.bauer_fike = bauer_fike_constant(p, pi);
  return out;
}

}  // namespace mlmc
