#include "mlmc/multilevel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "mlmc/error.hpp"
#include "mlmc/transfer.hpp"

namespace mlmc {

// absolute slack for checks whose bound is exactly zero (lifted chains, exact warm starts)
constexpr double roundoff = 1e-12;

LevelSchedule build_schedule(Resolution h_max, Resolution h_min, int d) {
  if (d < 1) fail(ErrorCode::invalid_parameter, fmt::format("schedule.d must be >= 1, got {}", d));
  const std::int64_t coarse = h_max.inverse(), fine = h_min.inverse();
  if (fine % coarse != 0 || !std::has_single_bit(static_cast<std::uint64_t>(fine / coarse)))
    fail(ErrorCode::invalid_level,
         fmt::format("schedule.h_min: h_max/h_min = {}/{} is not a power of two", h_max.str(), h_min.str()));
  const int r = std::countr_zero(static_cast<std::uint64_t>(fine / coarse));
  if (r < 1) fail(ErrorCode::invalid_level, fmt::format("schedule needs at least one halving, got h_max = h_min = {}", h_max.str()));
  LevelSchedule s;
  s.h_max = h_max;
  s.h_min = h_min;
  s.r = r;
  s.d = d;
  for (Resolution h = h_max;; h = h.finer()) {
    s.levels.push_back(h);
    if (h == h_min) break;
  }
  return s;
}

std::size_t walk_steps_estimate(double delta, double q, double epsilon) {
  if (!(delta > 0.0 && delta <= 1.0))
    fail(ErrorCode::invalid_parameter, fmt::format("walk steps need delta in (0, 1], got {}", delta));
  if (!(q > 0.0 && q < 1.0)) fail(ErrorCode::invalid_parameter, fmt::format("walk steps need q in (0, 1), got {}", q));
  if (!(epsilon > 0.0 && epsilon < 1.0))
    fail(ErrorCode::invalid_parameter, fmt::format("walk steps need epsilon in (0, 1), got {}", epsilon));
  const double b = std::log(1.0 / epsilon) / (std::sqrt(delta) * std::log(1.0 / q));
  const double n = b < std::numbers::e ? b : b * std::log(b);
  // guard against 1.0000000000000002 style round-up
  return static_cast<std::size_t>(std::ceil(n - 1e-12 * std::max(1.0, n)));
}

double level_cost(double m, double s, double delta, double q) {
  if (!(m >= 1.0) || !(s >= 1.0)) fail(ErrorCode::invalid_parameter, fmt::format("level cost needs m, s >= 1, got {}, {}", m, s));
  if (!(delta > 0.0 && delta <= 1.0))
    fail(ErrorCode::invalid_parameter, fmt::format("level cost needs delta in (0, 1], got {}", delta));
  if (!(q > 0.0 && q < 1.0)) fail(ErrorCode::invalid_parameter, fmt::format("level cost needs q in (0, 1), got {}", q));
  return m * s / (std::sqrt(delta) * std::log(1.0 / q));
}

std::string_view to_string(PipelineMode mode) {
  return mode == PipelineMode::classical_emulation ? "classical-emulation" : "quantum-cost-model";
}

PipelineMode parse_pipeline_mode(std::string_view text) {
  if (text == "classical-emulation") return PipelineMode::classical_emulation;
  if (text == "quantum-cost-model") return PipelineMode::quantum_cost_model;
  fail(ErrorCode::config, fmt::format("mode: unknown value '{}' (classical-emulation | quantum-cost-model)", text));
}

TotalCostCheck total_cost_check(const std::vector<double>& costs, int d, double gamma_hat, double slack) {
  TotalCostCheck out;
  out.slack = slack;
  out.gamma_hat = gamma_hat;
  if (costs.empty()) return out;
  for (double c : costs) out.c_total += c;
  out.c_hmin = costs.front();
  for (std::size_t k = 0; k + 1 < costs.size(); ++k) out.ratios.push_back(costs[k + 1] / costs[k]);
  out.asserted = d > 1 && costs.size() > 1;
  if (d > 1) {
    const double factor = static_cast<double>(d) / static_cast<double>(d - 1) * out.c_hmin * (1.0 + slack);
    out.bound = factor * std::sqrt(gamma_hat);
    out.bound_gamma = factor * gamma_hat;
  } else {
    out.bound = out.bound_gamma = std::numeric_limits<double>::infinity();
  }
  out.pass = !out.asserted || out.c_total <= out.bound;
  return out;
}

TotalCostCheck total_cost_check(const PipelineReport& report, double slack) {
  std::vector<double> costs;
  for (auto it = report.levels.rbegin(); it != report.levels.rend(); ++it) costs.push_back(it->cost);
  return total_cost_check(costs, report.schedule.d, report.gamma_hat, slack);
}

namespace {

std::string describe(const KernelSpec& k) {
  switch (k.family()) {
    case KernelFamily::gauss_ar1:
      return fmt::format("gauss-ar1(a={}, sigma={}, boundary={})", k.a(), k.sigma(), to_string(k.boundary()));
    case KernelFamily::uniform_window:
      return fmt::format("uniform-window(w={}, boundary={})", k.width(), to_string(k.boundary()));
    case KernelFamily::grid_defined:
      return fmt::format("grid-defined(h={}, d={})", k.grid_matrix().partition().resolution().str(),
                         k.grid_matrix().partition().dim());
  }
  return "unknown";
}

[[noreturn]] void rethrow_for_level(const Error& e, Resolution h) {
  fail(e.code(), fmt::format("level h={}: {}", h.str(), e.what()));
}

}  // namespace

PipelineReport run_pipeline(const KernelSpec& kernel, const LevelSchedule& schedule, const PipelineOptions& options) {
  if (!(options.target_epsilon > 0.0 && options.target_epsilon < 1.0))
    fail(ErrorCode::invalid_parameter, fmt::format("target_epsilon must lie in (0, 1), got {}", options.target_epsilon));
  const bool classical = options.mode == PipelineMode::classical_emulation;
  const int d = schedule.d;
  const std::size_t count = schedule.levels.size();

  PipelineReport report;
  report.schedule = schedule;
  report.mode = options.mode;
  report.target_epsilon = options.target_epsilon;
  report.kernel = describe(kernel);

  // matrices, finest discretized, the rest by exact coarsening
  std::vector<std::optional<StochasticMatrix>> matrices(count);
  {
    std::optional<Partition> finest;
    try {
      finest.emplace(schedule.h_min, d, options.state_cap);
    } catch (const Error& e) {
      rethrow_for_level(e, schedule.h_min);
    }
    matrices[count - 1] = discretize_kernel(kernel, *finest, options.discretize).matrix;
    for (std::size_t k = count - 1; k > 0; --k) {
      const LevelPair pair(matrices[k]->partition());
      matrices[k - 1] = coarsen_matrix(pair, *matrices[k]);
    }
  }

  std::optional<DiscreteDensity> carried;   // density handed to the next level
  std::optional<DiscreteDensity> exact_prev;
  report.levels.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    const StochasticMatrix& p = *matrices[k];
    const Partition& part = p.partition();
    LevelRecord& rec = report.levels[k];
    rec.h = schedule.levels[k];
    rec.n_states = p.size();
    rec.m = static_cast<double>(d) * std::log2(2.0 * static_cast<double>(rec.h.inverse()));
    rec.s = p.sparsity();
    rec.nnz = p.nnz();

    DiscreteDensity exact = [&] {
      try {
        return stationary_density_direct(p);
      } catch (const Error& e) {
        rethrow_for_level(e, rec.h);
      }
    }();
    rec.stationary_residual = stationary_residual(p, exact);
    const auto gap = spectral_gap(p, exact);
    rec.delta_eig = gap.delta;
    rec.delta_abs = gap.delta_abs;
    rec.reversible = gap.reversible;
    rec.max_violation = gap.max_violation;
    rec.singular_value_fallback = gap.singular_value_fallback;
    if (!gap.reversible)
      report.warnings.push_back(fmt::format("level h={}: detailed-balance violation {:.3e}; singular-value gap used",
                                            rec.h.str(), gap.max_violation));
    rec.tau = dobrushin_tau(p);

    const DiscreteDensity start =
        k == 0 ? DiscreteDensity::uniform(part) : prolong_mass(LevelPair(part), *carried);
    const auto ov = overlap(exact, start);
    rec.q = ov.q;
    rec.fidelity = ov.fidelity;
    rec.start_l1 = ov.l1;
    rec.q_used = std::clamp(rec.q, options.q_floor, 1.0 - options.q_floor);
    if (rec.delta_eig > 0.0) {
      rec.walk_steps = walk_steps_estimate(rec.delta_eig, rec.q_used, options.target_epsilon);
      rec.cost = level_cost(rec.m, static_cast<double>(rec.s), rec.delta_eig, rec.q_used);
    } else {
      rec.walk_steps = 0;
      rec.cost = std::numeric_limits<double>::infinity();
      report.warnings.push_back(fmt::format("level h={}: zero spectral gap", rec.h.str()));
    }

    if (classical) {
      auto warm = power_iterate(p, start, options.target_epsilon);
      rec.classical_matvecs = warm.matvecs;
      rec.classical_cost = static_cast<double>(warm.matvecs) * static_cast<double>(rec.nnz);
      if (!warm.converged)
        report.warnings.push_back(fmt::format("level h={}: power iteration did not converge", rec.h.str()));
      const auto cold = k == 0 ? warm : power_iterate(p, DiscreteDensity::uniform(part), options.target_epsilon);
      rec.cold_matvecs = cold.matvecs;
      rec.cold_cost = static_cast<double>(cold.matvecs) * static_cast<double>(rec.nnz);
      rec.warm_not_worse = rec.classical_matvecs <= rec.cold_matvecs;
      report.classical_total_cost += rec.classical_cost;
      carried = std::move(warm.density);
    } else {
      carried = exact;
    }

    if (k > 0 && options.level_checks) {
      const StochasticMatrix& coarse = *matrices[k - 1];
      const LevelPair pair(part);
      rec.tau_check = tau_level_comparison(p, coarse, options.tau_slack);
      const DiscreteDensity pi_hat = prolong_mass(pair, *exact_prev);
      rec.residual = stationary_residual(p, pi_hat);
      rec.residual_bound = rec.tau_check->bound * (1.0 + options.residual_slack);
      rec.residual_ok = rec.residual <= rec.residual_bound + roundoff;
      rec.bauer_fike = bauer_fike_constant(p, exact);
      if (rec.bauer_fike) {
        rec.bauer_fike_lhs = overlap(pi_hat, exact).l1;
        rec.bauer_fike_rhs = rec.bauer_fike->constant * rec.residual / rec.bauer_fike->gap;
        rec.bauer_fike_ok = rec.bauer_fike_lhs <= rec.bauer_fike_rhs * (1.0 + 1e-9) + 1e-14;
      }
      rec.seneta = seneta_bound_check(p, lift_matrix(pair, coarse));
    }
    rec.lemma3_ratio = rec.q * rec.delta_eig / rec.h.value();
    exact_prev = std::move(exact);
  }

  if (classical) {
    report.cold_start_matvecs = report.levels.back().cold_matvecs;
    report.cold_start_cost = report.levels.back().cold_cost;
  }

  report.gamma_hat = 0.0;
  for (std::size_t k = 1; k < count; ++k) {
    const double prev = report.levels[k - 1].delta_eig, cur = report.levels[k].delta_eig;
    report.gamma_hat = std::max(report.gamma_hat, prev > 0.0 ? cur / prev : std::numeric_limits<double>::infinity());
  }
  report.totals = total_cost_check(report, options.cost_slack);

  // q delta / h over the transitions must not grow by more than the allowed factor
  for (std::size_t k = 1; k < count; ++k) {
    const auto& rec = report.levels[k];
    report.lemma3_constant = std::max(report.lemma3_constant, rec.lemma3_ratio);
    if (!std::isfinite(rec.lemma3_ratio)) report.lemma3_ok = false;
    if (k > 1 && rec.lemma3_ratio > options.lemma3_growth * report.levels[k - 1].lemma3_ratio + roundoff)
      report.lemma3_ok = false;
  }

  report.pass = report.totals.pass && report.lemma3_ok;
  for (std::size_t k = 1; k < count; ++k) {
    const auto& rec = report.levels[k];
    if (rec.tau_check && !rec.tau_check->pass) report.pass = false;
    if (!rec.residual_ok || !rec.bauer_fike_ok) report.pass = false;
    if (rec.seneta && !rec.seneta->pass) report.pass = false;
    if (classical && !rec.warm_not_worse) report.pass = false;
  }
  return report;
}

}  // namespace mlmc
