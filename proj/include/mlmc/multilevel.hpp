#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mlmc/kernels.hpp"
#include "mlmc/partition.hpp"
#include "mlmc/spectral.hpp"
#include "mlmc/ulam.hpp"

namespace mlmc {

/// Halving ladder h_max, h_max/2, ..., h_min.
struct LevelSchedule {
  Resolution h_max = Resolution::from_inverse(1);
  Resolution h_min = Resolution::from_inverse(1);
  int r = 0;
  int d = 1;
  std::vector<Resolution> levels;  // coarsest first
};

LevelSchedule build_schedule(Resolution h_max, Resolution h_min, int d);

/// n = ceil(B ln B), B = ln(1/eps) / (sqrt(delta) ln(1/q)); n = ceil(B) when B < e.
std::size_t walk_steps_estimate(double delta, double q, double epsilon);

/// C = m s / (sqrt(delta) ln(1/q)).
double level_cost(double m, double s, double delta, double q);

enum class PipelineMode { classical_emulation, quantum_cost_model };

std::string_view to_string(PipelineMode mode);
PipelineMode parse_pipeline_mode(std::string_view text);

struct PipelineOptions {
  PipelineMode mode = PipelineMode::classical_emulation;
  double target_epsilon = 1e-6;
  DiscretizeOptions discretize{};
  std::size_t state_cap = Partition::default_state_cap;
  double tau_slack = 0.5;
  double residual_slack = 0.5;
  double cost_slack = 0.25;
  /// Growth allowed between consecutive q*delta/h ratios.
  double lemma3_growth = 1.5;
  /// q is floored here before entering ln(1/q).
  double q_floor = 1e-15;
  bool level_checks = true;
};

struct LevelRecord {
  Resolution h = Resolution::from_inverse(1);
  std::size_t n_states = 0;
  double m = 0.0;
  std::size_t s = 0;
  std::size_t nnz = 0;
  double tau = 0.0;
  double delta_eig = 0.0;
  double delta_abs = 0.0;
  bool reversible = false;
  double max_violation = 0.0;
  bool singular_value_fallback = false;
  double stationary_residual = 0.0;
  double q = 0.0;  // measured 1 - fidelity of the start state against the exact pi_h
  double q_used = 0.0;
  double fidelity = 0.0;
  double start_l1 = 0.0;
  std::size_t walk_steps = 0;
  double cost = 0.0;
  // classical emulation
  std::size_t classical_matvecs = 0;
  double classical_cost = 0.0;
  std::size_t cold_matvecs = 0;
  double cold_cost = 0.0;
  bool warm_not_worse = true;
  // transition checks (absent on the coarsest level)
  std::optional<TauComparison> tau_check;
  double residual = 0.0;  // ||pi_hat P_h - pi_hat||_1 with pi_hat = prolong_mass(pi_2h)
  double residual_bound = 0.0;
  bool residual_ok = true;
  std::optional<BauerFike> bauer_fike;
  double bauer_fike_lhs = 0.0;
  double bauer_fike_rhs = 0.0;
  bool bauer_fike_ok = true;
  std::optional<SenetaCheck> seneta;
  double lemma3_ratio = 0.0;  // q delta / h
};

struct TotalCostCheck {
  double c_total = 0.0;
  double c_hmin = 0.0;
  double gamma_hat = 1.0;
  std::vector<double> ratios;  // C_2h / C_h, coarse-to-fine transitions
  double bound = 0.0;          // d sqrt(gamma) / (d - 1) * C_hmin * (1 + slack)
  double bound_gamma = 0.0;    // same with gamma in place of sqrt(gamma)
  double slack = 0.0;
  bool asserted = false;       // false for d = 1
  bool pass = true;
};

/// costs are ordered finest first.
TotalCostCheck total_cost_check(const std::vector<double>& costs, int d, double gamma_hat, double slack = 0.25);

struct PipelineReport {
  LevelSchedule schedule;
  PipelineMode mode = PipelineMode::classical_emulation;
  double target_epsilon = 0.0;
  std::string kernel;
  std::vector<LevelRecord> levels;  // coarsest first
  double gamma_hat = 1.0;
  TotalCostCheck totals;
  double lemma3_constant = 0.0;
  bool lemma3_ok = true;
  double classical_total_cost = 0.0;
  double cold_start_cost = 0.0;
  std::size_t cold_start_matvecs = 0;
  std::vector<std::string> warnings;
  bool pass = true;
};

PipelineReport run_pipeline(const KernelSpec& kernel, const LevelSchedule& schedule,
                            const PipelineOptions& options = {});

TotalCostCheck total_cost_check(const PipelineReport& report, double slack = 0.25);

}  // namespace mlmc
