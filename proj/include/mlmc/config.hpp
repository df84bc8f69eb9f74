#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlmc/kernels.hpp"
#include "mlmc/multilevel.hpp"
#include "mlmc/partition.hpp"
#include "mlmc/quadrature.hpp"

namespace mlmc {

struct KernelConfig {
  KernelFamily family = KernelFamily::gauss_ar1;
  double a = 0.5;
  double sigma = 0.3;
  double w = 1.0;
  BoundaryPolicy boundary = BoundaryPolicy::renormalize_rows;
  std::optional<double> lambda;  // empty means "auto"
  // grid-defined
  Resolution grid_h = Resolution::from_inverse(1);
  std::vector<std::vector<double>> matrix;
};

struct ExperimentConfig {
  KernelConfig kernel;
  Resolution h_max = Resolution::from_inverse(2);
  Resolution h_min = Resolution::from_inverse(16);
  int d = 1;
  PipelineMode mode = PipelineMode::classical_emulation;
  double target_epsilon = 1e-6;
  std::string quadrature_rule = "gauss-legendre";
  QuadratureSpec quadrature{};
  double drop_threshold = 1e-14;
  std::uint64_t seed = 1;
  std::size_t state_cap = Partition::default_state_cap;
  std::size_t walk_cap = 64;
  std::string output_dir = "out";
  double tau_slack = 0.5;
  double residual_slack = 0.5;
  double cost_slack = 0.25;
};

ExperimentConfig default_config();

/// Throws config errors naming the offending field; unknown keys are rejected.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const ExperimentConfig& config);

KernelSpec make_kernel(const ExperimentConfig& config);
LevelSchedule make_schedule(const ExperimentConfig& config);
PipelineOptions pipeline_options(const ExperimentConfig& config);

}  // namespace mlmc
