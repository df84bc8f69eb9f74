// mlmc: discretize | pipeline | walk-check | verify | print-config

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mlmc/config.hpp"
#include "mlmc/error.hpp"
#include "mlmc/io.hpp"
#include "mlmc/multilevel.hpp"
#include "mlmc/spectral.hpp"
#include "mlmc/szegedy.hpp"
#include "mlmc/transfer.hpp"
#include "mlmc/ulam.hpp"
#include "mlmc/verify.hpp"

namespace fs = std::filesystem;
using namespace mlmc;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_runtime = 1;
constexpr int exit_config = 2;
constexpr int exit_capacity = 3;
constexpr int exit_bound = 4;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::capacity: return exit_capacity;
    case ErrorCode::config:
    case ErrorCode::invalid_resolution:
    case ErrorCode::invalid_level:
    case ErrorCode::invalid_parameter:
    case ErrorCode::kernel_leakage:
    case ErrorCode::bad_density:
    case ErrorCode::not_normalized:
    case ErrorCode::partition_mismatch: return exit_config;
    default: return exit_runtime;
  }
}

struct Common {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> cap;
};

ExperimentConfig load(const Common& c) {
  ExperimentConfig cfg = c.config_path.empty() ? default_config() : load_config(c.config_path);
  if (c.seed) cfg.seed = *c.seed;
  if (c.cap) cfg.state_cap = *c.cap;
  if (!c.out_dir.empty()) cfg.output_dir = c.out_dir;
  return cfg;
}

std::string level_stem(Resolution h) { return h.inverse() == 1 ? "level_1" : fmt::format("level_1-{}", h.inverse()); }

int cmd_discretize(const Common& common) {
  const auto cfg = load(common);
  if (cfg.h_min > cfg.h_max)
    fail(ErrorCode::config, fmt::format("schedule.h_min: {} is coarser than h_max {}", cfg.h_min.str(), cfg.h_max.str()));
  const std::int64_t ratio = cfg.h_min.inverse() / cfg.h_max.inverse();
  if (cfg.h_min.inverse() % cfg.h_max.inverse() != 0 || (ratio & (ratio - 1)) != 0)
    fail(ErrorCode::config, fmt::format("schedule.h_min: h_max/h_min = {}/{} is not a power of two", cfg.h_max.str(),
                                        cfg.h_min.str()));
  const auto kernel = make_kernel(cfg);
  auto opts = pipeline_options(cfg).discretize;
  for (Resolution h = cfg.h_max;; h = h.finer()) {
    std::optional<Partition> part;
    try {
      part.emplace(h, cfg.d, cfg.state_cap);
    } catch (const Error& e) {
      fail(e.code(), fmt::format("level h={}: {}", h.str(), e.what()));
    }
    const auto disc = discretize_kernel(kernel, *part, opts);
    const auto& p = disc.matrix;
    nlohmann::json header = {{"partition", to_json(*part)},
                             {"kernel", to_json(cfg)["kernel"]},
                             {"threshold", opts.drop_threshold},
                             {"quadrature", {{"rule", cfg.quadrature_rule}, {"points", opts.quad.points},
                                             {"subdivisions", opts.quad.subdivisions}}},
                             {"renorm_max_delta", disc.renorm_max_delta},
                             {"dropped_max", disc.dropped_max},
                             {"leaked_max", disc.leaked_max},
                             {"n_states", p.size()},
                             {"nnz", p.nnz()},
                             {"s", p.sparsity()}};
    const fs::path dir(cfg.output_dir);
    write_text(dir / (level_stem(h) + ".csv"), matrix_csv(p));
    write_text(dir / (level_stem(h) + ".json"), header.dump(2) + "\n");
    fmt::print("h={} n_states={} nnz={} s={} -> {}\n", h.str(), p.size(), p.nnz(), p.sparsity(),
               (dir / (level_stem(h) + ".csv")).string());
    if (h == cfg.h_min) break;
  }
  return exit_ok;
}

int cmd_pipeline(const Common& common) {
  const auto cfg = load(common);
  const auto report = run_pipeline(make_kernel(cfg), make_schedule(cfg), pipeline_options(cfg));
  const fs::path dir(cfg.output_dir);
  write_text(dir / "report.json", to_json(report).dump(2) + "\n");
  write_text(dir / "levels.csv", pipeline_csv(report));
  for (const auto& w : report.warnings) fmt::print(stderr, "warning: {}\n", w);
  fmt::print("{}", pipeline_csv(report));
  fmt::print("C_total={} bound={} gamma_hat={} asserted={}\n", format_double(report.totals.c_total),
             format_double(report.totals.bound), format_double(report.gamma_hat), report.totals.asserted);
  if (report.mode == PipelineMode::classical_emulation)
    fmt::print("classical multilevel cost={} cold start cost={}\n", format_double(report.classical_total_cost),
               format_double(report.cold_start_cost));
  fmt::print("{}\n", report.pass ? "all bound checks passed" : "bound check FAILED");
  return report.pass ? exit_ok : exit_bound;
}

int cmd_walk_check(const Common& common, std::size_t steps) {
  const auto cfg = load(common);
  Partition part(cfg.h_max, cfg.d, cfg.state_cap);
  if (part.size() > cfg.walk_cap)
    fail(ErrorCode::capacity,
         fmt::format("level h={}: {} states exceed caps.walk_states = {}", cfg.h_max.str(), part.size(), cfg.walk_cap));
  const auto p = discretize_kernel(make_kernel(cfg), part, pipeline_options(cfg).discretize).matrix;
  const auto pi = stationary_density_direct(p);
  const auto spectrum = walk_spectrum_check(p, pi, cfg.walk_cap);
  const auto walk = build_walk(p, cfg.walk_cap);
  const auto target = walk_target_state(walk, pi.mass());
  std::vector<double> uniform(p.size(), 1.0 / std::sqrt(static_cast<double>(p.size())));
  const auto trace = walk_evolve(walk, walk_lift_state(walk, uniform), steps, target);
  const fs::path dir(cfg.output_dir);
  auto doc = to_json(spectrum);
  doc["h"] = cfg.h_max.str();
  doc["n_states"] = p.size();
  doc["max_norm_drift"] = trace.max_norm_drift;
  write_text(dir / "walk_spectrum.json", doc.dump(2) + "\n");
  write_text(dir / "walk_trace.csv", walk_trace_csv(trace));
  if (spectrum.skipped) {
    fmt::print(stderr, "warning: {}\n", spectrum.diagnostic);
    return exit_ok;
  }
  const bool ok = spectrum.cos_match_error <= 1e-9 && spectrum.unitarity_error <= 1e-10 && spectrum.gap_ok;
  fmt::print("n={} cos_match_error={:.3e} unitarity_error={:.3e} phase_gap={} sqrt(2 delta)={} {}\n", p.size(),
             spectrum.cos_match_error, spectrum.unitarity_error, spectrum.phase_gap, std::sqrt(2 * spectrum.delta),
             ok ? "PASS" : "FAIL");
  return ok ? exit_ok : exit_bound;
}

int cmd_verify(const Common& common, const std::string& suite) {
  const auto cfg = load(common);
  VerifyOptions opts;
  opts.seed = cfg.seed;
  std::vector<CheckResult> results;
  for (auto check : suite_checks(suite)) {
    results.push_back(check(opts));
    const auto& r = results.back();
    fmt::print("{} [{}] {}: {} ({:.2f} s)\n", r.pass ? "PASS" : "FAIL", r.criterion, r.id, r.description, r.seconds);
    std::fflush(stdout);
  }
  const auto report = suite_report(suite, results);
  write_text(fs::path(cfg.output_dir) / fmt::format("verify_{}.json", suite), report.dump(2) + "\n");
  return report["pass"].get<bool>() ? exit_ok : exit_bound;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilevel Ulam-Galerkin Markov chains: discretization, spectral checks, walks and cost model"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "experiment config (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--out", common.out_dir, "output directory (overrides output_dir)");
    sub->add_option("--seed", common.seed, "random seed (overrides quadrature.seed)");
    sub->add_option("--cap", common.cap, "state-count cap (overrides caps.states)");
  };
  auto* discretize = app.add_subcommand("discretize", "write the matrix of every schedule level");
  auto* pipeline = app.add_subcommand("pipeline", "run the multilevel pipeline and cost model");
  auto* walk = app.add_subcommand("walk-check", "Szegedy walk spectrum and evolution at h_max");
  std::size_t steps = 64;
  walk->add_option("--steps", steps, "walk steps to simulate");
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  std::string suite = "all";
  verify->add_option("--suite", suite, "lemma1 | lemma2 | tau | lemma3 | walk | theorem1 | all")
      ->check(CLI::IsMember(std::vector<std::string>(suite_names().begin(), suite_names().end())));
  auto* print = app.add_subcommand("print-config", "print the effective config");
  for (auto* sub : {discretize, pipeline, walk, verify, print}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config;
  }

  try {
    if (*discretize) return cmd_discretize(common);
    if (*pipeline) return cmd_pipeline(common);
    if (*walk) return cmd_walk_check(common, steps);
    if (*verify) return cmd_verify(common, suite);
    if (*print) {
      std::cout << to_json(load(common)).dump(2) << "\n";
      return exit_ok;
    }
  } catch (const Error& e) {
    fmt::print(stderr, "error ({}): {}\n", to_string(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return exit_runtime;
  }
  return exit_ok;
}
