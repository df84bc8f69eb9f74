#include <gtest/gtest.h>

#include <json.hpp>
#include <sstream>

#include "mlmc/config.hpp"
#include "mlmc/error.hpp"
#include "mlmc/io.hpp"

using namespace mlmc;
using nlohmann::json;

namespace {

std::string config_error(const json& doc) {
  try {
    const auto c = parse_config(doc);
    make_schedule(c);
    make_kernel(c);
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == ErrorCode::config || e.code() == ErrorCode::invalid_level) << e.what();
    return e.what();
  }
  ADD_FAILURE() << "accepted " << doc.dump();
  return {};
}

std::string header(const std::string& csv) { return csv.substr(0, csv.find('\n')); }

}  // namespace

TEST(Config, DefaultsAndRoundTrip) {
  const auto c = parse_config(json::object());
  EXPECT_EQ(c.kernel.family, KernelFamily::gauss_ar1);
  EXPECT_EQ(c.h_max, Resolution::from_inverse(2));
  EXPECT_EQ(c.h_min, Resolution::from_inverse(16));
  EXPECT_EQ(c.mode, PipelineMode::classical_emulation);
  const auto again = parse_config(to_json(c));
  EXPECT_EQ(to_json(again), to_json(c));
}

TEST(Config, ParsesEveryField) {
  const json doc = json::parse(R"({
    "kernel": {"family": "uniform-window", "params": {"w": 0.75}, "boundary": "reflect", "lambda": 3.5},
    "schedule": {"h_max": "1/4", "h_min": 0.03125, "d": 2},
    "mode": "quantum-cost-model",
    "target_epsilon": 1e-4,
    "quadrature": {"rule": "gauss-legendre", "points": 4, "subdivisions": 2, "seed": 9, "drop_threshold": 0},
    "caps": {"states": 5000, "walk_states": 16},
    "output_dir": "elsewhere",
    "slack": {"tau": 0.1, "residual": 0.2, "cost": 0.3}
  })");
  const auto c = parse_config(doc);
  EXPECT_EQ(c.kernel.family, KernelFamily::uniform_window);
  EXPECT_EQ(c.kernel.w, 0.75);
  EXPECT_EQ(c.kernel.boundary, BoundaryPolicy::reflect);
  EXPECT_EQ(c.kernel.lambda, 3.5);
  EXPECT_EQ(c.h_max.inverse(), 4);
  EXPECT_EQ(c.h_min.inverse(), 32);
  EXPECT_EQ(c.d, 2);
  EXPECT_EQ(c.mode, PipelineMode::quantum_cost_model);
  EXPECT_EQ(c.quadrature.points, 4);
  EXPECT_EQ(c.quadrature.subdivisions, 2);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.state_cap, 5000u);
  EXPECT_EQ(c.walk_cap, 16u);
  EXPECT_EQ(c.output_dir, "elsewhere");
  EXPECT_EQ(c.cost_slack, 0.3);
  EXPECT_EQ(make_schedule(c).r, 3);
  EXPECT_EQ(make_kernel(c).lipschitz_bound(2), 3.5);
  EXPECT_EQ(pipeline_options(c).state_cap, 5000u);
  EXPECT_EQ(to_json(parse_config(to_json(c))), to_json(c));
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_NE(config_error({{"colour", 1}}).find("colour"), std::string::npos);
  EXPECT_NE(config_error({{"kernel", {{"family", "gauss-ar1"}, {"parms", json::object()}}}}).find("parms"),
            std::string::npos);
  EXPECT_NE(config_error({{"schedule", {{"h_min", "1/3"}}}}).find("schedule.h_min"), std::string::npos);
  EXPECT_NE(config_error({{"mode", "fast"}}).find("mode"), std::string::npos);
  EXPECT_NE(config_error({{"target_epsilon", "small"}}).find("target_epsilon"), std::string::npos);
  EXPECT_NE(config_error({{"kernel", {{"params", {{"sigma", -1.0}}}}}}).find("kernel"), std::string::npos);
  EXPECT_NE(config_error({{"quadrature", {{"points", 0}}}}).find("quadrature.points"), std::string::npos);
}

TEST(Config, GridKernel) {
  const json doc = {{"kernel", {{"family", "grid-defined"}, {"params", {{"h", "1"}, {"matrix", {{0.9, 0.1}, {0.2, 0.8}}}}}}},
                    {"schedule", {{"h_max", "1"}, {"h_min", "1/4"}}}};
  const auto k = make_kernel(parse_config(doc));
  EXPECT_EQ(k.family(), KernelFamily::grid_defined);
  EXPECT_DOUBLE_EQ(k.grid_matrix().at(1, 0), 0.2);
  const json bad = {{"kernel", {{"family", "grid-defined"}, {"params", {{"h", "1"}, {"matrix", {{0.9, 0.2}, {0.2, 0.8}}}}}}}};
  EXPECT_THROW(make_kernel(parse_config(bad)), Error);
}

TEST(Io, FormatDouble) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0 / 3.0), "0.3333333333333333");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_double(std::nan("")), "nan");
}

TEST(Io, MatrixAndDensityCsv) {
  const Partition p(Resolution::from_inverse(1), 1);
  const auto m = StochasticMatrix::from_dense(p, std::vector<double>{0.5, 0.5, 0.0, 1.0});
  EXPECT_EQ(matrix_csv(m), "row,col,value\n0,0,0.5\n0,1,0.5\n1,1,1\n");
  EXPECT_EQ(density_csv(DiscreteDensity::uniform(p)), "index,mass\n0,0.5\n1,0.5\n");
  const auto j = to_json(p);
  EXPECT_EQ(j["h_den"], 1);
  EXPECT_EQ(j["d"], 1);
  EXPECT_EQ(j["index_order"], "row-major-c0-slowest");
}

TEST(Io, PipelineCsvColumnsFollowTheMode) {
  auto c = default_config();
  c.h_max = Resolution::from_inverse(2);
  c.h_min = Resolution::from_inverse(4);
  auto run = [&](PipelineMode m) {
    c.mode = m;
    return pipeline_csv(run_pipeline(make_kernel(c), make_schedule(c), pipeline_options(c)));
  };
  const auto classical = run(PipelineMode::classical_emulation);
  EXPECT_EQ(header(classical), "h,n_states,m,s,tau,delta_eig,q,walk_steps,C,classical_matvecs,classical_cost");
  const auto quantum = run(PipelineMode::quantum_cost_model);
  EXPECT_EQ(header(quantum), "h,n_states,m,s,tau,delta_eig,q,walk_steps,C");
  EXPECT_EQ(std::count(quantum.begin(), quantum.end(), '\n'), 3);
  const auto rep = run_pipeline(make_kernel(c), make_schedule(c), pipeline_options(c));
  const auto j = to_json(rep);
  EXPECT_EQ(j["levels"].size(), 2u);
  EXPECT_TRUE(j.contains("totals"));
}

TEST(Io, WalkTraceCsv) {
  WalkTrace t;
  t.overlap = {1.0, 0.5};
  t.autocorrelation = {1.0, 0.25};
  EXPECT_EQ(walk_trace_csv(t), "step,overlap,autocorrelation\n0,1,1\n1,0.5,0.25\n");
}
