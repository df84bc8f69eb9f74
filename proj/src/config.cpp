#include "mlmc/config.hpp"

#include <fstream>
#include <initializer_list>

#include <fmt/format.h>

#include "mlmc/error.hpp"

namespace mlmc {

using nlohmann::json;

namespace {

std::string join(std::string_view prefix, std::string_view key) {
  return prefix.empty() ? std::string(key) : fmt::format("{}.{}", prefix, key);
}

[[noreturn]] void config_error(std::string_view field, std::string_view what) {
  fail(ErrorCode::config, fmt::format("{}: {}", field, what));
}

void require_object(const json& j, std::string_view field) {
  if (!j.is_object()) config_error(field, "expected an object");
}

void reject_unknown(const json& j, std::string_view prefix, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) config_error(join(prefix, key), "unknown key");
  }
}

double get_number(const json& j, std::string_view field) {
  if (!j.is_number()) config_error(field, "expected a number");
  return j.get<double>();
}

std::int64_t get_integer(const json& j, std::string_view field, std::int64_t lo) {
  if (!j.is_number_integer()) config_error(field, "expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < lo) config_error(field, fmt::format("must be >= {}, got {}", lo, v));
  return v;
}

std::string get_string(const json& j, std::string_view field) {
  if (!j.is_string()) config_error(field, "expected a string");
  return j.get<std::string>();
}

Resolution get_resolution(const json& j, std::string_view field) {
  try {
    if (j.is_string()) return Resolution::parse(j.get<std::string>());
    if (j.is_number()) return Resolution::parse(fmt::format("{}", j.get<double>()));
  } catch (const Error& e) {
    config_error(field, e.what());
  }
  config_error(field, "expected a resolution such as \"1/16\" or 0.0625");
}

template <class Parse>
auto parse_enum(const json& j, std::string_view field, Parse parse) {
  const std::string text = get_string(j, field);
  try {
    return parse(text);
  } catch (const Error& e) {
    config_error(field, e.what());
  }
}

void parse_kernel(const json& j, KernelConfig& k) {
  require_object(j, "kernel");
  reject_unknown(j, "kernel", {"family", "params", "boundary", "lambda"});
  if (j.contains("family")) k.family = parse_enum(j["family"], "kernel.family", parse_kernel_family);
  if (j.contains("boundary")) k.boundary = parse_enum(j["boundary"], "kernel.boundary", parse_boundary_policy);
  if (j.contains("lambda")) {
    const auto& l = j["lambda"];
    if (l.is_string() && l.get<std::string>() == "auto") {
      k.lambda.reset();
    } else {
      k.lambda = get_number(l, "kernel.lambda");
      if (!(*k.lambda > 0.0)) config_error("kernel.lambda", "must be positive or \"auto\"");
    }
  }
  if (!j.contains("params")) return;
  const auto& p = j["params"];
  require_object(p, "kernel.params");
  switch (k.family) {
    case KernelFamily::gauss_ar1:
      reject_unknown(p, "kernel.params", {"a", "sigma"});
      if (p.contains("a")) k.a = get_number(p["a"], "kernel.params.a");
      if (p.contains("sigma")) k.sigma = get_number(p["sigma"], "kernel.params.sigma");
      break;
    case KernelFamily::uniform_window:
      reject_unknown(p, "kernel.params", {"w"});
      if (p.contains("w")) k.w = get_number(p["w"], "kernel.params.w");
      break;
    case KernelFamily::grid_defined:
      reject_unknown(p, "kernel.params", {"h", "matrix"});
      if (p.contains("h")) k.grid_h = get_resolution(p["h"], "kernel.params.h");
      if (!p.contains("matrix")) config_error("kernel.params.matrix", "required for grid-defined kernels");
      if (!p["matrix"].is_array()) config_error("kernel.params.matrix", "expected an array of rows");
      k.matrix.clear();
      for (const auto& row : p["matrix"]) {
        if (!row.is_array()) config_error("kernel.params.matrix", "expected an array of rows");
        std::vector<double> r;
        for (const auto& v : row) r.push_back(get_number(v, "kernel.params.matrix"));
        k.matrix.push_back(std::move(r));
      }
      break;
  }
}

}  // namespace

ExperimentConfig default_config() { return ExperimentConfig{}; }

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig c = default_config();
  require_object(doc, "config");
  reject_unknown(doc, "", {"kernel", "schedule", "mode", "target_epsilon", "quadrature", "caps", "output_dir", "slack"});
  if (doc.contains("kernel")) parse_kernel(doc["kernel"], c.kernel);
  if (doc.contains("schedule")) {
    const auto& s = doc["schedule"];
    require_object(s, "schedule");
    reject_unknown(s, "schedule", {"h_max", "h_min", "d"});
    if (s.contains("h_max")) c.h_max = get_resolution(s["h_max"], "schedule.h_max");
    if (s.contains("h_min")) c.h_min = get_resolution(s["h_min"], "schedule.h_min");
    if (s.contains("d")) c.d = static_cast<int>(get_integer(s["d"], "schedule.d", 1));
  }
  if (doc.contains("mode")) c.mode = parse_enum(doc["mode"], "mode", parse_pipeline_mode);
  if (doc.contains("target_epsilon")) {
    c.target_epsilon = get_number(doc["target_epsilon"], "target_epsilon");
    if (!(c.target_epsilon > 0.0 && c.target_epsilon < 1.0)) config_error("target_epsilon", "must lie in (0, 1)");
  }
  if (doc.contains("quadrature")) {
    const auto& q = doc["quadrature"];
    require_object(q, "quadrature");
    reject_unknown(q, "quadrature", {"rule", "points", "subdivisions", "seed", "drop_threshold"});
    if (q.contains("rule")) {
      c.quadrature_rule = get_string(q["rule"], "quadrature.rule");
      if (c.quadrature_rule != "gauss-legendre")
        config_error("quadrature.rule", fmt::format("unsupported rule '{}' (gauss-legendre)", c.quadrature_rule));
    }
    if (q.contains("points")) c.quadrature.points = static_cast<int>(get_integer(q["points"], "quadrature.points", 1));
    if (q.contains("subdivisions"))
      c.quadrature.subdivisions = static_cast<int>(get_integer(q["subdivisions"], "quadrature.subdivisions", 1));
    if (q.contains("seed")) c.seed = static_cast<std::uint64_t>(get_integer(q["seed"], "quadrature.seed", 0));
    if (q.contains("drop_threshold")) {
      c.drop_threshold = get_number(q["drop_threshold"], "quadrature.drop_threshold");
      if (!(c.drop_threshold >= 0.0)) config_error("quadrature.drop_threshold", "must be >= 0");
    }
  }
  if (doc.contains("caps")) {
    const auto& k = doc["caps"];
    require_object(k, "caps");
    reject_unknown(k, "caps", {"states", "walk_states"});
    if (k.contains("states")) c.state_cap = static_cast<std::size_t>(get_integer(k["states"], "caps.states", 1));
    if (k.contains("walk_states"))
      c.walk_cap = static_cast<std::size_t>(get_integer(k["walk_states"], "caps.walk_states", 1));
  }
  if (doc.contains("output_dir")) c.output_dir = get_string(doc["output_dir"], "output_dir");
  if (doc.contains("slack")) {
    const auto& s = doc["slack"];
    require_object(s, "slack");
    reject_unknown(s, "slack", {"tau", "residual", "cost"});
    auto slack = [&](const char* key, double& out) {
      if (!s.contains(key)) return;
      const std::string field = join("slack", key);
      out = get_number(s[key], field);
      if (!(out >= 0.0)) config_error(field, "must be >= 0");
    };
    slack("tau", c.tau_slack);
    slack("residual", c.residual_slack);
    slack("cost", c.cost_slack);
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::config, fmt::format("cannot open config file {}", path.string()));
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::config, fmt::format("{}: {}", path.string(), e.what()));
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& c) {
  json params;
  switch (c.kernel.family) {
    case KernelFamily::gauss_ar1: params = {{"a", c.kernel.a}, {"sigma", c.kernel.sigma}}; break;
    case KernelFamily::uniform_window: params = {{"w", c.kernel.w}}; break;
    case KernelFamily::grid_defined: params = {{"h", c.kernel.grid_h.str()}, {"matrix", c.kernel.matrix}}; break;
  }
  json kernel = {{"family", std::string(to_string(c.kernel.family))},
                 {"params", params},
                 {"boundary", std::string(to_string(c.kernel.boundary))}};
  kernel["lambda"] = c.kernel.lambda ? json(*c.kernel.lambda) : json("auto");
  return {
      {"kernel", kernel},
      {"schedule", {{"h_max", c.h_max.str()}, {"h_min", c.h_min.str()}, {"d", c.d}}},
      {"mode", std::string(to_string(c.mode))},
      {"target_epsilon", c.target_epsilon},
      {"quadrature",
       {{"rule", c.quadrature_rule},
        {"points", c.quadrature.points},
        {"subdivisions", c.quadrature.subdivisions},
        {"seed", c.seed},
        {"drop_threshold", c.drop_threshold}}},
      {"caps", {{"states", c.state_cap}, {"walk_states", c.walk_cap}}},
      {"output_dir", c.output_dir},
      {"slack", {{"tau", c.tau_slack}, {"residual", c.residual_slack}, {"cost", c.cost_slack}}},
  };
}

KernelSpec make_kernel(const ExperimentConfig& c) {
  const auto& k = c.kernel;
  KernelSpec spec = [&] {
    switch (k.family) {
      case KernelFamily::gauss_ar1:
      case KernelFamily::uniform_window:
        try {
          return k.family == KernelFamily::gauss_ar1 ? KernelSpec::gauss_ar1(k.a, k.sigma, k.boundary)
                                                     : KernelSpec::uniform_window(k.w, k.boundary);
        } catch (const Error& e) {
          config_error("kernel.params", e.what());
        }
      case KernelFamily::grid_defined: break;
    }
    const Partition part(k.grid_h, c.d, c.state_cap);
    if (k.matrix.size() != part.size())
      config_error("kernel.params.matrix",
                   fmt::format("has {} rows, partition h={} d={} has {} states", k.matrix.size(), k.grid_h.str(), c.d,
                               part.size()));
    std::vector<double> dense;
    for (const auto& row : k.matrix) {
      if (row.size() != part.size())
        config_error("kernel.params.matrix", fmt::format("row has {} entries, expected {}", row.size(), part.size()));
      dense.insert(dense.end(), row.begin(), row.end());
    }
    try {
      return KernelSpec::grid_defined(StochasticMatrix::from_dense(part, dense));
    } catch (const Error& e) {
      config_error("kernel.params.matrix", e.what());
    }
  }();
  return k.lambda ? spec.with_lipschitz(*k.lambda) : spec;
}

LevelSchedule make_schedule(const ExperimentConfig& c) {
  if (c.h_min > c.h_max) config_error("schedule.h_min", fmt::format("{} is coarser than h_max {}", c.h_min.str(), c.h_max.str()));
  return build_schedule(c.h_max, c.h_min, c.d);
}

PipelineOptions pipeline_options(const ExperimentConfig& c) {
  PipelineOptions o;
  o.mode = c.mode;
  o.target_epsilon = c.target_epsilon;
  o.discretize.quad = c.quadrature;
  o.discretize.drop_threshold = c.drop_threshold;
  o.state_cap = c.state_cap;
  o.tau_slack = c.tau_slack;
  o.residual_slack = c.residual_slack;
  o.cost_slack = c.cost_slack;
  return o;
}

}  // namespace mlmc
