#include "mlmc/io.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "mlmc/error.hpp"

namespace mlmc {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{}", v);
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, fmt::format("cannot write {}", path.string()));
  out << content;
  if (!out) fail(ErrorCode::io, fmt::format("write to {} failed", path.string()));
}

json to_json(const Partition& p) {
  return {{"h_num", 1}, {"h_den", p.resolution().inverse()}, {"d", p.dim()}, {"index_order", Partition::index_order}};
}

std::string matrix_csv(const StochasticMatrix& p) {
  std::string out = "row,col,value\n";
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto idx = p.row_indices(i);
    const auto val = p.row_values(i);
    for (std::size_t e = 0; e < idx.size(); ++e) out += fmt::format("{},{},{}\n", i, idx[e], format_double(val[e]));
  }
  return out;
}

std::string density_csv(const DiscreteDensity& pi) {
  std::string out = "index,mass\n";
  for (std::size_t i = 0; i < pi.size(); ++i) out += fmt::format("{},{}\n", i, format_double(pi[i]));
  return out;
}

json to_json(const TauComparison& t) {
  return {{"tau_h", t.tau_h}, {"tau_2h", t.tau_2h}, {"diff", t.diff},       {"lambda_hat", t.lambda_hat},
          {"bound", t.bound}, {"slack", t.slack},   {"pass", t.pass}};
}

json to_json(const SenetaCheck& s) {
  return {{"lhs", s.lhs}, {"perturbation", s.perturbation}, {"tau", s.tau},
          {"rhs", s.rhs}, {"rhs_eigen_gap", s.rhs_eigen},   {"pass", s.pass}};
}

json to_json(const Overlap& o) {
  return {{"fidelity", o.fidelity}, {"q", o.q}, {"l1", o.l1}, {"q_le_half_l1", o.hellinger_ok}};
}

json to_json(const SpectralGap& g) {
  return {{"delta_eig", g.delta},
          {"delta_abs", g.delta_abs},
          {"lambda2", g.lambda2},
          {"lambda_min", g.lambda_min},
          {"reversible", g.reversible},
          {"max_violation", g.max_violation},
          {"singular_value_fallback", g.singular_value_fallback}};
}

json to_json(const SpectralReport& r) {
  json j = {{"pi", std::vector<double>(r.pi.mass().begin(), r.pi.mass().end())},
            {"residual", r.residual},
            {"gap", to_json(r.gap)},
            {"tau", r.tau},
            {"delta_tau", r.delta_tau},
            {"lambda_hat", r.lambda_hat}};
  j["bauer_fike_C"] = r.bauer_fike ? json(r.bauer_fike->constant) : json(nullptr);
  return j;
}

json to_json(const WalkSpectrum& w) {
  if (w.skipped) return {{"skipped", true}, {"diagnostic", w.diagnostic}};
  return {{"skipped", false},
          {"discriminant_eigenvalues", w.discriminant_eigenvalues},
          {"phases", w.phases},
          {"cos_match_error", w.cos_match_error},
          {"restricted_match_error", w.restricted_match_error},
          {"phase_gap", w.phase_gap},
          {"delta", w.delta},
          {"sqrt_2delta", std::sqrt(2.0 * w.delta)},
          {"gap_ok", w.gap_ok},
          {"unitarity_error", w.unitarity_error}};
}

json to_json(const TotalCostCheck& t) {
  return {{"C_total", t.c_total},
          {"C_hmin", t.c_hmin},
          {"gamma_hat", t.gamma_hat},
          {"ratios", t.ratios},
          {"bound_sqrt_gamma", t.bound},
          {"bound_gamma", t.bound_gamma},
          {"slack", t.slack},
          {"asserted", t.asserted},
          {"pass", t.pass}};
}

json to_json(const LevelRecord& r, PipelineMode mode) {
  json j = {{"h", r.h.str()},
            {"n_states", r.n_states},
            {"m", r.m},
            {"s", r.s},
            {"nnz", r.nnz},
            {"tau", r.tau},
            {"delta_eig", r.delta_eig},
            {"delta_abs", r.delta_abs},
            {"reversible", r.reversible},
            {"max_violation", r.max_violation},
            {"singular_value_fallback", r.singular_value_fallback},
            {"stationary_residual", r.stationary_residual},
            {"q", r.q},
            {"q_used", r.q_used},
            {"fidelity", r.fidelity},
            {"start_l1", r.start_l1},
            {"walk_steps", r.walk_steps},
            {"C", r.cost},
            {"lemma3_ratio", r.lemma3_ratio}};
  if (mode == PipelineMode::classical_emulation) {
    j["classical_matvecs"] = r.classical_matvecs;
    j["classical_cost"] = r.classical_cost;
    j["cold_matvecs"] = r.cold_matvecs;
    j["cold_cost"] = r.cold_cost;
    j["warm_not_worse"] = r.warm_not_worse;
  }
  if (r.tau_check) {
    j["tau_check"] = to_json(*r.tau_check);
    j["residual"] = {{"value", r.residual}, {"bound", r.residual_bound}, {"pass", r.residual_ok}};
    if (r.bauer_fike)
      j["bauer_fike"] = {{"C", r.bauer_fike->constant},
                         {"gap", r.bauer_fike->gap},
                         {"lhs", r.bauer_fike_lhs},
                         {"rhs", r.bauer_fike_rhs},
                         {"pass", r.bauer_fike_ok}};
    else
      j["bauer_fike"] = {{"available", false}};
    if (r.seneta) j["seneta"] = to_json(*r.seneta);
  }
  return j;
}

json to_json(const PipelineReport& r) {
  json levels = json::array();
  for (const auto& l : r.levels) levels.push_back(to_json(l, r.mode));
  std::vector<std::string> hs;
  for (auto h : r.schedule.levels) hs.push_back(h.str());
  json j = {{"kernel", r.kernel},
            {"schedule", {{"h_max", r.schedule.h_max.str()}, {"h_min", r.schedule.h_min.str()}, {"r", r.schedule.r},
                          {"d", r.schedule.d}, {"levels", hs}}},
            {"mode", std::string(to_string(r.mode))},
            {"target_epsilon", r.target_epsilon},
            {"levels", levels},
            {"gamma_hat", r.gamma_hat},
            {"totals", to_json(r.totals)},
            {"lemma3", {{"constant", r.lemma3_constant}, {"pass", r.lemma3_ok}}},
            {"warnings", r.warnings},
            {"pass", r.pass}};
  j["totals"]["C_ratio_bound"] = r.totals.bound;
  if (r.mode == PipelineMode::classical_emulation) {
    j["totals"]["classical_matvec_cost"] = r.classical_total_cost;
    j["totals"]["cold_start_cost"] = r.cold_start_cost;
    j["totals"]["cold_start_matvecs"] = r.cold_start_matvecs;
    j["totals"]["warm_over_cold"] = r.cold_start_cost > 0 ? r.classical_total_cost / r.cold_start_cost : 0.0;
  }
  return j;
}

std::string pipeline_csv(const PipelineReport& r) {
  const bool classical = r.mode == PipelineMode::classical_emulation;
  std::string out = "h,n_states,m,s,tau,delta_eig,q,walk_steps,C";
  if (classical) out += ",classical_matvecs,classical_cost";
  out += "\n";
  for (const auto& l : r.levels) {
    out += fmt::format("{},{},{},{},{},{},{},{},{}", l.h.str(), l.n_states, format_double(l.m), l.s,
                       format_double(l.tau), format_double(l.delta_eig), format_double(l.q), l.walk_steps,
                       format_double(l.cost));
    if (classical) out += fmt::format(",{},{}", l.classical_matvecs, format_double(l.classical_cost));
    out += "\n";
  }
  return out;
}

std::string walk_trace_csv(const WalkTrace& t) {
  std::string out = "step,overlap,autocorrelation\n";
  for (std::size_t s = 0; s < t.overlap.size(); ++s)
    out += fmt::format("{},{},{}\n", s, format_double(t.overlap[s]), format_double(t.autocorrelation[s]));
  return out;
}

}  // namespace mlmc
