#include "mlmc/verify.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/rational.hpp>
#include <fmt/format.h>

#include "mlmc/error.hpp"
#include "mlmc/io.hpp"
#include "mlmc/kernels.hpp"
#include "mlmc/multilevel.hpp"
#include "mlmc/parallel.hpp"
#include "mlmc/spectral.hpp"
#include "mlmc/szegedy.hpp"
#include "mlmc/transfer.hpp"
#include "mlmc/ulam.hpp"

namespace mlmc {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

template <class Body>
CheckResult timed(int criterion, std::string id, std::string description, Body&& body) {
  CheckResult r;
  r.criterion = criterion;
  r.id = std::move(id);
  r.description = std::move(description);
  const auto start = Clock::now();
  try {
    body(r);
  } catch (const Error& e) {
    r.pass = false;
    r.measured["error"] = fmt::format("{}: {}", to_string(e.code()), e.what());
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (r.measured.is_object() && r.measured.contains("limit_seconds") && r.seconds > r.measured["limit_seconds"].get<double>())
    r.pass = false;
  return r;
}

KernelSpec reference_kernel() { return KernelSpec::gauss_ar1(0.5, 0.3); }

StochasticMatrix two_state(std::vector<double> dense) {
  return StochasticMatrix::from_dense(Partition(Resolution::from_inverse(1), 1), dense);
}

// P at h_min and its exact coarsenings, finest last
std::vector<StochasticMatrix> ladder(const KernelSpec& k, Resolution h_min, int d, int halvings) {
  std::vector<StochasticMatrix> out;
  out.push_back(discretize_kernel(k, Partition(h_min, d)).matrix);
  for (int i = 0; i < halvings; ++i) out.insert(out.begin(), coarsen_matrix(LevelPair(out.front().partition()), out.front()));
  return out;
}

}  // namespace

CheckResult check_transfer_identities(const VerifyOptions& o) {
  return timed(1, "transfer-identities", "restriction/prolongation adjointness and A I = 2^d Id, d = 1,2,3", [&](CheckResult& r) {
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> gauss;
    double adjoint = 0.0, inverse = 0.0;
    for (int d = 1; d <= 3; ++d) {
      const LevelPair levels(Partition(Resolution::from_inverse(4), d));
      const double scale = static_cast<double>(levels.children_per_parent());
      for (int t = 0; t < 100; ++t) {
        std::vector<double> v(levels.fine().size()), w(levels.coarse().size());
        for (double& x : v) x = gauss(rng);
        for (double& x : w) x = gauss(rng);
        const auto av = restrict_sum(levels, v);
        const auto iw = prolong_copy(levels, w);
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k) lhs += av[k] * w[k];
        for (std::size_t i = 0; i < v.size(); ++i) rhs += v[i] * iw[i];
        adjoint = std::max(adjoint, std::abs(lhs - rhs));
        const auto aiw = restrict_sum(levels, iw);
        for (std::size_t k = 0; k < w.size(); ++k) inverse = std::max(inverse, std::abs(aiw[k] - scale * w[k]));
      }
    }
    r.measured = {{"max_adjoint_error", adjoint}, {"max_left_inverse_error", inverse}, {"tolerance", 1e-12}};
    r.pass = adjoint <= 1e-12 && inverse <= 1e-12;
    r.measured["limit_seconds"] = 1.0;
  });
}

CheckResult check_coarsening_exactness(const VerifyOptions&) {
  return timed(2, "coarsening-exactness", "coarsen(P_h) matches direct P_2h, gauss-ar1 d=1 h=1/16", [&](CheckResult& r) {
    const auto k = reference_kernel();
    DiscretizeOptions opt;
    opt.quad = {8, 1};
    const auto fine = discretize_kernel(k, Partition(Resolution::from_inverse(16), 1), opt).matrix;
    const auto direct = discretize_kernel(k, Partition(Resolution::from_inverse(8), 1), opt).matrix;
    const auto coarse = coarsen_matrix(LevelPair(fine.partition()), fine);
    const double err = max_abs_difference(coarse, direct);
    r.measured = {{"max_abs_difference", err}, {"tolerance", 1e-9}, {"limit_seconds", 10.0}};
    r.pass = err <= 1e-9;
  });
}

CheckResult check_interpolation_error(const VerifyOptions&) {
  return timed(3, "interpolation-error", "||p - p_h||_1 <= h for p = 1 - |x|, value at h=1/2 and halving ratios",
               [&](CheckResult& r) {
                 const DensityFunction tent = [](std::span<const double> x) { return 1.0 - std::abs(x[0]); };
                 json rows = json::array();
                 bool within = true;
                 std::vector<double> errors;
                 for (std::int64_t n : {2, 4, 8, 16, 32, 64}) {
                   const Partition part(Resolution::from_inverse(n), 1);
                   const auto e = interpolation_error(tent, 1.0, part);
                   errors.push_back(e.l1);
                   if (n >= 4) within = within && e.l1 <= part.h();
                   rows.push_back({{"h", part.resolution().str()}, {"l1", e.l1}, {"linf", e.linf}, {"closed_form_h_over_2", part.h() / 2}});
                 }
                 std::vector<double> ratios;
                 bool ratios_ok = true;
                 for (std::size_t i = 1; i < errors.size(); ++i) {
                   ratios.push_back(errors[i - 1] / errors[i]);
                   ratios_ok = ratios_ok && ratios.back() >= 1.6 && ratios.back() <= 2.4;
                 }
                 const double half = errors.front();
                 const bool half_ok = std::abs(half - 0.125) <= 1e-12;
                 r.measured = {{"levels", rows},
                               {"ratios", ratios},
                               {"within_h", within},
                               {"ratios_in_range", ratios_ok},
                               {"h_half_value", half},
                               {"h_half_expected", 0.125},
                               {"h_half_ok", half_ok}};
                 r.pass = within && ratios_ok && half_ok;
               });
}

CheckResult check_dobrushin(const VerifyOptions& o) {
  return timed(4, "dobrushin", "tau = 0.7 for [[.9,.1],[.2,.8]], 1e4 sampled quotients bounded by it", [&](CheckResult& r) {
    const auto p = two_state({0.9, 0.1, 0.2, 0.8});
    const double tau = dobrushin_tau(p);
    const auto s = sample_tau_quotients(p, 10000, o.seed);
    r.measured = {{"tau", tau}, {"samples", s.samples}, {"max_sample", s.max_quotient}, {"limit_seconds", 1.0}};
    r.pass = std::abs(tau - 0.7) <= 1e-12 && s.samples == 10000 && s.max_quotient <= tau + 1e-12 &&
             s.max_quotient >= 0.63;
  });
}

CheckResult check_tau_levels(const VerifyOptions&) {
  return timed(5, "tau-levels", "|tau_h - tau_2h| <= 1.5 Lambda h, gauss-ar1 d=1, h = 1/8, 1/16, 1/32", [&](CheckResult& r) {
    const auto mats = ladder(reference_kernel(), Resolution::from_inverse(32), 1, 3);
    json rows = json::array();
    bool ok = true;
    for (std::size_t k = 1; k < mats.size(); ++k) {
      const auto t = tau_level_comparison(mats[k], mats[k - 1], 0.5);
      ok = ok && t.pass;
      auto j = to_json(t);
      j["h"] = mats[k].partition().resolution().str();
      rows.push_back(j);
    }
    r.measured = {{"levels", rows}};
    r.pass = ok;
  });
}

CheckResult check_lift_rows(const VerifyOptions& o) {
  return timed(6, "lift-rows", "lifted chain rows sum to 1 (exact rationals; <= 1e-14 in floating point)", [&](CheckResult& r) {
    using Q = boost::rational<long long>;
    const LevelPair pair(Partition(Resolution::from_inverse(2), 1));
    const std::vector<Q> coarse{Q(9, 10), Q(1, 10), Q(1, 5), Q(4, 5)};
    const auto lifted = lift_dense<Q>(pair, coarse);
    const std::size_t n = pair.fine().size();
    bool exact = true;
    for (std::size_t i = 0; i < n; ++i) {
      Q s(0);
      for (std::size_t j = 0; j < n; ++j) s += lifted[i * n + j];
      exact = exact && s == Q(1);
    }
    double worst = 0.0;
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int d = 1; d <= 3; ++d) {
      const LevelPair lp(Partition(Resolution::from_inverse(4), d));
      const std::size_t m = lp.coarse().size();
      std::vector<std::vector<StochasticMatrix::Entry>> rows(m);
      for (auto& row : rows) {
        double total = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          row.push_back({static_cast<std::int32_t>(j), unit(rng)});
          total += row.back().value;
        }
        for (auto& e : row) e.value /= total;
      }
      const auto p2 = StochasticMatrix::from_rows_renormalized(lp.coarse(), std::move(rows));
      worst = std::max(worst, lift_matrix(lp, p2).max_row_sum_error());
    }
    const auto mats = ladder(reference_kernel(), Resolution::from_inverse(16), 1, 2);
    for (std::size_t k = 1; k < mats.size(); ++k)
      worst = std::max(worst, lift_matrix(LevelPair(mats[k].partition()), mats[k - 1]).max_row_sum_error());
    r.measured = {{"rational_rows_exact", exact}, {"max_float_row_error", worst}, {"tolerance", 1e-14}};
    r.pass = exact && worst <= 1e-14;
  });
}

CheckResult check_seneta(const VerifyOptions&) {
  return timed(7, "seneta", "||pi_hat - pi||_1 <= ||P - P_hat|| / (1 - tau)", [&](CheckResult& r) {
    const auto hand = seneta_bound_check(two_state({0.9, 0.1, 0.2, 0.8}), two_state({0.8, 0.2, 0.2, 0.8}));
    bool ok = hand.pass && std::abs(hand.lhs - 1.0 / 3.0) <= 1e-9 && std::abs(hand.rhs - 2.0 / 3.0) <= 1e-9;
    json rows = json::array();
    for (std::int64_t n : {8, 16}) {
      const auto p = discretize_kernel(reference_kernel(), Partition(Resolution::from_inverse(n), 1)).matrix;
      const LevelPair pair(p.partition());
      const auto s = seneta_bound_check(p, lift_matrix(pair, coarsen_matrix(pair, p)));
      ok = ok && s.pass;
      auto j = to_json(s);
      j["h"] = p.partition().resolution().str();
      rows.push_back(j);
    }
    r.measured = {{"two_state", to_json(hand)}, {"gauss_ar1", rows}};
    r.pass = ok;
  });
}

CheckResult check_overlap_scaling(const VerifyOptions& o) {
  return timed(8, "overlap-scaling", "q_h delta_h / h bounded over four halvings; q <= l1/2 on 1e4 random pairs",
               [&](CheckResult& r) {
                 PipelineOptions opt;
                 opt.mode = PipelineMode::quantum_cost_model;
                 opt.level_checks = false;
                 const auto rep = run_pipeline(reference_kernel(),
                                               build_schedule(Resolution::from_inverse(2), Resolution::from_inverse(32), 1), opt);
                 json rows = json::array();
                 for (std::size_t k = 1; k < rep.levels.size(); ++k) {
                   const auto& l = rep.levels[k];
                   rows.push_back({{"h", l.h.str()}, {"q", l.q}, {"delta", l.delta_eig}, {"ratio", l.lemma3_ratio}});
                 }
                 std::mt19937_64 rng(o.seed);
                 std::exponential_distribution<double> expo;
                 std::uniform_int_distribution<int> size_pick(1, 6);
                 std::size_t violations = 0;
                 double worst_margin = std::numeric_limits<double>::infinity();
                 for (int t = 0; t < 10000; ++t) {
                   const Partition part(Resolution::from_inverse(size_pick(rng)), 1);
                   std::vector<double> a(part.size()), b(part.size());
                   for (double& x : a) x = expo(rng);
                   for (double& x : b) x = expo(rng);
                   const auto ov = overlap(DiscreteDensity::normalized(part, a), DiscreteDensity::normalized(part, b));
                   if (!ov.hellinger_ok) ++violations;
                   worst_margin = std::min(worst_margin, 0.5 * ov.l1 - ov.q);
                 }
                 r.measured = {{"levels", rows},
                               {"constant", rep.lemma3_constant},
                               {"bounded", rep.lemma3_ok},
                               {"random_pairs", 10000},
                               {"hellinger_violations", violations},
                               {"min_margin", worst_margin}};
                 r.pass = rep.lemma3_ok && violations == 0;
               });
}

CheckResult check_walk_correspondence(const VerifyOptions& o) {
  return timed(9, "walk-correspondence", "Szegedy phases vs discriminant spectrum on 20 random reversible chains",
               [&](CheckResult& r) {
                 double cos_err = 0.0, unit_err = 0.0;
                 bool gaps = true, all_ran = true;
                 json rows = json::array();
                 for (std::size_t c = 0; c < 20; ++c) {
                   const std::size_t n = 2 + c % 15;
                   const auto chain = random_reversible_chain(n, o.seed * 1000 + c);
                   const auto w = walk_spectrum_check(chain.p, chain.pi);
                   all_ran = all_ran && !w.skipped;
                   cos_err = std::max({cos_err, w.cos_match_error, w.restricted_match_error});
                   unit_err = std::max(unit_err, w.unitarity_error);
                   gaps = gaps && w.gap_ok;
                   rows.push_back({{"n", n}, {"phase_gap", w.phase_gap}, {"sqrt_2delta", std::sqrt(2 * w.delta)}});
                 }
                 Eigen::MatrixXd p2(2, 2);
                 p2 << 0.9, 0.1, 0.2, 0.8;
                 const auto two = walk_spectrum_check(p2, std::vector<double>{2.0 / 3.0, 1.0 / 3.0});
                 const double expected = std::acos(0.7);
                 const bool two_ok = !two.skipped && std::abs(two.phase_gap - expected) <= 1e-6;
                 r.measured = {{"chains", rows},
                               {"max_cos_match_error", cos_err},
                               {"max_unitarity_error", unit_err},
                               {"gaps_ok", gaps},
                               {"two_state_phase", two.phase_gap},
                               {"two_state_expected", expected},
                               {"limit_seconds", 30.0}};
                 r.pass = all_ran && cos_err <= 1e-9 && unit_err <= 1e-10 && gaps && two_ok;
               });
}

CheckResult check_total_cost(const VerifyOptions&) {
  return timed(10, "total-cost", "C_total <= d sqrt(gamma)/(d-1) C_hmin (1.25), gauss-ar1 d=2, 1/2 -> 1/16",
               [&](CheckResult& r) {
                 PipelineOptions opt;
                 opt.mode = PipelineMode::quantum_cost_model;
                 opt.cost_slack = 0.25;
                 const auto rep = run_pipeline(reference_kernel(),
                                               build_schedule(Resolution::from_inverse(2), Resolution::from_inverse(16), 2), opt);
                 json costs = json::array();
                 for (const auto& l : rep.levels) costs.push_back({{"h", l.h.str()}, {"C", l.cost}, {"delta", l.delta_eig}, {"q", l.q}});
                 r.measured = to_json(rep.totals);
                 r.measured["levels"] = costs;
                 r.measured["limit_seconds"] = 120.0;
                 r.pass = rep.totals.asserted && rep.totals.pass;
               });
}

CheckResult check_warm_start_payoff(const VerifyOptions&) {
  return timed(11, "warm-start-payoff", "multilevel classical cost <= 0.75 x cold start at h_min, d = 1, 2",
               [&](CheckResult& r) {
                 bool ok = true;
                 json rows = json::array();
                 for (int d : {1, 2}) {
                   PipelineOptions opt;
                   opt.level_checks = false;
                   const auto rep = run_pipeline(reference_kernel(),
                                                 build_schedule(Resolution::from_inverse(2), Resolution::from_inverse(16), d), opt);
                   const double ratio = rep.classical_total_cost / rep.cold_start_cost;
                   ok = ok && ratio <= 0.75;
                   json mv = json::array();
                   for (const auto& l : rep.levels) mv.push_back({{"h", l.h.str()}, {"warm", l.classical_matvecs}, {"cold", l.cold_matvecs}});
                   rows.push_back({{"d", d},
                                   {"multilevel_cost", rep.classical_total_cost},
                                   {"cold_start_cost", rep.cold_start_cost},
                                   {"ratio", ratio},
                                   {"matvecs", mv}});
                 }
                 r.measured = {{"runs", rows}, {"threshold", 0.75}};
                 r.pass = ok;
               });
}

CheckResult check_determinism(const VerifyOptions&) {
  return timed(12, "determinism", "pipeline outputs identical across worker counts", [&](CheckResult& r) {
    const auto schedule = build_schedule(Resolution::from_inverse(2), Resolution::from_inverse(16), 1);
    std::vector<std::string> outputs;
    for (std::size_t workers : {1, 3, 8}) {
      set_worker_count(workers);
      const auto rep = run_pipeline(reference_kernel(), schedule);
      outputs.push_back(to_json(rep).dump(2) + pipeline_csv(rep));
    }
    set_worker_count(0);
    const bool same = outputs[0] == outputs[1] && outputs[1] == outputs[2];
    r.measured = {{"worker_counts", {1, 3, 8}}, {"identical", same}, {"bytes", outputs[0].size()}};
    r.pass = same;
  });
}

const std::vector<std::string_view>& suite_names() {
  static const std::vector<std::string_view> names{"lemma1", "lemma2", "tau", "lemma3", "walk", "theorem1", "all"};
  return names;
}

std::vector<CheckFunction> suite_checks(std::string_view suite) {
  if (suite == "lemma1") return {check_interpolation_error};
  if (suite == "lemma2") return {check_transfer_identities, check_coarsening_exactness, check_lift_rows};
  if (suite == "tau") return {check_dobrushin, check_tau_levels};
  if (suite == "lemma3") return {check_seneta, check_overlap_scaling};
  if (suite == "walk") return {check_walk_correspondence};
  if (suite == "theorem1") return {check_total_cost, check_warm_start_payoff, check_determinism};
  if (suite == "all")
    return {check_transfer_identities, check_coarsening_exactness, check_interpolation_error, check_dobrushin,
            check_tau_levels,          check_lift_rows,            check_seneta,              check_overlap_scaling,
            check_walk_correspondence, check_total_cost,           check_warm_start_payoff,   check_determinism};
  fail(ErrorCode::config, fmt::format("suite: unknown value '{}'", suite));
}

std::vector<CheckResult> run_suite(std::string_view suite, const VerifyOptions& o) {
  std::vector<CheckResult> out;
  for (auto check : suite_checks(suite)) out.push_back(check(o));
  return out;
}

json to_json(const CheckResult& r) {
  return {{"criterion", r.criterion}, {"id", r.id},           {"description", r.description},
          {"pass", r.pass},           {"measured", r.measured}, {"seconds", r.seconds}};
}

json suite_report(std::string_view suite, const std::vector<CheckResult>& results) {
  json checks = json::array();
  bool pass = true;
  for (const auto& r : results) {
    checks.push_back(to_json(r));
    pass = pass && r.pass;
  }
  return {{"suite", std::string(suite)}, {"checks", checks}, {"pass", pass}};
}

}  // namespace mlmc
