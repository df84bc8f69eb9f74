#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace mlmc {

struct CheckResult {
  int criterion = 0;
  std::string id;
  std::string description;
  bool pass = false;
  nlohmann::json measured;
  double seconds = 0.0;
};

struct VerifyOptions {
  std::uint64_t seed = 1;
};

CheckResult check_transfer_identities(const VerifyOptions& o);   // 1
CheckResult check_coarsening_exactness(const VerifyOptions& o);  // 2
CheckResult check_interpolation_error(const VerifyOptions& o);   // 3
CheckResult check_dobrushin(const VerifyOptions& o);             // 4
CheckResult check_tau_levels(const VerifyOptions& o);            // 5
CheckResult check_lift_rows(const VerifyOptions& o);             // 6
CheckResult check_seneta(const VerifyOptions& o);                // 7
CheckResult check_overlap_scaling(const VerifyOptions& o);       // 8
CheckResult check_walk_correspondence(const VerifyOptions& o);   // 9
CheckResult check_total_cost(const VerifyOptions& o);            // 10
CheckResult check_warm_start_payoff(const VerifyOptions& o);     // 11
CheckResult check_determinism(const VerifyOptions& o);           // 12

using CheckFunction = CheckResult (*)(const VerifyOptions&);

/// lemma1 | lemma2 | tau | lemma3 | walk | theorem1 | all
const std::vector<std::string_view>& suite_names();
std::vector<CheckFunction> suite_checks(std::string_view suite);

std::vector<CheckResult> run_suite(std::string_view suite, const VerifyOptions& o);

nlohmann::json to_json(const CheckResult& r);
nlohmann::json suite_report(std::string_view suite, const std::vector<CheckResult>& results);

}  // namespace mlmc
