#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mlmc {

enum class ErrorCode {
  invalid_resolution,
  invalid_level,
  invalid_parameter,
  out_of_domain,
  capacity,
  bad_density,
  kernel_leakage,
  not_normalized,
  partition_mismatch,
  not_unique,
  no_convergence,
  symmetrization,
  config,
  io,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code; the CLI maps codes to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace mlmc
