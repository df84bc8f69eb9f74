#include "mlmc/error.hpp"

namespace mlmc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_resolution: return "invalid-resolution";
    case ErrorCode::invalid_level: return "invalid-level";
    case ErrorCode::invalid_parameter: return "invalid-parameter";
    case ErrorCode::out_of_domain: return "out-of-domain";
    case ErrorCode::capacity: return "capacity";
    case ErrorCode::bad_density: return "bad-density";
    case ErrorCode::kernel_leakage: return "kernel-leakage";
    case ErrorCode::not_normalized: return "not-normalized";
    case ErrorCode::partition_mismatch: return "partition-mismatch";
    case ErrorCode::not_unique: return "not-unique";
    case ErrorCode::no_convergence: return "no-convergence";
    case ErrorCode::symmetrization: return "symmetrization";
    case ErrorCode::config: return "config";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace mlmc
