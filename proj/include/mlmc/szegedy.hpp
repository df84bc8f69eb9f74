#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mlmc/density.hpp"
#include "mlmc/stochastic_matrix.hpp"

namespace mlmc {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr std::size_t default_walk_cap = 64;

/// U = S (2 T T^T - I) on C^n (x) C^n, basis |i>|j> at index i*n + j.
struct WalkOperator {
  std::size_t n = 0;
  Eigen::MatrixXd t;  // n^2 x n isometry, T|i> = |i> (x) sum_j sqrt(P_ij)|j>
  RowMajorMatrix u;
  double unitarity_error = 0.0;  // max |U^T U - I|
};

WalkOperator build_walk(const Eigen::MatrixXd& p, std::size_t cap = default_walk_cap);
WalkOperator build_walk(const StochasticMatrix& p, std::size_t cap = default_walk_cap);

/// D(i,j) = sqrt(P(i,j) P(j,i)).
Eigen::MatrixXd discriminant(const Eigen::MatrixXd& p);
Eigen::MatrixXd discriminant(const StochasticMatrix& p);

struct WalkSpectrum {
  bool skipped = false;
  std::string diagnostic;
  std::vector<double> discriminant_eigenvalues;  // ascending
  std::vector<double> phases;  // eigenphases of U on span{T v, S T v}, ascending
  double cos_match_error = 0.0;  // full spectrum of U against the spectrum of D plus the +-1 padding
  double restricted_match_error = 0.0;  // cos of restricted phases against the spectrum of D
  double phase_gap = 0.0;  // smallest nonzero |theta|
  double delta = 0.0;      // 1 - lambda_2(D)
  bool gap_ok = false;     // phase_gap >= sqrt(2 delta)
  double unitarity_error = 0.0;
};

WalkSpectrum walk_spectrum_check(const Eigen::MatrixXd& p, std::span<const double> pi,
                                 std::size_t cap = default_walk_cap);
WalkSpectrum walk_spectrum_check(const StochasticMatrix& p, const DiscreteDensity& pi,
                                 std::size_t cap = default_walk_cap);

/// sum_ij sqrt(pi_i P_ij) |i>|j>, the phase-0 eigenvector for reversible P.
std::vector<double> walk_target_state(const WalkOperator& w, std::span<const double> pi);

/// T applied to an amplitude vector over the chain states.
std::vector<double> walk_lift_state(const WalkOperator& w, std::span<const double> amplitudes);

struct WalkTrace {
  std::vector<double> overlap;          // <target|psi_t>, t = 0..steps
  std::vector<double> autocorrelation;  // <psi_0|psi_t>
  double max_norm_drift = 0.0;
  std::vector<std::vector<double>> states;  // only when requested
};

WalkTrace walk_evolve(const WalkOperator& w, std::span<const double> psi0, std::size_t steps,
                      std::span<const double> target, bool keep_states = false);

struct RandomChain {
  Eigen::MatrixXd p;
  std::vector<double> pi;
};

/// Row-normalized random symmetric weights; reversible with pi proportional to the weight row sums.
RandomChain random_reversible_chain(std::size_t n, std::uint64_t seed);

}  // namespace mlmc
