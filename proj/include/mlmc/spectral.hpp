#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "mlmc/density.hpp"
#include "mlmc/stochastic_matrix.hpp"

namespace mlmc {

/// pi^T P applied `steps` times, renormalizing mass after each step.
DiscreteDensity evolve(const DiscreteDensity& pi, const StochasticMatrix& p, std::size_t steps);

/// L1 residual ||pi P - pi||_1.
double stationary_residual(const StochasticMatrix& p, const DiscreteDensity& pi);

struct PowerIteration {
  DiscreteDensity density;
  std::size_t matvecs = 0;
  double residual = 0.0;
  bool converged = false;
};

inline constexpr std::size_t default_power_iterations = 1'000'000;

/// Iterates pi <- pi P from `start` until ||pi P - pi||_1 <= tol. The residual
/// is measured on the product already computed, so each iteration costs one matvec.
PowerIteration power_iterate(const StochasticMatrix& p, const DiscreteDensity& start, double tol,
                             std::size_t max_iterations = default_power_iterations);

struct ChainStructure {
  std::size_t classes = 0;         // strongly connected components
  std::size_t closed_classes = 0;  // components nothing leaves
  std::size_t period = 0;          // period of the closed class when unique
  bool irreducible = false;
  bool aperiodic = false;
};

ChainStructure analyze_structure(const StochasticMatrix& p);

inline constexpr double default_stationary_tolerance = 1e-10;
inline constexpr std::size_t dense_fallback_states = 512;

/// Power iteration from uniform; small or periodic chains fall back to a dense
/// solve. Throws not-unique for several closed classes and no-convergence when
/// neither route applies.
DiscreteDensity stationary_density(const StochasticMatrix& p, double tol = default_stationary_tolerance);

/// Dense LU solve of pi (P - I) = 0, sum(pi) = 1.
DiscreteDensity stationary_density_direct(const StochasticMatrix& p);

/// 1/2 max_{i,k} sum_j |P(i,j) - P(k,j)|.
double dobrushin_tau(const StochasticMatrix& p);

struct TauSampling {
  std::size_t samples = 0;
  double max_quotient = 0.0;
};

/// ||v P||_1 / ||v||_1 over random mean-zero v: half Gaussian, half e_i - e_k.
TauSampling sample_tau_quotients(const StochasticMatrix& p, std::size_t samples, std::uint64_t seed);

struct Reversibility {
  bool reversible = false;
  double max_violation = 0.0;
};

inline constexpr double reversibility_tolerance = 1e-10;

/// max_{i,j} |pi_i P_ij - pi_j P_ji|.
Reversibility check_reversibility(const StochasticMatrix& p, const DiscreteDensity& pi,
                                  double tol = reversibility_tolerance);

struct SpectralGap {
  double delta = 0.0;      // 1 - lambda_2 (signed), or 1 - sigma_2 on fallback
  double delta_abs = 0.0;  // 1 - max(|lambda_2|, |lambda_min|)
  double lambda2 = 0.0;
  double lambda_min = 0.0;
  bool reversible = false;
  double max_violation = 0.0;
  bool singular_value_fallback = false;
};

inline constexpr std::size_t dense_eigen_states = 2048;

/// Gap of D^{1/2} P D^{-1/2}. Non-reversible chains use its singular values.
SpectralGap spectral_gap(const StochasticMatrix& p, const DiscreteDensity& pi);

struct Overlap {
  double fidelity = 0.0;  // sum sqrt(a_j b_j)
  double q = 0.0;         // 1 - fidelity
  double l1 = 0.0;
  bool hellinger_ok = false;  // q <= l1 / 2
};

Overlap overlap(const DiscreteDensity& a, const DiscreteDensity& b);

/// Max over coarse bins of the range of fine values inside it, divided by h.
double variation_estimate(const PiecewiseConstantDensity& p);

/// variation_estimate over the row densities P(i, .) / h^d, maximized over i.
double kernel_variation_estimate(const StochasticMatrix& p);

struct TauComparison {
  double tau_h = 0.0;
  double tau_2h = 0.0;
  double diff = 0.0;
  double lambda_hat = 0.0;
  double bound = 0.0;  // lambda_hat * h
  double slack = 0.0;
  bool pass = false;
};

TauComparison tau_level_comparison(const StochasticMatrix& p_h, const StochasticMatrix& p_2h, double slack = 0.5);

struct SenetaCheck {
  double lhs = 0.0;  // ||pi_hat - pi||_1
  double perturbation = 0.0;  // ||P - P_hat|| (max row L1)
  double tau = 0.0;
  double rhs = 0.0;  // perturbation / (1 - tau)
  double rhs_eigen = 0.0;  // perturbation / delta_eig, reported only
  bool pass = false;
};

SenetaCheck seneta_bound_check(const StochasticMatrix& p, const StochasticMatrix& p_hat);

struct BauerFike {
  double constant = 0.0;  // ||V||_inf ||V^{-1}||_inf for the left action
  double gap = 0.0;       // min over nontrivial eigenvalues of |1 - lambda|
};

/// Dense eigendecomposition; empty above dense_fallback_states.
std::optional<BauerFike> bauer_fike_constant(const StochasticMatrix& p, const DiscreteDensity& pi);

struct SpectralReport {
  DiscreteDensity pi;
  double residual = 0.0;
  SpectralGap gap;
  double tau = 0.0;
  double delta_tau = 0.0;
  double lambda_hat = 0.0;
  std::optional<BauerFike> bauer_fike;
};

SpectralReport spectral_report(const StochasticMatrix& p);

}  // namespace mlmc
