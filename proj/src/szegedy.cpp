#include "mlmc/szegedy.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "mlmc/error.hpp"
#include "mlmc/parallel.hpp"
#include "mlmc/simd/kernels.hpp"

namespace mlmc {

namespace {

constexpr double unitarity_tolerance = 1e-10;
constexpr double eigen_unit_tolerance = 1e-9;

Eigen::MatrixXd dense_of(const StochasticMatrix& p) {
  const auto n = static_cast<Eigen::Index>(p.size());
  const auto flat = p.dense();
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = flat[static_cast<std::size_t>(i * n + j)];
  return m;
}

void require_square_stochastic(const Eigen::MatrixXd& p, std::size_t cap) {
  if (p.rows() != p.cols() || p.rows() == 0) fail(ErrorCode::invalid_parameter, "walk needs a square nonempty matrix");
  if (static_cast<std::size_t>(p.rows()) > cap)
    fail(ErrorCode::capacity, fmt::format("walk on {} states exceeds cap {}", p.rows(), cap));
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    if ((p.row(i).array() < 0.0).any()) fail(ErrorCode::not_normalized, fmt::format("row {} has a negative entry", i));
    const double s = p.row(i).sum();
    if (std::abs(s - 1.0) > 1e-10) fail(ErrorCode::not_normalized, fmt::format("row {} sums to {:.17g}", i, s));
  }
}

// swap |i>|j> <-> |j>|i>
Eigen::MatrixXd swap_rows(const Eigen::MatrixXd& m, std::size_t n) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out.row(static_cast<Eigen::Index>(j * n + i)) = m.row(static_cast<Eigen::Index>(i * n + j));
  return out;
}

}  // namespace

WalkOperator build_walk(const Eigen::MatrixXd& p, std::size_t cap) {
  require_square_stochastic(p, cap);
  const auto n = static_cast<std::size_t>(p.rows());
  const auto nn = static_cast<Eigen::Index>(n * n);
  WalkOperator w;
  w.n = n;
  w.t = Eigen::MatrixXd::Zero(nn, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      w.t(static_cast<Eigen::Index>(i * n + j), static_cast<Eigen::Index>(i)) =
          std::sqrt(p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
  Eigen::MatrixXd reflect = 2.0 * w.t * w.t.transpose();
  reflect.diagonal().array() -= 1.0;
  w.u = swap_rows(reflect, n);
  Eigen::MatrixXd gram = w.u.transpose() * w.u;
  gram.diagonal().array() -= 1.0;
  w.unitarity_error = gram.cwiseAbs().maxCoeff();
  if (w.unitarity_error > unitarity_tolerance)
    fail(ErrorCode::not_normalized, fmt::format("walk operator not unitary: error {:.3e}", w.unitarity_error));
  return w;
}

WalkOperator build_walk(const StochasticMatrix& p, std::size_t cap) {
  if (p.size() > cap) fail(ErrorCode::capacity, fmt::format("walk on {} states exceeds cap {}", p.size(), cap));
  return build_walk(dense_of(p), cap);
}

Eigen::MatrixXd discriminant(const Eigen::MatrixXd& p) {
  return (p.array() * p.transpose().array()).sqrt().matrix();
}

Eigen::MatrixXd discriminant(const StochasticMatrix& p) { return discriminant(dense_of(p)); }

WalkSpectrum walk_spectrum_check(const Eigen::MatrixXd& p, std::span<const double> pi, std::size_t cap) {
  require_square_stochastic(p, cap);
  const auto n = static_cast<std::size_t>(p.rows());
  const auto ni = static_cast<Eigen::Index>(n);
  WalkSpectrum out;
  if (pi.size() != n) fail(ErrorCode::partition_mismatch, "stationary density has the wrong size");

  double violation = 0.0;
  for (Eigen::Index i = 0; i < ni; ++i)
    for (Eigen::Index j = 0; j < ni; ++j)
      violation = std::max(violation, std::abs(pi[static_cast<std::size_t>(i)] * p(i, j) -
                                               pi[static_cast<std::size_t>(j)] * p(j, i)));
  if (violation > 1e-10) {
    out.skipped = true;
    out.diagnostic = fmt::format("chain not reversible (detailed-balance violation {:.3e}); check skipped", violation);
    return out;
  }

  const WalkOperator w = build_walk(p, cap);
  out.unitarity_error = w.unitarity_error;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> deig(discriminant(p));
  const Eigen::VectorXd lambda = deig.eigenvalues();
  out.discriminant_eigenvalues.assign(lambda.data(), lambda.data() + ni);
  out.delta = n > 1 ? 1.0 - lambda(ni - 2) : 1.0;

  // restricted operator on span{T v_k, S T v_k}
  const Eigen::MatrixXd tv = w.t * deig.eigenvectors();
  Eigen::MatrixXd basis(tv.rows(), 2 * ni);
  basis << tv, swap_rows(tv, n);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(basis, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > 1e-9 * sv(0)) ++rank;
  const Eigen::MatrixXd q = svd.matrixU().leftCols(rank);
  const Eigen::MatrixXd restricted = q.transpose() * w.u * q;
  Eigen::EigenSolver<Eigen::MatrixXd> reig(restricted, false);
  for (Eigen::Index k = 0; k < reig.eigenvalues().size(); ++k) out.phases.push_back(std::arg(reig.eigenvalues()(k)));
  std::sort(out.phases.begin(), out.phases.end());

  // expected cosines: one per unit eigenvalue, a +-theta pair otherwise, then the complement
  std::vector<double> expected, restricted_expected;
  std::size_t pairs = 0, plus = 0, minus = 0;
  for (Eigen::Index k = 0; k < ni; ++k) {
    const double l = lambda(k);
    if (std::abs(l - 1.0) <= eigen_unit_tolerance) {
      ++plus;
      expected.push_back(l);
      restricted_expected.push_back(l);
    } else if (std::abs(l + 1.0) <= eigen_unit_tolerance) {
      ++minus;
      expected.push_back(l);
      restricted_expected.push_back(l);
    } else {
      ++pairs;
      expected.insert(expected.end(), {l, l});
      restricted_expected.insert(restricted_expected.end(), {l, l});
    }
  }
  const std::size_t symmetric = n * (n + 1) / 2, antisymmetric = n * (n - 1) / 2;
  expected.insert(expected.end(), symmetric - pairs - plus, -1.0);
  expected.insert(expected.end(), antisymmetric - pairs - minus, 1.0);

  Eigen::EigenSolver<Eigen::MatrixXd> ueig(Eigen::MatrixXd(w.u), false);
  std::vector<double> cosines;
  for (Eigen::Index k = 0; k < ueig.eigenvalues().size(); ++k) cosines.push_back(ueig.eigenvalues()(k).real());
  std::sort(cosines.begin(), cosines.end());
  std::sort(expected.begin(), expected.end());
  out.cos_match_error = cosines.size() == expected.size() ? 0.0 : std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < std::min(cosines.size(), expected.size()); ++k)
    out.cos_match_error = std::max(out.cos_match_error, std::abs(cosines[k] - expected[k]));

  std::vector<double> restricted_cos;
  for (double th : out.phases) restricted_cos.push_back(std::cos(th));
  std::sort(restricted_cos.begin(), restricted_cos.end());
  std::sort(restricted_expected.begin(), restricted_expected.end());
  out.restricted_match_error =
      restricted_cos.size() == restricted_expected.size() ? 0.0 : std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < std::min(restricted_cos.size(), restricted_expected.size()); ++k)
    out.restricted_match_error = std::max(out.restricted_match_error, std::abs(restricted_cos[k] - restricted_expected[k]));

  out.phase_gap = 0.0;
  for (double th : out.phases)
    if (std::abs(th) > 1e-7 && (out.phase_gap == 0.0 || std::abs(th) < out.phase_gap)) out.phase_gap = std::abs(th);
  out.gap_ok = out.phase_gap >= std::sqrt(2.0 * out.delta) - 1e-12;
  return out;
}

WalkSpectrum walk_spectrum_check(const StochasticMatrix& p, const DiscreteDensity& pi, std::size_t cap) {
  require_same_partition(p.partition(), pi.partition());
  if (p.size() > cap) fail(ErrorCode::capacity, fmt::format("walk on {} states exceeds cap {}", p.size(), cap));
  return walk_spectrum_check(dense_of(p), pi.mass(), cap);
}

std::vector<double> walk_lift_state(const WalkOperator& w, std::span<const double> amplitudes) {
  if (amplitudes.size() != w.n) fail(ErrorCode::partition_mismatch, "amplitude vector has the wrong size");
  const Eigen::Map<const Eigen::VectorXd> a(amplitudes.data(), static_cast<Eigen::Index>(w.n));
  const Eigen::VectorXd lifted = w.t * a;
  return {lifted.data(), lifted.data() + lifted.size()};
}

std::vector<double> walk_target_state(const WalkOperator& w, std::span<const double> pi) {
  std::vector<double> amp(pi.size());
  for (std::size_t i = 0; i < pi.size(); ++i) amp[i] = std::sqrt(pi[i]);
  return walk_lift_state(w, amp);
}

WalkTrace walk_evolve(const WalkOperator& w, std::span<const double> psi0, std::size_t steps,
                      std::span<const double> target, bool keep_states) {
  const std::size_t dim = w.n * w.n;
  if (psi0.size() != dim || target.size() != dim)
    fail(ErrorCode::partition_mismatch, fmt::format("walk states must have {} amplitudes", dim));
  const double norm0 = std::sqrt(simd::dot(psi0, psi0));
  if (std::abs(norm0 - 1.0) > 1e-10) fail(ErrorCode::not_normalized, fmt::format("initial state has norm {:.17g}", norm0));

  WalkTrace trace;
  std::vector<double> cur(psi0.begin(), psi0.end()), next(dim);
  auto record = [&] {
    trace.overlap.push_back(simd::dot(target, cur));
    trace.autocorrelation.push_back(simd::dot(psi0, cur));
    trace.max_norm_drift = std::max(trace.max_norm_drift, std::abs(std::sqrt(simd::dot(cur, cur)) - 1.0));
    if (keep_states) trace.states.push_back(cur);
  };
  record();
  for (std::size_t s = 0; s < steps; ++s) {
    parallel_for(dim, [&](std::size_t r) {
      next[r] = simd::dot(std::span<const double>(w.u.data() + r * dim, dim), cur);
    });
    cur.swap(next);
    record();
  }
  if (trace.max_norm_drift > 1e-10 * static_cast<double>(std::max<std::size_t>(steps, 1)))
    fail(ErrorCode::not_normalized, fmt::format("walk norm drifted by {:.3e}", trace.max_norm_drift));
  return trace;
}

RandomChain random_reversible_chain(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd weights(ni, ni);
  for (Eigen::Index i = 0; i < ni; ++i)
    for (Eigen::Index j = i; j < ni; ++j) weights(i, j) = weights(j, i) = unit(rng);
  const Eigen::VectorXd rows = weights.rowwise().sum();
  RandomChain out;
  out.p = rows.cwiseInverse().asDiagonal() * weights;
  const double total = rows.sum();
  for (Eigen::Index i = 0; i < ni; ++i) out.pi.push_back(rows(i) / total);
  return out;
}

}  // namespace mlmc
