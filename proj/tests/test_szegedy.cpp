#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mlmc/error.hpp"
#include "mlmc/spectral.hpp"
#include "mlmc/szegedy.hpp"

using namespace mlmc;

namespace {

Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

const Eigen::MatrixXd kP = mat({{0.9, 0.1}, {0.2, 0.8}});
const std::vector<double> kPi{2.0 / 3.0, 1.0 / 3.0};

}  // namespace

TEST(Walk, SingleStateIsIdentity) {
  const auto w = build_walk(mat({{1.0}}));
  ASSERT_EQ(w.u.rows(), 1);
  EXPECT_DOUBLE_EQ(w.u(0, 0), 1.0);
}

TEST(Walk, UniformTwoStateOperator) {
  const auto w = build_walk(mat({{0.5, 0.5}, {0.5, 0.5}}));
  ASSERT_EQ(w.u.rows(), 4);
  EXPECT_LE(w.unitarity_error, 1e-14);
  const Eigen::MatrixXd u2 = w.u * w.u;
  Eigen::ComplexEigenSolver<Eigen::MatrixXd> es(u2);
  int ones = 0;
  for (Eigen::Index k = 0; k < 4; ++k) ones += std::abs(es.eigenvalues()[k] - 1.0) < 1e-10;
  EXPECT_GE(ones, 2);
  // explicit entries: U = S(2TT^T - I), T|i> = |i>(|0>+|1>)/sqrt2
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(4, 2);
  t(0, 0) = t(1, 0) = t(2, 1) = t(3, 1) = M_SQRT1_2;
  Eigen::MatrixXd refl = 2.0 * t * t.transpose() - Eigen::MatrixXd::Identity(4, 4);
  Eigen::MatrixXd swap = Eigen::MatrixXd::Zero(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) swap(i * 2 + j, j * 2 + i) = 1.0;
  EXPECT_LE((Eigen::MatrixXd(w.u) - swap * refl).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Walk, RejectsBadInput) {
  EXPECT_THROW(build_walk(mat({{0.5, 0.4}, {0.5, 0.5}})), Error);
  EXPECT_THROW(build_walk(Eigen::MatrixXd::Identity(65, 65)), Error);
  try {
    build_walk(Eigen::MatrixXd::Identity(65, 65));
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::capacity);
  }
}

TEST(Discriminant, Examples) {
  const Eigen::MatrixXd sym = mat({{0.6, 0.4}, {0.4, 0.6}});
  EXPECT_LE((discriminant(sym) - sym).cwiseAbs().maxCoeff(), 1e-16);
  const auto d = discriminant(kP);
  EXPECT_DOUBLE_EQ(d(0, 0), 0.9);
  EXPECT_DOUBLE_EQ(d(0, 1), std::sqrt(0.02));
  EXPECT_DOUBLE_EQ(d(1, 0), std::sqrt(0.02));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d);
  EXPECT_NEAR(es.eigenvalues()(0), 0.7, 1e-14);
  EXPECT_NEAR(es.eigenvalues()(1), 1.0, 1e-14);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_EQ(discriminant(id), id);
}

TEST(WalkSpectrum, TwoStatePhase) {
  const auto s = walk_spectrum_check(kP, kPi);
  ASSERT_FALSE(s.skipped);
  EXPECT_NEAR(s.phase_gap, std::acos(0.7), 1e-12);
  EXPECT_NEAR(s.phase_gap, 0.79540, 1e-5);
  EXPECT_NEAR(s.delta, 0.3, 1e-12);
  EXPECT_TRUE(s.gap_ok);
  EXPECT_LE(std::sqrt(2 * 0.3), s.phase_gap);
  EXPECT_LE(s.cos_match_error, 1e-12);
  EXPECT_LE(s.restricted_match_error, 1e-12);
}

TEST(WalkSpectrum, RankOneAndIdentity) {
  const auto r = walk_spectrum_check(mat({{0.3, 0.7}, {0.3, 0.7}}), std::vector<double>{0.3, 0.7});
  ASSERT_FALSE(r.skipped);
  for (double th : r.phases)
    if (std::abs(th) > 1e-9) EXPECT_NEAR(std::abs(th), std::numbers::pi / 2, 1e-10);
  const auto id = walk_spectrum_check(Eigen::MatrixXd::Identity(2, 2), std::vector<double>{0.5, 0.5});
  ASSERT_FALSE(id.skipped);
  for (double th : id.phases) EXPECT_NEAR(th, 0.0, 1e-10);
}

TEST(WalkSpectrum, NonReversibleIsSkipped) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(3, 3);
  c(0, 1) = c(1, 2) = c(2, 0) = 1.0;
  const auto s = walk_spectrum_check(c, std::vector<double>(3, 1.0 / 3.0));
  EXPECT_TRUE(s.skipped);
  EXPECT_FALSE(s.diagnostic.empty());
}

TEST(WalkSpectrum, RandomReversibleChainsMatchTheDiscriminant) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto c = random_reversible_chain(3 + seed, seed);
    const auto s = walk_spectrum_check(c.p, c.pi);
    ASSERT_FALSE(s.skipped) << s.diagnostic;
    EXPECT_LE(s.cos_match_error, 1e-9);
    EXPECT_LE(s.restricted_match_error, 1e-9);
    EXPECT_TRUE(s.gap_ok);
  }
}

TEST(WalkEvolve, TargetIsStationary) {
  const auto w = build_walk(kP);
  const auto target = walk_target_state(w, kPi);
  const auto tr = walk_evolve(w, target, 50, target);
  ASSERT_EQ(tr.overlap.size(), 51u);
  for (double o : tr.overlap) EXPECT_NEAR(o, 1.0, 1e-12);
  EXPECT_LE(tr.max_norm_drift, 1e-12);
}

TEST(WalkEvolve, OrthogonalStartStaysOrthogonal) {
  const auto w = build_walk(kP);
  const auto target = walk_target_state(w, kPi);
  // the antisymmetric state |01> - |10> is orthogonal to the target
  std::vector<double> psi{0.0, M_SQRT1_2, -M_SQRT1_2, 0.0};
  double dot = 0.0;
  for (std::size_t i = 0; i < 4; ++i) dot += psi[i] * target[i];
  ASSERT_NEAR(dot, 0.0, 1e-15);
  const auto tr = walk_evolve(w, psi, 40, target);
  for (double o : tr.overlap) EXPECT_NEAR(o, 0.0, 1e-12);
}

TEST(WalkEvolve, AutocorrelationOscillatesAtTheWalkPhase) {
  const auto w = build_walk(kP);
  const auto target = walk_target_state(w, kPi);
  const auto psi0 = walk_lift_state(w, std::vector<double>{M_SQRT1_2, M_SQRT1_2});
  const std::size_t steps = 64;
  const auto tr = walk_evolve(w, psi0, steps, target, true);
  // exact propagation
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(psi0.data(), 4);
  const Eigen::VectorXd v0 = v;
  for (std::size_t t = 0; t <= steps; ++t) {
    EXPECT_NEAR(tr.autocorrelation[t], v0.dot(v), 1e-12);
    v = Eigen::MatrixXd(w.u) * v;
  }
  // least-squares fit a + b cos(theta t) leaves no residual
  const double theta = std::acos(0.7);
  Eigen::MatrixXd a(steps + 1, 2);
  Eigen::VectorXd y(steps + 1);
  for (std::size_t t = 0; t <= steps; ++t) {
    a(static_cast<Eigen::Index>(t), 0) = 1.0;
    a(static_cast<Eigen::Index>(t), 1) = std::cos(theta * static_cast<double>(t));
    y(static_cast<Eigen::Index>(t)) = tr.autocorrelation[t];
  }
  const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(y);
  EXPECT_LE((a * coef - y).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_GT(std::abs(coef(1)), 1e-3);
  // period 2 pi / theta, about 7.9 steps
  EXPECT_NEAR(2 * std::numbers::pi / theta, 7.899, 1e-3);
  // overlap with the target is conserved
  for (double o : tr.overlap) EXPECT_NEAR(o, tr.overlap[0], 1e-12);
}

TEST(WalkEvolve, FromStochasticMatrix) {
  const Partition p(Resolution::from_inverse(1), 1);
  const auto m = StochasticMatrix::from_dense(p, std::vector<double>{0.9, 0.1, 0.2, 0.8});
  const auto s = walk_spectrum_check(m, stationary_density(m));
  EXPECT_NEAR(s.phase_gap, std::acos(0.7), 1e-10);
  EXPECT_LE((discriminant(m) - discriminant(kP)).cwiseAbs().maxCoeff(), 1e-15);
}
