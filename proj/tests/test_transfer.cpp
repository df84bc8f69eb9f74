#include <gtest/gtest.h>

#include <boost/rational.hpp>
#include <cmath>
#include <random>

#include "mlmc/error.hpp"
#include "mlmc/transfer.hpp"

using namespace mlmc;

namespace {

Partition part(std::int64_t inv, int d = 1) { return Partition(Resolution::from_inverse(inv), d); }

void expect_vec(std::span<const double> got, std::vector<double> want, double tol = 1e-15) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got[i], want[i], tol) << i;
}

StochasticMatrix random_chain(const Partition& p, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n = p.size();
  std::vector<double> dense(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += dense[i * n + j] = u(rng);
    for (std::size_t j = 0; j < n; ++j) dense[i * n + j] /= s;
  }
  return StochasticMatrix::from_dense(p, dense);
}

}  // namespace

TEST(LevelPair, IndexMapsAgreeWithThePartition) {
  const LevelPair lp(part(4, 2));
  EXPECT_EQ(lp.children_per_parent(), 4u);
  EXPECT_EQ(lp.coarse().resolution().inverse(), 2);
  for (std::size_t k = 0; k < lp.coarse().size(); ++k) {
    const auto ch = lp.children(k);
    ASSERT_EQ(ch.size(), 4u);
    const auto kk = lp.coarse().unflatten(k);
    const auto expect = children_of(lp.coarse(), lp.fine(), kk);
    for (std::size_t c = 0; c < 4; ++c) {
      EXPECT_EQ(ch[c], lp.fine().flatten(expect[c]));
      EXPECT_EQ(lp.parent(ch[c]), k);
    }
  }
  EXPECT_THROW(LevelPair(part(1, 1)).children(0).size() + LevelPair(part(3, 1)).parent(0), Error);
}

TEST(Restrict, Examples) {
  const LevelPair lp(part(2));
  expect_vec(restrict_sum(lp, std::vector<double>{0.3, 0.3, 0.2, 0.2}), {0.6, 0.4});
  expect_vec(restrict_sum(lp, std::vector<double>{1, 0, 0, 0}), {1, 0});
  const LevelPair lp2(part(2, 2));
  expect_vec(restrict_sum(lp2, std::vector<double>(16, 1.0)), {4, 4, 4, 4});
  EXPECT_THROW(restrict_sum(lp, std::vector<double>{1, 0}), Error);
}

TEST(Prolong, CopyMassAndAmplitude) {
  const LevelPair lp(part(2));
  expect_vec(prolong_copy(lp, std::vector<double>{0.6, 0.4}), {0.6, 0.6, 0.4, 0.4});
  const auto m = prolong_mass(lp, DiscreteDensity(lp.coarse(), {0.6, 0.4}));
  expect_vec(m.mass(), {0.3, 0.3, 0.2, 0.2});
  expect_vec(prolong_amplitude(lp, std::vector<double>{std::sqrt(0.6), std::sqrt(0.4)}),
             {std::sqrt(0.3), std::sqrt(0.3), std::sqrt(0.2), std::sqrt(0.2)});
  expect_vec(prolong_amplitude(lp, std::vector<double>{1, 0}), {M_SQRT1_2, M_SQRT1_2, 0, 0});
  EXPECT_EQ(prolong(lp, std::vector<double>{0.6, 0.4}, TransferConvention::mass_split)[0], 0.3);
  EXPECT_EQ(prolong(lp, std::vector<double>{0.6, 0.4}, TransferConvention::value_copy)[0], 0.6);
  const auto bad = [&] { prolong_amplitude(lp, std::vector<double>{0.6, 0.4}); };
  EXPECT_THROW(bad(), Error);
}

TEST(Prolong, TwoDimensional) {
  const LevelPair lp(part(2, 2));
  const auto m = prolong_mass(lp, DiscreteDensity(lp.coarse(), {1, 0, 0, 0}));
  double on_children = 0.0;
  for (std::size_t c : lp.children(0)) {
    EXPECT_DOUBLE_EQ(m[c], 0.25);
    on_children += m[c];
  }
  EXPECT_DOUBLE_EQ(on_children, 1.0);
  const auto a = prolong_amplitude(lp, std::vector<double>(4, 0.5));
  for (double v : a) EXPECT_NEAR(v, 0.25, 1e-16);
}

TEST(Transfer, RestrictIsALeftInverseOfMassProlongation) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int d : {1, 2, 3}) {
    const LevelPair lp(part(2, d));
    std::vector<double> w(lp.coarse().size());
    for (double& x : w) x = u(rng);
    const auto pi = DiscreteDensity::normalized(lp.coarse(), w);
    const auto back = restrict_sum(lp, prolong_mass(lp, pi).mass());
    for (std::size_t k = 0; k < back.size(); ++k) EXPECT_NEAR(back[k], pi[k], 1e-15);
    // squaring the amplitude prolongation matches the mass prolongation
    const auto amp = prolong_amplitude(lp, pi.amplitudes());
    const auto mass = prolong_mass(lp, pi);
    for (std::size_t i = 0; i < amp.size(); ++i) EXPECT_NEAR(amp[i] * amp[i], mass[i], 1e-15);
  }
}

TEST(CoarsenMatrix, Examples) {
  const auto p = part(2);
  const LevelPair lp(p);
  const auto id = coarsen_matrix(lp, StochasticMatrix::from_dense(p, std::vector<double>{1, 0, 0, 0, 0, 1, 0, 0,
                                                                                       0, 0, 1, 0, 0, 0, 0, 1}));
  EXPECT_EQ(id.dense(), (std::vector<double>{1, 0, 0, 1}));
  const auto q = coarsen_matrix(lp, StochasticMatrix::from_dense(p, std::vector<double>(16, 0.25)));
  EXPECT_EQ(q.dense(), (std::vector<double>{0.5, 0.5, 0.5, 0.5}));
}

TEST(CoarsenMatrix, IntertwinesWithRestriction) {
  // restrict(v^T P) = restrict(v)^T P_2h whenever v is constant on children
  const auto p = part(4, 2);
  const LevelPair lp(p);
  const auto fine = random_chain(p, 5);
  const auto coarse = coarsen_matrix(lp, fine);
  EXPECT_LE(coarse.max_row_sum_error(), 1e-13);
  std::vector<double> w(lp.coarse().size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = static_cast<double>(k + 1);
  const auto pi = DiscreteDensity::normalized(lp.coarse(), w);
  const auto lhs = restrict_sum(lp, fine.left_multiply(prolong_mass(lp, pi).mass()));
  const auto rhs = coarse.left_multiply(pi.mass());
  for (std::size_t k = 0; k < lhs.size(); ++k) EXPECT_NEAR(lhs[k], rhs[k], 1e-15);
}

TEST(LiftMatrix, Examples) {
  const auto p = part(2);
  const LevelPair lp(p);
  const auto id = lift_matrix(lp, StochasticMatrix::from_dense(lp.coarse(), std::vector<double>{1, 0, 0, 1}));
  EXPECT_EQ(id.dense(), (std::vector<double>{.5, .5, 0, 0, .5, .5, 0, 0, 0, 0, .5, .5, 0, 0, .5, .5}));
  const auto half = lift_matrix(lp, StochasticMatrix::from_dense(lp.coarse(), std::vector<double>(4, 0.5)));
  EXPECT_EQ(half.dense(), std::vector<double>(16, 0.25));
}

TEST(LiftMatrix, CoarsenUndoesLift) {
  for (int d : {1, 2}) {
    const LevelPair lp(part(4, d));
    const auto coarse = random_chain(lp.coarse(), 9 + static_cast<unsigned>(d));
    const auto round = coarsen_matrix(lp, lift_matrix(lp, coarse));
    EXPECT_LE(max_abs_difference(round, coarse), 1e-15);
  }
}

TEST(LiftMatrix, ExactOverRationals) {
  using Q = boost::rational<long long>;
  const LevelPair lp(part(2));
  const std::vector<Q> coarse{Q(9, 10), Q(1, 10), Q(1, 5), Q(4, 5)};
  const auto fine = lift_dense<Q>(lp, coarse);
  for (std::size_t i = 0; i < 4; ++i) {
    Q s = 0;
    for (std::size_t j = 0; j < 4; ++j) s += fine[i * 4 + j];
    EXPECT_EQ(s, Q(1));
  }
  EXPECT_EQ(fine[0], Q(9, 20));
  EXPECT_EQ(fine[3], Q(1, 20));
  // stationary density of the lift is the mass prolongation of (2/3, 1/3)
  const std::vector<Q> pi{Q(1, 3), Q(1, 3), Q(1, 6), Q(1, 6)};
  for (std::size_t j = 0; j < 4; ++j) {
    Q s = 0;
    for (std::size_t i = 0; i < 4; ++i) s += pi[i] * fine[i * 4 + j];
    EXPECT_EQ(s, pi[j]);
  }
}
