#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <vector>

#include "persuade/bandits.hpp"
#include "persuade/core.hpp"
#include "persuade/rng.hpp"

namespace persuade::bandits {
namespace {

// Chi-square critical value for df = 4 at p = 0.01.
constexpr double kChi2Df4 = 13.277;

// Exploration coefficient for the simulated bandit problems (rewards in [0, 1]).
constexpr double kCoeff = 0.5;

double chi_square(const std::vector<std::int64_t>& counts, double expected) {
  double stat = 0.0;
  for (auto n : counts) stat += (n - expected) * (n - expected) / expected;
  return stat;
}

TEST(DiscountedArmStats, UndiscountedMean) {
  DiscountedArmStats s(1, 1.0);
  for (double r : {1.0, 0.0, 1.0}) ducb_update(s, 0, r);
  EXPECT_NEAR(s.means()(0), 2.0 / 3.0, 1e-15);
}

TEST(DiscountedArmStats, HalfDiscountRecurrence) {
  DiscountedArmStats s(1, 0.5);
  ducb_update(s, 0, 1.0);
  ducb_update(s, 0, 0.0);
  EXPECT_NEAR(s.means()(0), 1.0 / 3.0, 1e-15);
}

TEST(DiscountedArmStats, ConstantStreamKeepsItsMean) {
  for (double gamma : {0.3, 0.9, 1.0}) {
    DiscountedArmStats s(2, gamma);
    for (int i = 0; i < 50; ++i) ducb_update(s, 1, 0.7);
    EXPECT_NEAR(s.means()(1), 0.7, 1e-12);
    EXPECT_EQ(s.means()(0), 0.0);
  }
}

TEST(DiscountedArmStats, DiscountedCountIdentityAfterEveryUpdate) {
  for (double gamma : {0.5, 0.9, 0.95, 0.999}) {
    DiscountedArmStats s(4, gamma);
    Rng rng(13);
    for (int k = 1; k <= 3000; ++k) {
      ducb_update(s, static_cast<ArmIndex>(rng.index(4)), rng.uniform());
      const double expected = (1.0 - std::pow(gamma, k)) / (1.0 - gamma);
      ASSERT_NEAR(s.total_count(), expected, 1e-9) << gamma << " " << k;
      ASSERT_NEAR(s.counts().sum(), expected, 1e-9);
      ASSERT_LE(s.total_count(), static_cast<double>(k) + 1e-9);
      ASSERT_TRUE((s.counts() >= 0.0).all());
    }
    EXPECT_EQ(s.updates(), 3000);
  }
}

TEST(DiscountedArmStats, RejectsBadUpdates) {
  DiscountedArmStats s(2, 0.9);
  EXPECT_THROW(ducb_update(s, 0, std::nan("")), DomainError);
  EXPECT_THROW(ducb_update(s, 0, INFINITY), DomainError);
  EXPECT_THROW(ducb_update(s, 2, 1.0), DomainError);
  EXPECT_EQ(s.updates(), 0);
}

TEST(DucbSelect, UnpulledArmsComeFirstInIndexOrder) {
  DiscountedArmStats s(3, 0.9);
  EXPECT_EQ(ducb_select(s, 2.0), 0);
  ducb_update(s, 0, 10.0);
  EXPECT_EQ(ducb_select(s, 2.0), 1);
  ducb_update(s, 2, 10.0);
  EXPECT_EQ(ducb_select(s, 2.0), 1);
}

// Fraction of the final 1000 of 5000 pulls spent on arm 0, averaged over
// 100 seeds; arms pay Bernoulli(means[arm]) and optionally swap at 2500.
struct BernoulliRun {
  double final_share_arm0 = 0.0;
  double final_share_arm1 = 0.0;
};

BernoulliRun run_bernoulli(std::uint64_t seed, bool swap_at_midpoint) {
  DiscountedArmStats s(2, 0.95);
  Rng rng(seed);
  std::array<double, 2> means = {0.9, 0.1};
  BernoulliRun out;
  for (int t = 0; t < 5000; ++t) {
    if (swap_at_midpoint && t == 2500) std::swap(means[0], means[1]);
    const auto arm = ducb_select(s, kCoeff);
    ducb_update(s, arm, rng.bernoulli(means[static_cast<std::size_t>(arm)]) ? 1.0 : 0.0);
    if (t >= 4000) (arm == 0 ? out.final_share_arm0 : out.final_share_arm1) += 1.0 / 1000.0;
  }
  return out;
}

TEST(DucbSelect, StationaryBernoulliArms) {
  double share = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) share += run_bernoulli(seed, false).final_share_arm0;
  EXPECT_GE(share / 100.0, 0.90);
}

TEST(DucbSelect, TracksAbruptSwap) {
  int dominated = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    dominated += run_bernoulli(seed, true).final_share_arm1 > 0.5;
  }
  EXPECT_GE(dominated, 85);
}

TEST(DucbSelect, DeterministicTrace) {
  auto trace = [] {
    DiscountedArmStats s(5, 0.9);
    Rng rng(99);
    std::vector<ArmIndex> arms;
    for (int t = 0; t < 500; ++t) {
      const auto a = ducb_select(s, 2.0);
      ducb_update(s, a, rng.uniform() * static_cast<double>(a));
      arms.push_back(a);
    }
    return arms;
  };
  EXPECT_EQ(trace(), trace());
}

TEST(EpsilonSchedule, Endpoints) {
  const EpsilonSchedule sched{1.0, 0.05, 0.75, 2000};
  EXPECT_EQ(sched.at(0), 1.0);
  EXPECT_NEAR(sched.at(1500), 0.05, 1e-15);
  EXPECT_NEAR(sched.at(750), 0.525, 1e-12);
  EXPECT_EQ(sched.at(1999), 0.05);
  EXPECT_EQ(sched.at(100000), 0.05);
}

TEST(EpsilonSchedule, NonIncreasing) {
  const EpsilonSchedule sched{0.8, 0.1, 0.5, 777};
  for (std::int64_t t = 1; t < 1000; ++t) EXPECT_LE(sched.at(t), sched.at(t - 1));
}

TEST(DegSelect, ZeroEpsilonIsArgmax) {
  const EpsilonSchedule sched{0.0, 0.0, 0.75, 1000};
  Eigen::ArrayXd values(4);
  values << 0.1, 0.7, 0.7, -1.0;
  Rng rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(deg_select(values, sched, i, rng), 1);
}

TEST(DegSelect, FullEpsilonIsUniform) {
  const EpsilonSchedule sched{1.0, 1.0, 0.75, 10};
  Eigen::ArrayXd values(5);
  values << 5.0, 0.0, 0.0, 0.0, 0.0;
  Rng rng(2);
  std::vector<std::int64_t> counts(5, 0);
  for (int i = 0; i < 100000; ++i) ++counts[static_cast<std::size_t>(deg_select(values, sched, 0, rng))];
  EXPECT_LT(chi_square(counts, 20000.0), kChi2Df4);
}

TEST(Argmax, InvariantToPositiveScaling) {
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    Eigen::ArrayXd v(6);
    for (auto& x : v) x = 2.0 * rng.uniform() - 1.0;
    const double scale = 1e-3 + 1e3 * rng.uniform();
    EXPECT_EQ(argmax(v), argmax(v * scale));
  }
}

TEST(Argmax, TiesGoToLowestIndex) {
  Eigen::ArrayXd v(3);
  v << 1.0, 2.0, 2.0;
  EXPECT_EQ(argmax(v), 1);
}

TEST(QTable, UnvisitedEntriesAreZero) {
  QTable q(3, 0.1, 0.9, 0.0);
  EXPECT_EQ(q.value(42, 2), 0.0);
  EXPECT_EQ(q.max_value(42), 0.0);
  EXPECT_EQ(q.greedy(42), 0);
  EXPECT_EQ(q.states(), 0u);
}

TEST(QTable, FreshTerminalUpdate) {
  QTable q(2, 0.1, 0.9, 0.0);
  q_update(q, 0, 1, 1.0, std::nullopt);
  EXPECT_NEAR(q.value(0, 1), 0.1, 1e-15);
  EXPECT_EQ(q.greedy(0), 1);
}

TEST(QTable, RepeatedTerminalUpdateConverges) {
  QTable q(2, 0.1, 0.9, 0.0);
  int updates = 0;
  while (std::abs(q.value(0, 0) - 3.0) > 1e-6) {
    q_update(q, 0, 0, 3.0, std::nullopt);
    ASSERT_LE(++updates, 200);
  }
}

TEST(QTable, TwoStateChainMatchesValueIteration) {
  // States 0 and 1, actions stay (0) and move (1); deterministic moves.
  // Rewards: staying in 1 pays 1, moving from 0 pays 0.5, else 0.
  constexpr double gamma = 0.9;
  auto next_state = [](int s, int a) { return a == 0 ? s : 1 - s; };
  auto reward = [](int s, int a) {
    if (s == 1 && a == 0) return 1.0;
    if (s == 0 && a == 1) return 0.5;
    return 0.0;
  };
  double vi[2][2] = {{0, 0}, {0, 0}};
  for (int it = 0; it < 2000; ++it) {
    double nxt[2][2];
    for (int s = 0; s < 2; ++s) {
      for (int a = 0; a < 2; ++a) {
        const int s2 = next_state(s, a);
        nxt[s][a] = reward(s, a) + gamma * std::max(vi[s2][0], vi[s2][1]);
      }
    }
    std::copy(&nxt[0][0], &nxt[0][0] + 4, &vi[0][0]);
  }

  QTable q(2, 0.1, gamma, 1.0);
  Rng rng(8);
  int s = 0;
  for (int step = 0; step < 200000; ++step) {
    const int a = q.select(static_cast<StateKey>(s), rng);
    const int s2 = next_state(s, a);
    q_update(q, static_cast<StateKey>(s), a, reward(s, a), static_cast<StateKey>(s2));
    s = s2;
  }
  for (int st = 0; st < 2; ++st) {
    for (int a = 0; a < 2; ++a) {
      EXPECT_NEAR(q.value(static_cast<StateKey>(st), a), vi[st][a], 1e-3) << st << a;
    }
  }
}

TEST(QTable, ExplorationZeroIsGreedy) {
  QTable q(3, 0.5, 0.9, 0.0);
  q_update(q, 7, 2, 1.0, std::nullopt);
  Rng rng(3);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(q.select(7, rng), 2);
}

TEST(ContextualDucb, OppositeContextsLearnTheirOwnBestArm) {
  ContextualDucb bandit(2, 0.95, kCoeff);
  Rng rng(5);
  const double means[2][2] = {{0.9, 0.1}, {0.1, 0.9}};
  double earned = 0.0;
  double optimal = 0.0;
  for (int t = 0; t < 10000; ++t) {
    const ContextKey ctx = rng.index(2);
    const auto arm = contextual_select(bandit, ctx);
    const double r = rng.bernoulli(means[ctx][arm]) ? 1.0 : 0.0;
    contextual_update(bandit, ctx, arm, r);
    if (t >= 8000) {
      earned += means[ctx][arm];
      optimal += 0.9;
    }
  }
  EXPECT_GE(earned / optimal, 0.95);
  EXPECT_EQ(bandit.contexts(), 2u);
}

TEST(ContextualDucb, SingleContextReducesToPlainDucb) {
  ContextualDucb bandit(3, 0.9, 2.0);
  DiscountedArmStats plain(3, 0.9);
  Rng rng_a(21), rng_b(21);
  for (int t = 0; t < 2000; ++t) {
    const auto a = contextual_select(bandit, 9);
    const auto b = ducb_select(plain, 2.0);
    ASSERT_EQ(a, b) << t;
    contextual_update(bandit, 9, a, rng_a.uniform() * static_cast<double>(a + 1));
    ducb_update(plain, b, rng_b.uniform() * static_cast<double>(b + 1));
  }
}

TEST(ContextualDucb, UnseenContextStartsAtArmZero) {
  ContextualDucb bandit(3, 0.9, 2.0);
  contextual_update(bandit, 1, 0, 1.0);
  EXPECT_EQ(bandit.find(2), nullptr);
  EXPECT_EQ(contextual_select(bandit, 2), 0);
  EXPECT_EQ(contextual_select(bandit, 1), 1);
}

}  // namespace
}  // namespace persuade::bandits
