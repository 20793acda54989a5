#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>

#include <Eigen/Core>

#include "persuade/rng.hpp"

namespace persuade::bandits {

using ArmIndex = Eigen::Index;

/// Discounted counts below this are treated as "never pulled".
inline constexpr double kUnpulledCount = 1e-9;

/// Geometrically discounted per-arm counts and reward sums. Every update
/// discounts all arms, then credits the pulled one.
class DiscountedArmStats {
 public:
  DiscountedArmStats(ArmIndex arms, double discount);

  ArmIndex arms() const { return counts_.size(); }
  double discount() const { return discount_; }
  const Eigen::ArrayXd& counts() const { return counts_; }
  const Eigen::ArrayXd& sums() const { return sums_; }
  double total_count() const { return total_count_; }
  std::int64_t updates() const { return updates_; }

  /// Discounted mean per arm; 0 for arms never pulled.
  Eigen::ArrayXd means() const;

 private:
  friend void ducb_update(DiscountedArmStats&, ArmIndex, double);

  double discount_;
  Eigen::ArrayXd counts_;
  Eigen::ArrayXd sums_;
  double total_count_ = 0.0;
  std::int64_t updates_ = 0;
};

/// Discounted UCB: unpulled arms first in index order, then
/// argmax(mean + coeff * sqrt(log(total) / count)), ties to the lowest index.
ArmIndex ducb_select(const DiscountedArmStats& stats, double exploration_coeff);

/// Throws DomainError on a non-finite reward or out-of-range arm.
void ducb_update(DiscountedArmStats& stats, ArmIndex arm, double reward);

/// Linear decay from eps_start to eps_end over the first
/// decay_fraction * horizon steps, constant afterwards.
struct EpsilonSchedule {
  double eps_start = 1.0;
  double eps_end = 0.05;
  double decay_fraction = 0.75;
  std::int64_t horizon = 2000;

  double at(std::int64_t t) const;
};

/// Lowest index among the maxima.
ArmIndex argmax(const Eigen::ArrayXd& values);

/// Epsilon-greedy over `values`. Always draws one uniform, plus an arm index
/// when exploring.
ArmIndex deg_select(const Eigen::ArrayXd& values, const EpsilonSchedule& schedule,
                    std::int64_t t, Rng& rng);

using StateKey = std::uint64_t;

/// Tabular action values; unvisited entries read as 0.
class QTable {
 public:
  QTable(int actions, double learning_rate, double discount, double exploration);

  int actions() const { return actions_; }
  double learning_rate() const { return learning_rate_; }
  double discount() const { return discount_; }
  double exploration() const { return exploration_; }
  void set_exploration(double exploration);

  double value(StateKey s, int a) const;
  double max_value(StateKey s) const;
  /// Greedy action, ties to the lowest index.
  int greedy(StateKey s) const;
  /// Epsilon-greedy with the table's exploration rate.
  int select(StateKey s, Rng& rng) const;
  std::size_t states() const { return table_.size(); }

 private:
  friend void q_update(QTable&, StateKey, int, double, std::optional<StateKey>);

  int actions_;
  double learning_rate_;
  double discount_;
  double exploration_;
  std::unordered_map<StateKey, Eigen::ArrayXd> table_;
};

/// One-step Q-learning backup; `next == nullopt` is terminal (bootstrap 0).
void q_update(QTable& table, StateKey s, int a, double reward,
              std::optional<StateKey> next);

using ContextKey = std::uint64_t;

/// One independent DiscountedArmStats per context.
class ContextualDucb {
 public:
  ContextualDucb(ArmIndex arms, double discount, double exploration_coeff);

  ArmIndex arms() const { return arms_; }
  double discount() const { return discount_; }
  double exploration_coeff() const { return exploration_coeff_; }
  /// nullptr for a context never updated.
  const DiscountedArmStats* find(ContextKey context) const;
  std::size_t contexts() const { return table_.size(); }

 private:
  friend void contextual_update(ContextualDucb&, ContextKey, ArmIndex, double);

  ArmIndex arms_;
  double discount_;
  double exploration_coeff_;
  std::map<ContextKey, DiscountedArmStats> table_;
};

ArmIndex contextual_select(const ContextualDucb& bandit, ContextKey context);
void contextual_update(ContextualDucb& bandit, ContextKey context, ArmIndex arm,
                       double reward);

}  // namespace persuade::bandits
