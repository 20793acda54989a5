#include "persuade/bandits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "persuade/core.hpp"

namespace persuade::bandits {

DiscountedArmStats::DiscountedArmStats(ArmIndex arms, double discount)
    : discount_(discount),
      counts_(Eigen::ArrayXd::Zero(arms)),
      sums_(Eigen::ArrayXd::Zero(arms)) {
  if (arms <= 0) throw DomainError("bandit needs at least one arm");
  if (!(discount > 0.0 && discount <= 1.0)) {
    throw DomainError("bandit discount must lie in (0, 1]");
  }
}

Eigen::ArrayXd DiscountedArmStats::means() const {
  return (counts_ >= kUnpulledCount).select(sums_ / counts_.max(kUnpulledCount), 0.0);
}

ArmIndex ducb_select(const DiscountedArmStats& stats, double exploration_coeff) {
  const auto& counts = stats.counts();
  for (ArmIndex i = 0; i < counts.size(); ++i) {
    if (counts[i] < kUnpulledCount) return i;
  }
  const double log_total = std::max(std::log(stats.total_count()), 0.0);
  const Eigen::ArrayXd scores =
      stats.sums() / counts + exploration_coeff * (log_total / counts).sqrt();
  return argmax(scores);
}

void ducb_update(DiscountedArmStats& stats, ArmIndex arm, double reward) {
  if (!std::isfinite(reward)) throw DomainError("bandit reward must be finite");
  if (arm < 0 || arm >= stats.arms()) throw DomainError("arm index out of range");
  stats.counts_ *= stats.discount_;
  stats.sums_ *= stats.discount_;
  stats.counts_[arm] += 1.0;
  stats.sums_[arm] += reward;
  stats.total_count_ = stats.discount_ * stats.total_count_ + 1.0;
  ++stats.updates_;
}

double EpsilonSchedule::at(std::int64_t t) const {
  const double decay_steps = decay_fraction * static_cast<double>(horizon);
  if (decay_steps <= 0.0 || static_cast<double>(t) >= decay_steps) return eps_end;
  return eps_start + (eps_end - eps_start) * (static_cast<double>(t) / decay_steps);
}

ArmIndex argmax(const Eigen::ArrayXd& values) {
  ArmIndex best = 0;
  for (ArmIndex i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

ArmIndex deg_select(const Eigen::ArrayXd& values, const EpsilonSchedule& schedule,
                    std::int64_t t, Rng& rng) {
  if (t < 0 || t >= schedule.horizon) {
    throw std::out_of_range("epsilon-greedy step outside the schedule horizon");
  }
  if (rng.uniform() < schedule.at(t)) {
    return static_cast<ArmIndex>(rng.index(static_cast<std::size_t>(values.size())));
  }
  return argmax(values);
}

QTable::QTable(int actions, double learning_rate, double discount, double exploration)
    : actions_(actions),
      learning_rate_(learning_rate),
      discount_(discount),
      exploration_(exploration) {
  if (actions <= 0) throw DomainError("Q-table needs at least one action");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw DomainError("learning rate must lie in (0, 1]");
  }
  if (!(discount >= 0.0 && discount < 1.0)) {
    throw DomainError("Q-learning discount must lie in [0, 1)");
  }
  set_exploration(exploration);
}

void QTable::set_exploration(double exploration) {
  if (!(exploration >= 0.0 && exploration <= 1.0)) {
    throw DomainError("exploration rate must lie in [0, 1]");
  }
  exploration_ = exploration;
}

double QTable::value(StateKey s, int a) const {
  const auto it = table_.find(s);
  return it == table_.end() ? 0.0 : it->second[a];
}

double QTable::max_value(StateKey s) const {
  const auto it = table_.find(s);
  return it == table_.end() ? 0.0 : it->second.maxCoeff();
}

int QTable::greedy(StateKey s) const {
  const auto it = table_.find(s);
  return it == table_.end() ? 0 : static_cast<int>(argmax(it->second));
}

int QTable::select(StateKey s, Rng& rng) const {
  if (rng.uniform() < exploration_) {
    return static_cast<int>(rng.index(static_cast<std::size_t>(actions_)));
  }
  return greedy(s);
}

void q_update(QTable& table, StateKey s, int a, double reward,
              std::optional<StateKey> next) {
  if (!std::isfinite(reward)) throw DomainError("Q-learning reward must be finite");
  if (a < 0 || a >= table.actions_) throw DomainError("action index out of range");
  const double bootstrap = next ? table.max_value(*next) : 0.0;
  auto [it, inserted] = table.table_.try_emplace(s, Eigen::ArrayXd::Zero(table.actions_));
  double& q = it->second[a];
  q += table.learning_rate_ * (reward + table.discount_ * bootstrap - q);
}

ContextualDucb::ContextualDucb(ArmIndex arms, double discount, double exploration_coeff)
    : arms_(arms), discount_(discount), exploration_coeff_(exploration_coeff) {
  // Validates the arguments once up front.
  DiscountedArmStats probe(arms, discount);
}

const DiscountedArmStats* ContextualDucb::find(ContextKey context) const {
  const auto it = table_.find(context);
  return it == table_.end() ? nullptr : &it->second;
}

ArmIndex contextual_select(const ContextualDucb& bandit, ContextKey context) {
  const auto* stats = bandit.find(context);
  if (stats == nullptr) return 0;
  return ducb_select(*stats, bandit.exploration_coeff());
}

void contextual_update(ContextualDucb& bandit, ContextKey context, ArmIndex arm,
                       double reward) {
  auto [it, inserted] =
      bandit.table_.try_emplace(context, bandit.arms_, bandit.discount_);
  ducb_update(it->second, arm, reward);
}

}  // namespace persuade::bandits
