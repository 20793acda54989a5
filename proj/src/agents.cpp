#include "persuade/agents.hpp"

#include <cmath>
#include <cstdlib>
#include <deque>

namespace persuade::agents {

std::vector<double> unit_grid(double step) {
  if (!(step > 0.0 && step <= 1.0)) throw DomainError("grid step must lie in (0, 1]");
  const long n = std::lround(1.0 / step);
  if (std::abs(static_cast<double>(n) * step - 1.0) > 1e-9) {
    throw DomainError("grid step must divide 1");
  }
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(n) + 1);
  for (long k = 0; k <= n; ++k) grid.push_back(static_cast<double>(k) / static_cast<double>(n));
  return grid;
}

LetterSpace letter_strategy_space(bool contract_mode, double p2_step, double c_step) {
  const std::vector<double> p1s = {0.0, 0.5, 1.0};
  const auto p2s = unit_grid(p2_step);
  const auto cs = contract_mode ? unit_grid(c_step) : std::vector<double>{0.0};
  std::vector<LetterArm> arms;
  for (double p1 : p1s) {
    for (double p2 : p2s) {
      for (double c : cs) arms.push_back({LetterPolicy(p1, p2), c});
    }
  }
  return LetterSpace(std::move(arms));
}

GridSpace grid_strategy_space(bool contract_mode, double p_step, double c_step) {
  const auto ps = unit_grid(p_step);
  const auto cs = contract_mode ? unit_grid(c_step) : std::vector<double>{0.0};
  std::vector<ContractProposal> arms;
  for (double p : ps) {
    for (double c : cs) arms.emplace_back(p, c);
  }
  return GridSpace(std::move(arms));
}

ArmIndex arm_of(const GridSpace& space, const ContractProposal& proposal) {
  for (ArmIndex i = 0; i < space.size(); ++i) {
    const auto& arm = space[i];
    if (std::abs(arm.p() - proposal.p()) < 1e-9 && std::abs(arm.c() - proposal.c()) < 1e-9) {
      return i;
    }
  }
  throw DomainError("proposal is not on the strategy grid");
}

Action step_toward(const Cell& from, const Cell& to) {
  const Cell d = to - from;
  if (d.isZero()) return Action::Stay;
  if (std::abs(d.x()) >= std::abs(d.y())) {
    return d.x() > 0 ? Action::Right : Action::Left;
  }
  return d.y() > 0 ? Action::Down : Action::Up;
}

ReferencePolicyPair::ReferencePolicyPair(const GridConfig& cfg)
    : cfg_(cfg), sender_(sender_reward_vector(cfg.theta_degrees)) {}

Action ReferencePolicyPair::pi_r_prime(const GridState& st) const {
  return step_toward(st.receiver, st.apple);
}

Action ReferencePolicyPair::pi_s_prime(const GridState& st) const {
  const double apple_value =
      std::max(sender_.x(), 0.0) / (envs::manhattan(st.receiver, st.apple) + 1);
  const double diamond_value =
      std::max(sender_.y(), 0.0) / (envs::manhattan(st.receiver, st.diamond) + 1);
  if (apple_value > 0.0 || diamond_value > 0.0) {
    return step_toward(st.receiver, apple_value >= diamond_value ? st.apple : st.diamond);
  }
  Action best = Action::Stay;
  int best_distance = -1;
  for (Action a : envs::kAllActions) {
    Cell next = st.receiver + envs::action_offset(a);
    if (!cfg_.in_bounds(next)) next = st.receiver;
    const int d = envs::manhattan(next, st.apple);
    if (d > best_distance) {
      best_distance = d;
      best = a;
    }
  }
  return best;
}

Action sender_advise(double p, const ReferencePolicyPair& pair, const GridState& st,
                     Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("commitment probability must lie in [0, 1]");
  return rng.uniform() < p ? pair.pi_r_prime(st) : pair.pi_s_prime(st);
}

ArmIndex sender_propose(const UcbSender& learner) {
  return bandits::ducb_select(learner.stats, learner.exploration_coeff);
}

ArmIndex sender_propose(const GreedySender& learner, std::int64_t episode, Rng& rng) {
  return bandits::deg_select(learner.stats.means(), learner.schedule, episode, rng);
}

bool receiver_accept(const bandits::QTable& q, const GridSpace& space,
                     const ContractProposal& proposal, Rng& rng) {
  const auto key = static_cast<bandits::StateKey>(arm_of(space, proposal));
  return q.select(key, rng) == kAccept;
}

Action greedy_step(const GridObservation& obs, Rng& rng) {
  if (const auto apple = obs.visible_apple()) return step_toward(Cell::Zero(), *apple);
  return envs::kAllActions[rng.index(envs::kActionCount)];
}

std::optional<Action> bfs_step(const GridObservation& obs) {
  const auto apple = obs.visible_apple();
  if (!apple) return std::nullopt;
  const int v = obs.radius();
  const int side = 2 * v + 1;
  auto index = [&](const Cell& c) { return (c.y() + v) * side + (c.x() + v); };
  // First move taken on the way to each window cell; -1 = unvisited.
  std::vector<int> first(static_cast<std::size_t>(side * side), -1);
  std::deque<Cell> frontier;
  const Cell origin = Cell::Zero();
  first[index(origin)] = static_cast<int>(Action::Stay);
  frontier.push_back(origin);
  while (!frontier.empty()) {
    const Cell c = frontier.front();
    frontier.pop_front();
    if (c == *apple) return static_cast<Action>(first[index(c)]);
    for (Action a : {Action::Up, Action::Down, Action::Left, Action::Right}) {
      const Cell n = c + envs::action_offset(a);
      if (std::abs(n.x()) > v || std::abs(n.y()) > v) continue;
      if (obs.at(n.x(), n.y()) == envs::CellContent::OutOfBounds) continue;
      if (first[index(n)] != -1) continue;
      first[index(n)] = c == origin ? static_cast<int>(a) : first[index(c)];
      frontier.push_back(n);
    }
  }
  return std::nullopt;
}

FallbackPolicy::FallbackPolicy(FallbackKind kind, const GridConfig& cfg) : kind_(kind) {
  const int v = cfg.visibility;
  const int spacing = 2 * v + 1;
  bool left_to_right = true;
  for (int y = std::min(v, cfg.height - 1);; y = std::min(y + spacing, cfg.height - 1)) {
    const Cell left(0, y);
    const Cell right(cfg.width - 1, y);
    route_.push_back(left_to_right ? left : right);
    route_.push_back(left_to_right ? right : left);
    left_to_right = !left_to_right;
    if (y + v >= cfg.height - 1) break;
  }
}

void FallbackPolicy::reset(const Cell& receiver) {
  next_waypoint_ = 0;
  int best = envs::manhattan(receiver, route_[0]);
  for (std::size_t i = 1; i < route_.size(); ++i) {
    const int d = envs::manhattan(receiver, route_[i]);
    if (d < best) {
      best = d;
      next_waypoint_ = i;
    }
  }
}

Action FallbackPolicy::act(const GridObservation& obs, Rng& rng) {
  if (kind_ == FallbackKind::Greedy) return greedy_step(obs, rng);
  if (const auto step = bfs_step(obs)) return *step;
  for (std::size_t tries = 0; tries < route_.size() && obs.receiver == route_[next_waypoint_];
       ++tries) {
    next_waypoint_ = (next_waypoint_ + 1) % route_.size();
  }
  return step_toward(obs.receiver, route_[next_waypoint_]);
}

bandits::StateKey FollowFeatures::key() const {
  return static_cast<bandits::StateKey>(apple_visible) |
         (static_cast<bandits::StateKey>(advice_agrees) << 1) |
         (static_cast<bandits::StateKey>(p_bucket) << 2) |
         (static_cast<bandits::StateKey>(c_bucket) << 8);
}

FollowFeatures follow_features(const GridObservation& obs) {
  FollowFeatures f;
  const auto apple = obs.visible_apple();
  f.apple_visible = apple.has_value();
  f.advice_agrees = apple && obs.advice && *obs.advice == step_toward(Cell::Zero(), *apple);
  if (obs.contract) {
    f.p_bucket = static_cast<int>(std::lround(obs.contract->p() * 5.0));
    f.c_bucket = static_cast<int>(std::lround(obs.contract->c() * 5.0));
  }
  return f;
}

ReceiverChoice receiver_act(const GridObservation& obs, const bandits::QTable& follow_policy,
                            FallbackPolicy& fallback, Rng& rng) {
  ReceiverChoice choice;
  if (!obs.advice) {
    choice.action = fallback.act(obs, rng);
    return choice;
  }
  choice.key = follow_features(obs).key();
  const int decision = follow_policy.select(choice.key, rng);
  choice.decision = decision;
  choice.action = decision == kFollow ? *obs.advice : fallback.act(obs, rng);
  return choice;
}

}  // namespace persuade::agents
