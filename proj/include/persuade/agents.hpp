#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "persuade/bandits.hpp"
#include "persuade/core.hpp"
#include "persuade/gridworld.hpp"
#include "persuade/rng.hpp"

namespace persuade::agents {

using bandits::ArmIndex;
using envs::Action;
using envs::Cell;
using envs::GridConfig;
using envs::GridObservation;
using envs::GridState;

// ---------------------------------------------------------------------------
// Sender strategy spaces.

/// A letter-game arm: signalling rule plus reward share (0 outside contract mode).
struct LetterArm {
  LetterPolicy policy;
  double c = 0.0;
};

/// Discretised strategies the Sender's bandit chooses between.
template <typename Arm>
class StrategySpace {
 public:
  explicit StrategySpace(std::vector<Arm> arms) : arms_(std::move(arms)) {
    if (arms_.empty()) throw DomainError("strategy space must not be empty");
  }
  ArmIndex size() const { return static_cast<ArmIndex>(arms_.size()); }
  const Arm& operator[](ArmIndex i) const { return arms_.at(static_cast<std::size_t>(i)); }
  const std::vector<Arm>& arms() const { return arms_; }

 private:
  std::vector<Arm> arms_;
};

using LetterSpace = StrategySpace<LetterArm>;
using GridSpace = StrategySpace<ContractProposal>;

/// {0, step, ..., 1}; 1/step must be (close to) an integer.
std::vector<double> unit_grid(double step);

/// p1 in {0, 0.5, 1} x p2 grid [x c grid in contract mode].
LetterSpace letter_strategy_space(bool contract_mode, double p2_step = 0.05,
                                  double c_step = 0.2);
/// p grid x c grid; c is pinned to 0 outside contract mode.
GridSpace grid_strategy_space(bool contract_mode, double p_step = 0.2, double c_step = 0.2);

/// Index of `proposal` in `space`; throws DomainError when it is off the grid.
ArmIndex arm_of(const GridSpace& space, const ContractProposal& proposal);

// ---------------------------------------------------------------------------
// Sender.

/// One step from `from` towards `to` along a shortest path: the axis with
/// the larger displacement first, horizontal on ties; Stay when already there.
Action step_toward(const Cell& from, const Cell& to);

/// Full-information reference policies: pi'_R chases the apple; pi'_S chases
/// the object with the best Sender payoff per step, and flees the apple when
/// neither object pays (theta = 180).
class ReferencePolicyPair {
 public:
  explicit ReferencePolicyPair(const GridConfig& cfg);

  Action pi_r_prime(const GridState& st) const;
  Action pi_s_prime(const GridState& st) const;

 private:
  GridConfig cfg_;
  RewardVector sender_;
};

/// pi'_R(st) with probability p, else pi'_S(st). One uniform per call.
Action sender_advise(double p, const ReferencePolicyPair& pair, const GridState& st,
                     Rng& rng);

/// Sender learner for the letter game (discounted UCB over the arms).
struct UcbSender {
  bandits::DiscountedArmStats stats;
  double exploration_coeff = 2.0;
};

/// Sender learner for the gridworld (discounted epsilon-greedy).
struct GreedySender {
  bandits::DiscountedArmStats stats;
  bandits::EpsilonSchedule schedule;
};

ArmIndex sender_propose(const UcbSender& learner);
ArmIndex sender_propose(const GreedySender& learner, std::int64_t episode, Rng& rng);

// ---------------------------------------------------------------------------
// Receiver.

inline constexpr int kAccept = 0;
inline constexpr int kReject = 1;

/// Epsilon-greedy over Q(proposal, {accept, reject}); an untrained table
/// accepts. Throws DomainError for a proposal off `space`.
bool receiver_accept(const bandits::QTable& q, const GridSpace& space,
                     const ContractProposal& proposal, Rng& rng);

enum class FallbackKind { Greedy, Bfs };

/// Greedy step towards the visible apple, else a uniformly random action.
Action greedy_step(const GridObservation& obs, Rng& rng);

/// First step of a breadth-first path to the visible apple.
std::optional<Action> bfs_step(const GridObservation& obs);

/// What the Receiver does without (or against) advice. The BFS variant
/// sweeps the grid boustrophedon-style while no apple is in view.
class FallbackPolicy {
 public:
  FallbackPolicy(FallbackKind kind, const GridConfig& cfg);

  FallbackKind kind() const { return kind_; }
  /// Start-of-episode reset; the sweep resumes at the nearest waypoint.
  void reset(const Cell& receiver);
  Action act(const GridObservation& obs, Rng& rng);
  const std::vector<Cell>& sweep_route() const { return route_; }

 private:
  FallbackKind kind_;
  std::vector<Cell> route_;
  std::size_t next_waypoint_ = 0;
};

inline constexpr int kFollow = 0;
inline constexpr int kOverride = 1;

/// Discretised follow/override context:
/// (apple visible, advice agrees with the greedy step, p bucket, c bucket).
struct FollowFeatures {
  bool apple_visible = false;
  bool advice_agrees = false;
  int p_bucket = 0;
  int c_bucket = 0;

  bandits::StateKey key() const;
};

/// Buckets are 0.2 wide, matching the strategy grid.
FollowFeatures follow_features(const GridObservation& obs);

struct ReceiverChoice {
  Action action = Action::Stay;
  /// kFollow / kOverride when advice was present.
  std::optional<int> decision;
  bandits::StateKey key = 0;
};

/// Follow the advice or fall back, as the follow table dictates; without
/// advice the fallback acts.
ReceiverChoice receiver_act(const GridObservation& obs, const bandits::QTable& follow_policy,
                            FallbackPolicy& fallback, Rng& rng);

}  // namespace persuade::agents
