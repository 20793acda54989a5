#include <optional>

#include "persuade/agents.hpp"
#include "persuade/bandits.hpp"
#include "persuade/experiment.hpp"
#include "persuade/gridworld.hpp"

namespace persuade::harness {

namespace {

// Follow/override transition waiting for the next state's key.
struct PendingTransition {
  bandits::StateKey key;
  int decision;
  double reward;
};

}  // namespace

TrialResult run_grid_trial(const ExperimentConfig& cfg, std::int64_t trial) {
  const auto& gs = cfg.grid;
  const auto& env = gs.grid;
  const bool contract = cfg.mode == Mode::Contract;
  const bool with_sender = cfg.mode != Mode::Baseline;
  const auto space = agents::grid_strategy_space(contract, gs.p_step, gs.c_step);
  const agents::ReferencePolicyPair pair(env);

  TrialResult out;
  out.trial_id = trial;
  out.seed = trial_seed(cfg.master_seed, trial);
  Rng sender_rng(derive_seed(out.seed, 1));
  Rng receiver_rng(derive_seed(out.seed, 2));
  Rng env_rng(derive_seed(out.seed, 3));

  agents::GreedySender sender{
      bandits::DiscountedArmStats(space.size(), cfg.sender.discount),
      bandits::EpsilonSchedule{cfg.sender.eps_start, cfg.sender.eps_end,
                               cfg.sender.decay_fraction, cfg.train_episodes}};
  const auto& rs = cfg.receiver;
  bandits::QTable accept_q(2, rs.accept_learning_rate, rs.accept_discount,
                           rs.accept_exploration);
  bandits::QTable follow_q(2, rs.follow_learning_rate, rs.follow_discount,
                           rs.follow_exploration);
  agents::FallbackPolicy fallback(gs.fallback, env);

  const std::int64_t episodes = cfg.train_episodes + cfg.eval_episodes;
  out.episodes.reserve(static_cast<std::size_t>(episodes));
  for (std::int64_t e = 0; e < episodes; ++e) {
    const bool training = e < cfg.train_episodes;
    if (!training) {
      // Evaluation is greedy for both agents and nothing is learned.
      accept_q.set_exploration(0.0);
      follow_q.set_exploration(0.0);
    }

    EpisodeRecord rec;
    rec.trial_id = trial;
    rec.episode_id = e;
    rec.eval = !training;

    std::optional<ContractProposal> proposal;
    bool accepted = false;
    if (with_sender) {
      rec.arm = training ? agents::sender_propose(sender, e, sender_rng)
                         : bandits::argmax(sender.stats.means());
      proposal = space[rec.arm];
      rec.p = proposal->p();
      rec.c = proposal->c();
      accepted = contract ? agents::receiver_accept(accept_q, space, *proposal, receiver_rng)
                          : true;
    }
    rec.accepted = accepted;
    const double share = accepted ? rec.c : 0.0;

    envs::GridState st = envs::grid_reset(env, env_rng);
    fallback.reset(st.receiver);
    std::optional<PendingTransition> pending;
    std::int64_t advised = 0;
    std::int64_t followed = 0;

    for (int t = 0; t < env.episode_len; ++t) {
      std::optional<envs::Action> advice;
      if (accepted) advice = agents::sender_advise(proposal->p(), pair, st, sender_rng);
      const auto obs = envs::grid_observe(env, st, advice, accepted ? proposal : std::nullopt);
      const auto choice = agents::receiver_act(obs, follow_q, fallback, receiver_rng);

      if (pending && training) {
        bandits::q_update(follow_q, pending->key, pending->decision, pending->reward, choice.key);
      }
      pending.reset();

      const auto step = envs::grid_step(env, st, choice.action, env_rng);
      const auto eff = effective_rewards(step.re_s, step.re_r, share);
      rec.sender_return += eff.sender;
      rec.receiver_return += eff.receiver;
      rec.apples += step.apple_collected;
      rec.diamonds += step.diamond_collected;
      if (choice.decision) {
        ++advised;
        followed += *choice.decision == agents::kFollow;
        pending = PendingTransition{choice.key, *choice.decision, eff.receiver};
      }
      st = step.state;
    }
    if (pending && training) {
      bandits::q_update(follow_q, pending->key, pending->decision, pending->reward, std::nullopt);
    }
    if (advised > 0) rec.follow_rate = static_cast<double>(followed) / advised;

    if (training && with_sender) {
      bandits::ducb_update(sender.stats, rec.arm, rec.sender_return);
      if (contract) {
        bandits::q_update(accept_q, static_cast<bandits::StateKey>(rec.arm),
                          accepted ? agents::kAccept : agents::kReject, rec.receiver_return,
                          std::nullopt);
      }
    }
    out.episodes.push_back(rec);
  }
  return out;
}

}  // namespace persuade::harness
