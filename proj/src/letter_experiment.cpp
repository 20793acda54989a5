#include "persuade/agents.hpp"
#include "persuade/bandits.hpp"
#include "persuade/experiment.hpp"
#include "persuade/letter.hpp"

namespace persuade::harness {

namespace {

constexpr bandits::ArmIndex kHire = 0;
constexpr bandits::ArmIndex kPass = 1;

// Recruiter context: which arm the Sender committed to and what it said, or
// "no information" after a rejected contract.
constexpr bandits::ContextKey kNoInformation = 0;

bandits::ContextKey hire_context(bandits::ArmIndex arm, envs::Signal signal) {
  return 1 + 2 * static_cast<bandits::ContextKey>(arm) +
         (signal == envs::Signal::Recommend ? 0 : 1);
}

}  // namespace

TrialResult run_letter_trial(const ExperimentConfig& cfg, std::int64_t trial) {
  const auto& ls = cfg.letter;
  const bool contract = cfg.mode == Mode::Contract;
  const envs::LetterConfig env{ls.p0, ls.episode_len, contract};
  const auto space = agents::letter_strategy_space(
      contract, contract ? ls.contract_p2_step : ls.p2_step, ls.c_step);

  TrialResult out;
  out.trial_id = trial;
  out.seed = trial_seed(cfg.master_seed, trial);
  Rng env_rng(derive_seed(out.seed, 3));

  agents::UcbSender sender{bandits::DiscountedArmStats(space.size(), ls.sender_discount),
                           ls.sender_ucb};
  bandits::ContextualDucb recruiter(2, ls.receiver_discount, ls.receiver_ucb);
  bandits::ContextualDucb acceptance(2, ls.receiver_discount, ls.receiver_ucb);

  const std::int64_t episodes = cfg.training_episodes() + cfg.eval_episodes;
  out.episodes.reserve(static_cast<std::size_t>(episodes));
  for (std::int64_t e = 0; e < episodes; ++e) {
    const bool training = e < cfg.training_episodes();
    const auto arm = agents::sender_propose(sender);
    const auto& strategy = space[arm];
    bool accepted = true;
    if (contract) {
      accepted = bandits::contextual_select(acceptance, static_cast<bandits::ContextKey>(arm)) ==
                 agents::kAccept;
    }

    EpisodeRecord rec;
    rec.trial_id = trial;
    rec.episode_id = e;
    rec.eval = !training;
    rec.arm = arm;
    rec.p = strategy.policy.p1();
    rec.p2 = strategy.policy.p2();
    rec.c = strategy.c;
    rec.accepted = accepted;

    for (int i = 0; i < ls.episode_len; ++i) {
      bandits::ContextKey context = kNoInformation;
      bandits::ArmIndex decision = kPass;
      const auto outcome = envs::letter_step(
          env, strategy.policy,
          [&](envs::Signal signal) {
            context = accepted ? hire_context(arm, signal) : kNoInformation;
            decision = bandits::contextual_select(recruiter, context);
            return decision == kHire;
          },
          env_rng);
      const double c = accepted ? strategy.c : 0.0;
      const auto eff = effective_rewards(outcome.u_prof, outcome.u_rec, c);
      bandits::contextual_update(recruiter, context, decision, eff.receiver);
      rec.sender_return += eff.sender;
      rec.receiver_return += eff.receiver;
      if (outcome.hired) ++(outcome.strong ? rec.apples : rec.diamonds);
    }

    bandits::ducb_update(sender.stats, arm, rec.sender_return);
    if (contract) {
      bandits::contextual_update(acceptance, static_cast<bandits::ContextKey>(arm),
                                 accepted ? agents::kAccept : agents::kReject,
                                 rec.receiver_return);
    }
    out.episodes.push_back(rec);
  }
  return out;
}

}  // namespace persuade::harness
