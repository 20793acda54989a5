#pragma once

#include <utility>

#include "persuade/core.hpp"
#include "persuade/rng.hpp"

// Recommendation-letter game: a professor signals R / not-R about a student
// who is strong with prior p0; a recruiter decides whether to hire.
namespace persuade::envs {

enum class Signal { Recommend, NoRecommend };

struct LetterConfig {
  double p0 = 1.0 / 3.0;
  int episode_len = 50;
  bool contract_mode = false;

  /// Experiment-level check: 0 < p0 <= 0.5 and a positive episode length.
  void validate() const {
    if (!(p0 > 0.0 && p0 <= 0.5)) throw DomainError("letter prior p0 must lie in (0, 0.5]");
    if (episode_len <= 0) throw DomainError("letter episode length must be positive");
  }
};

struct LetterOutcome {
  bool strong;
  Signal signal;
  bool hired;
  double u_prof;
  double u_rec;
};

/// One student. Draws the type, then the signal, from `rng`; `hire` maps the
/// signal to the recruiter's decision. The step itself only needs p0 to be a
/// probability.
template <typename HireFn>
LetterOutcome letter_step(const LetterConfig& cfg, const LetterPolicy& pol, HireFn&& hire,
                          Rng& rng) {
  if (!(cfg.p0 >= 0.0 && cfg.p0 <= 1.0)) throw DomainError("prior p0 must be a probability");
  const bool strong = rng.uniform() < cfg.p0;
  const double pr_r = strong ? pol.p1() : pol.p2();
  const Signal signal = rng.uniform() < pr_r ? Signal::Recommend : Signal::NoRecommend;
  const bool hired = std::forward<HireFn>(hire)(signal);
  if (!hired) return {strong, signal, false, 0.0, 0.0};
  return {strong, signal, true, 1.0, strong ? 1.0 : -1.0};
}

}  // namespace persuade::envs
