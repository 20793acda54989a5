#pragma once

#include <algorithm>
#include <cmath>

#include "persuade/core.hpp"

// Closed-form optimal signalling and linear contracts.
namespace persuade::oracle {

/// The obedience constraint does not pin down p.
class DegenerateConstraint : public DomainError {
 public:
  enum class Reason {
    /// V_RR == V_RS: U_R does not depend on p.
    EqualReceiverValues,
    /// V_RR < V_RS: following pi'_R hurts the Receiver; no threshold exists.
    InformationHarmful,
  };

  DegenerateConstraint(Reason reason, bool feasible)
      : DomainError(reason == Reason::EqualReceiverValues
                        ? "degenerate obedience constraint: v_rr == v_rs"
                        : "no contract threshold: v_rr < v_rs"),
        reason_(reason),
        feasible_(feasible) {}

  Reason reason() const { return reason_; }
  /// For EqualReceiverValues: whether every p satisfies obedience
  /// (v_rs >= u_r0). Otherwise no p does.
  bool feasible() const { return feasible_; }

 private:
  Reason reason_;
  bool feasible_;
};

enum class Regime { BelowThreshold, AboveThreshold, AtThreshold };

template <typename Scalar>
struct OptimalContractT {
  Scalar p_star;
  Regime regime;
  Scalar c_hat;
};

using OptimalContract = OptimalContractT<double>;

inline constexpr double kThresholdTolerance = 1e-12;

/// Shift Receiver values so the outside option is zero. Sender values enter
/// the closed forms only as a difference and are left as they are.
template <typename Scalar>
ValueMatrixT<Scalar> scaled_values(const ValueMatrixT<Scalar>& vm) {
  return {vm.v_rr() - vm.u_r0(), vm.v_rs() - vm.u_r0(), vm.v_sr(), vm.v_ss(),
          Scalar(0)};
}

/// Lowest p satisfying obedience, unclamped.
template <typename Scalar>
Scalar compute_p_min(const ValueMatrixT<Scalar>& vm) {
  const Scalar denom = vm.v_rr() - vm.v_rs();
  if (denom == Scalar(0)) {
    throw DegenerateConstraint(DegenerateConstraint::Reason::EqualReceiverValues,
                               vm.v_rs() >= vm.u_r0());
  }
  return (vm.u_r0() - vm.v_rs()) / denom;
}

template <typename Scalar>
Scalar compute_p_star(const ValueMatrixT<Scalar>& vm) {
  using std::max;
  using std::min;
  return min(max(compute_p_min(vm), Scalar(0)), Scalar(1));
}

/// Reward share at which the Sender's slope in p changes sign.
template <typename Scalar>
Scalar compute_c_hat(const ValueMatrixT<Scalar>& vm) {
  const auto s = scaled_values(vm);
  const Scalar denom = s.v_rr() - s.v_rs();
  if (denom == Scalar(0)) {
    throw DegenerateConstraint(DegenerateConstraint::Reason::EqualReceiverValues,
                               s.v_rs() >= Scalar(0));
  }
  return (s.v_ss() - s.v_sr()) / denom;
}

/// Optimal commitment probability for a given reward share c.
template <typename Scalar>
OptimalContractT<Scalar> optimal_contract(const ValueMatrixT<Scalar>& vm, Scalar c) {
  using std::abs;
  if (!(c >= Scalar(0) && c <= Scalar(1))) {
    throw DomainError("contract share c must lie in [0, 1]");
  }
  const auto s = scaled_values(vm);
  if (s.v_rr() < s.v_rs()) {
    throw DegenerateConstraint(DegenerateConstraint::Reason::InformationHarmful, false);
  }
  const Scalar c_hat = compute_c_hat(vm);
  if (abs(c - c_hat) <= Scalar(kThresholdTolerance)) {
    return {Scalar(1), Regime::AtThreshold, c_hat};
  }
  if (c < c_hat) {
    return {compute_p_star(s), Regime::BelowThreshold, c_hat};
  }
  return {Scalar(1), Regime::AboveThreshold, c_hat};
}

// ---------------------------------------------------------------------------
// Recommendation-letter game.

/// Slack used when testing U_rec(R) >= 0 so the exact optimum, which sits on
/// the constraint, is not lost to rounding.
inline constexpr double kObedienceSlack = 1e-12;

struct LetterPosterior {
  double pr_strong_given_r;
  double u_rec_given_r;
};

inline void check_prior(double p0) {
  if (!(p0 > 0.0 && p0 <= 0.5)) {
    throw DomainError("prior p0 must lie in (0, 0.5]");
  }
}

inline LetterPosterior letter_posterior(double p0, const LetterPolicy& pol) {
  check_prior(p0);
  const double strong = pol.p1() * p0;
  const double weak = pol.p2() * (1.0 - p0);
  const double pr_r = strong + weak;
  if (pr_r <= 0.0) {
    throw DomainError("posterior undefined: signal R is never sent");
  }
  return {strong / pr_r, (strong - weak) / pr_r};
}

struct LetterOptimum {
  LetterPolicy policy;
  double u_prof_star;
};

inline LetterOptimum letter_optimal_policy(double p0) {
  check_prior(p0);
  return {LetterPolicy(1.0, p0 / (1.0 - p0)), 2.0 * p0};
}

/// Reference-policy values of the letter game per student: pi'_R reveals the
/// type, pi'_S recommends everyone, and the outside option is never hiring.
inline ValueMatrix letter_value_matrix(double p0) {
  check_prior(p0);
  return {p0, 2.0 * p0 - 1.0, p0, 1.0, 0.0};
}

struct LetterUtilities {
  double u_prof;
  double u_rec;
};

/// Expected per-student utilities when the recruiter hires on R iff that is
/// weakly profitable (ties go to hiring).
inline LetterUtilities letter_expected_utilities(double p0, const LetterPolicy& pol) {
  check_prior(p0);
  const double strong = pol.p1() * p0;
  const double weak = pol.p2() * (1.0 - p0);
  const double pr_r = strong + weak;
  if (pr_r <= 0.0) return {0.0, 0.0};
  const double u_rec_given_r = (strong - weak) / pr_r;
  if (u_rec_given_r < -kObedienceSlack) return {0.0, 0.0};
  return {pr_r, strong - weak};
}

}  // namespace persuade::oracle
