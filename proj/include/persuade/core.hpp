#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace persuade {

/// Raised when an argument lies outside the domain an operation is defined on.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Payoff per collected object, ordered (apple, diamond).
using RewardVector = Eigen::Vector2d;

/// Collected-object counts, ordered like RewardVector.
using ObjectCounts = Eigen::Vector2d;

inline RewardVector receiver_reward_vector() { return RewardVector(1.0, 0.0); }

/// Sender payoff vector <cos theta, sin theta> for theta in degrees.
///
/// Multiples of 90 degrees are returned exactly so that "no interest in an
/// object" is an exact zero rather than a 1e-16 residue.
inline RewardVector sender_reward_vector(double theta_degrees) {
  if (!(theta_degrees >= 0.0 && theta_degrees <= 180.0)) {
    throw DomainError("theta must lie in [0, 180] degrees");
  }
  if (theta_degrees == 0.0) return RewardVector(1.0, 0.0);
  if (theta_degrees == 90.0) return RewardVector(0.0, 1.0);
  if (theta_degrees == 180.0) return RewardVector(-1.0, 0.0);
  const double rad = theta_degrees * std::numbers::pi / 180.0;
  return RewardVector(std::cos(rad), std::sin(rad));
}

struct EffectiveRewards {
  double sender;
  double receiver;
};

/// Linear-contract transfer: the Sender collects a share c of the Receiver's
/// reward, applied per step.
inline EffectiveRewards effective_rewards(double re_s, double re_r, double c) {
  if (!(c >= 0.0 && c <= 1.0)) {
    throw DomainError("contract share c must lie in [0, 1]");
  }
  const double transfer = c * re_r;
  return {re_s + transfer, re_r - transfer};
}

/// Announced <p, c>: commitment probability and reward share.
class ContractProposal {
 public:
  ContractProposal() = default;
  ContractProposal(double p, double c) : p_(p), c_(c) {
    if (!(p >= 0.0 && p <= 1.0) || !(c >= 0.0 && c <= 1.0)) {
      throw DomainError("contract proposal components must lie in [0, 1]");
    }
  }
  double p() const { return p_; }
  double c() const { return c_; }
  bool operator==(const ContractProposal&) const = default;

 private:
  double p_ = 1.0;
  double c_ = 0.0;
};

/// Letter-game signalling rule: p1 = Pr(R | strong), p2 = Pr(R | weak).
class LetterPolicy {
 public:
  LetterPolicy() = default;
  LetterPolicy(double p1, double p2) : p1_(p1), p2_(p2) {
    if (!(p1 >= 0.0 && p1 <= 1.0) || !(p2 >= 0.0 && p2 <= 1.0)) {
      throw DomainError("letter policy probabilities must lie in [0, 1]");
    }
  }
  double p1() const { return p1_; }
  double p2() const { return p2_; }
  bool operator==(const LetterPolicy&) const = default;

 private:
  double p1_ = 1.0;
  double p2_ = 0.0;
};

/// Cross-policy episodic returns. Row = whose return (R, S), column = which
/// reference policy drives behaviour (pi'_R, pi'_S); plus the Receiver's
/// outside option.
template <typename Scalar>
class ValueMatrixT {
 public:
  using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

  ValueMatrixT(Scalar v_rr, Scalar v_rs, Scalar v_sr, Scalar v_ss, Scalar u_r0)
      : u_r0_(u_r0) {
    values_ << v_rr, v_rs, v_sr, v_ss;
    if (!(v_ss >= v_sr)) {
      throw DomainError("value matrix requires v_ss >= v_sr");
    }
  }

  Scalar v_rr() const { return values_(0, 0); }
  Scalar v_rs() const { return values_(0, 1); }
  Scalar v_sr() const { return values_(1, 0); }
  Scalar v_ss() const { return values_(1, 1); }
  Scalar u_r0() const { return u_r0_; }
  const Matrix2& values() const { return values_; }

  template <typename NewScalar>
  ValueMatrixT<NewScalar> cast() const {
    return {NewScalar(v_rr()), NewScalar(v_rs()), NewScalar(v_sr()),
            NewScalar(v_ss()), NewScalar(u_r0())};
  }

 private:
  Matrix2 values_;
  Scalar u_r0_;
};

using ValueMatrix = ValueMatrixT<double>;

/// One episode of one trial. In the letter game `apples`/`diamonds` count
/// strong and weak hires and the proposal carries p1 in `p`.
struct EpisodeRecord {
  std::int64_t trial_id = 0;
  std::int64_t episode_id = 0;
  bool eval = false;
  std::int64_t arm = -1;
  double p = 0.0;
  std::optional<double> p2;
  double c = 0.0;
  bool accepted = false;
  double receiver_return = 0.0;
  double sender_return = 0.0;
  std::int64_t apples = 0;
  std::int64_t diamonds = 0;
  /// Fraction of advised steps on which the Receiver followed the advice.
  std::optional<double> follow_rate;
};

}  // namespace persuade
