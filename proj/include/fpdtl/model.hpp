#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fpdtl {

/// Absolute tolerance on row sums accepted at construction.
inline constexpr double kProbabilityTolerance = 1e-9;

/// Sizes of the finite state and action sets. Indices are dense in [0, n).
struct StateActionSpace {
  std::size_t n_states = 1;
  std::size_t n_actions = 1;

  StateActionSpace() = default;
  StateActionSpace(std::size_t states, std::size_t actions);

  void check_state(std::size_t s) const;
  void check_action(std::size_t a) const;

  /// Number of (s_prev, a, s_next) tuples.
  std::size_t tuple_count() const { return n_states * n_actions * n_states; }

  bool operator==(const StateActionSpace&) const = default;
};

/**
 * Transition probabilities p(s_next | a, s_prev), stored flat in
 * [s_prev][a][s_next] order.
 *
 * Rows are validated on construction and rescaled by their sum, so every
 * instance is exactly stochastic up to floating-point rounding.
 */
class TransitionModel {
 public:
  /// Throws ShapeError, NegativeEntryError or NonStochasticError.
  TransitionModel(StateActionSpace space, std::vector<double> probs);

  static TransitionModel from_nested(const std::vector<std::vector<std::vector<double>>>& probs);

  const StateActionSpace& space() const { return space_; }
  double operator()(std::size_t s_prev, std::size_t a, std::size_t s_next) const {
    return probs_[(s_prev * space_.n_actions + a) * space_.n_states + s_next];
  }
  std::span<const double> row(std::size_t s_prev, std::size_t a) const;
  std::span<const double> data() const { return probs_; }

  bool operator==(const TransitionModel&) const = default;

 private:
  StateActionSpace space_;
  std::vector<double> probs_;
};

/// Validates a raw [s_prev][a][s_next] tensor and returns the normalized model.
TransitionModel validate_transition_model(StateActionSpace space, std::vector<double> probs);

/// One decision rule p(a | s_prev), stored flat in [s_prev][a] order.
class DecisionRule {
 public:
  DecisionRule(StateActionSpace space, std::vector<double> probs);

  static DecisionRule uniform(StateActionSpace space);
  static DecisionRule from_nested(const std::vector<std::vector<double>>& probs);

  const StateActionSpace& space() const { return space_; }
  double operator()(std::size_t s_prev, std::size_t a) const {
    return probs_[s_prev * space_.n_actions + a];
  }
  std::span<const double> row(std::size_t s_prev) const;
  std::span<const double> data() const { return probs_; }

  bool operator==(const DecisionRule&) const = default;

 private:
  StateActionSpace space_;
  std::vector<double> probs_;
};

/// How a finite-horizon policy is applied for epochs past its horizon.
enum class RolloutRule {
  First,  ///< keep applying the epoch-1 rule
  Cycle,  ///< restart from epoch 1 every H epochs
};

/// Sequence of decision rules; rules()[t-1] is applied at epoch t.
class Policy {
 public:
  explicit Policy(std::vector<DecisionRule> rules);

  std::size_t horizon() const { return rules_.size(); }
  const StateActionSpace& space() const { return rules_.front().space(); }

  /// Rule of epoch t, 1-based, t <= horizon().
  const DecisionRule& rule(std::size_t epoch) const;

  /// Rule applied at any epoch t >= 1, extending past the horizon per `rollout`.
  const DecisionRule& rule_for(std::size_t epoch, RolloutRule rollout) const;

  const std::vector<DecisionRule>& rules() const { return rules_; }

 private:
  std::vector<DecisionRule> rules_;
};

/**
 * Ideal closed-loop factor  ip(s, a | s') = ip(s | a, s') * ip(a | s').
 */
class IdealClosedLoopModel {
 public:
  IdealClosedLoopModel(TransitionModel transition, DecisionRule rule);

  const StateActionSpace& space() const { return transition_.space(); }
  const TransitionModel& transition() const { return transition_; }
  const DecisionRule& rule() const { return rule_; }

  double joint(std::size_t s_prev, std::size_t a, std::size_t s_next) const {
    return transition_(s_prev, a, s_next) * rule_(s_prev, a);
  }

  /// The full joint table in [s_prev][a][s_next] order.
  std::vector<double> joint_table() const;

  bool operator==(const IdealClosedLoopModel&) const = default;

 private:
  TransitionModel transition_;
  DecisionRule rule_;
};

}  // namespace fpdtl
