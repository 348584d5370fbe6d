#include "fpdtl/model.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "fpdtl/error.hpp"

namespace fpdtl {

namespace {

// Checks one probability row and rescales it by its sum.
void normalize_row(std::span<double> row, const std::string& where) {
  double sum = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    const double p = row[i];
    if (!std::isfinite(p) || p < 0.0) {
      std::ostringstream msg;
      msg << "negative or non-finite probability " << p << " at " << where << ", entry " << i;
      throw NegativeEntryError(msg.str());
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "row " << where << " sums to " << sum << ", not 1";
    throw NonStochasticError(msg.str());
  }
  for (double& p : row) p /= sum;
}

std::string slice_name(std::size_t s_prev, std::size_t a) {
  return "(s'=" + std::to_string(s_prev) + ", a=" + std::to_string(a) + ")";
}

}  // namespace

StateActionSpace::StateActionSpace(std::size_t states, std::size_t actions)
    : n_states(states), n_actions(actions) {
  if (states == 0 || actions == 0) throw ShapeError("state and action spaces must be nonempty");
}

void StateActionSpace::check_state(std::size_t s) const {
  if (s >= n_states) {
    throw IndexError("state index " + std::to_string(s) + " out of range [0, " +
                     std::to_string(n_states) + ")");
  }
}

void StateActionSpace::check_action(std::size_t a) const {
  if (a >= n_actions) {
    throw IndexError("action index " + std::to_string(a) + " out of range [0, " +
                     std::to_string(n_actions) + ")");
  }
}

TransitionModel::TransitionModel(StateActionSpace space, std::vector<double> probs)
    : space_(space), probs_(std::move(probs)) {
  if (space_.n_states == 0 || space_.n_actions == 0) throw ShapeError("empty space");
  if (probs_.size() != space_.tuple_count()) {
    throw ShapeError("transition tensor has " + std::to_string(probs_.size()) +
                     " entries, expected " + std::to_string(space_.tuple_count()));
  }
  const std::size_t n = space_.n_states;
  for (std::size_t sp = 0; sp < n; ++sp) {
    for (std::size_t a = 0; a < space_.n_actions; ++a) {
      normalize_row(std::span<double>(probs_).subspan((sp * space_.n_actions + a) * n, n),
                    slice_name(sp, a));
    }
  }
}

TransitionModel TransitionModel::from_nested(
    const std::vector<std::vector<std::vector<double>>>& probs) {
  if (probs.empty() || probs.front().empty()) throw ShapeError("empty transition tensor");
  const std::size_t n_states = probs.size();
  const std::size_t n_actions = probs.front().size();
  std::vector<double> flat;
  flat.reserve(n_states * n_actions * n_states);
  for (const auto& by_action : probs) {
    if (by_action.size() != n_actions) throw ShapeError("ragged transition tensor");
    for (const auto& row : by_action) {
      if (row.size() != n_states) throw ShapeError("transition row length differs from |S|");
      flat.insert(flat.end(), row.begin(), row.end());
    }
  }
  return TransitionModel({n_states, n_actions}, std::move(flat));
}

std::span<const double> TransitionModel::row(std::size_t s_prev, std::size_t a) const {
  space_.check_state(s_prev);
  space_.check_action(a);
  return std::span<const double>(probs_).subspan((s_prev * space_.n_actions + a) * space_.n_states,
                                                 space_.n_states);
}

TransitionModel validate_transition_model(StateActionSpace space, std::vector<double> probs) {
  return TransitionModel(space, std::move(probs));
}

DecisionRule::DecisionRule(StateActionSpace space, std::vector<double> probs)
    : space_(space), probs_(std::move(probs)) {
  if (probs_.size() != space_.n_states * space_.n_actions) {
    throw ShapeError("decision rule has " + std::to_string(probs_.size()) + " entries, expected " +
                     std::to_string(space_.n_states * space_.n_actions));
  }
  for (std::size_t sp = 0; sp < space_.n_states; ++sp) {
    normalize_row(std::span<double>(probs_).subspan(sp * space_.n_actions, space_.n_actions),
                  "(s'=" + std::to_string(sp) + ")");
  }
}

DecisionRule DecisionRule::uniform(StateActionSpace space) {
  return DecisionRule(space, std::vector<double>(space.n_states * space.n_actions,
                                                 1.0 / static_cast<double>(space.n_actions)));
}

DecisionRule DecisionRule::from_nested(const std::vector<std::vector<double>>& probs) {
  if (probs.empty() || probs.front().empty()) throw ShapeError("empty decision rule");
  const std::size_t n_actions = probs.front().size();
  std::vector<double> flat;
  for (const auto& row : probs) {
    if (row.size() != n_actions) throw ShapeError("ragged decision rule");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return DecisionRule({probs.size(), n_actions}, std::move(flat));
}

std::span<const double> DecisionRule::row(std::size_t s_prev) const {
  space_.check_state(s_prev);
  return std::span<const double>(probs_).subspan(s_prev * space_.n_actions, space_.n_actions);
}

Policy::Policy(std::vector<DecisionRule> rules) : rules_(std::move(rules)) {
  if (rules_.empty()) throw ShapeError("policy horizon must be at least 1");
  for (const auto& r : rules_) {
    if (!(r.space() == rules_.front().space())) throw ShapeError("policy rules disagree in shape");
  }
}

const DecisionRule& Policy::rule(std::size_t epoch) const {
  if (epoch == 0 || epoch > rules_.size()) {
    throw IndexError("epoch " + std::to_string(epoch) + " outside policy horizon " +
                     std::to_string(rules_.size()));
  }
  return rules_[epoch - 1];
}

const DecisionRule& Policy::rule_for(std::size_t epoch, RolloutRule rollout) const {
  if (epoch == 0) throw IndexError("epochs are numbered from 1");
  if (epoch <= rules_.size()) return rules_[epoch - 1];
  switch (rollout) {
    case RolloutRule::First:
      return rules_.front();
    case RolloutRule::Cycle:
      return rules_[(epoch - 1) % rules_.size()];
  }
  return rules_.front();
}

IdealClosedLoopModel::IdealClosedLoopModel(TransitionModel transition, DecisionRule rule)
    : transition_(std::move(transition)), rule_(std::move(rule)) {
  if (!(transition_.space() == rule_.space())) {
    throw ShapeError("ideal transition and ideal rule disagree in shape");
  }
}

std::vector<double> IdealClosedLoopModel::joint_table() const {
  const auto& sp = space();
  std::vector<double> out(sp.tuple_count());
  std::size_t i = 0;
  for (std::size_t s_prev = 0; s_prev < sp.n_states; ++s_prev) {
    for (std::size_t a = 0; a < sp.n_actions; ++a) {
      for (std::size_t s = 0; s < sp.n_states; ++s) out[i++] = joint(s_prev, a, s);
    }
  }
  return out;
}

}  // namespace fpdtl
