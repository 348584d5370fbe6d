#include "fpdtl/simulate.hpp"

#include "fpdtl/error.hpp"

namespace fpdtl {

std::size_t sample_transition(const TransitionModel& model, std::size_t s_prev, std::size_t action,
                              Pcg32& rng) {
  return sample_categorical(model.row(s_prev, action), rng);
}

std::size_t sample_action(const DecisionRule& rule, std::size_t s_prev, Pcg32& rng) {
  return sample_categorical(rule.row(s_prev), rng);
}

ClosedLoopRecord simulate_closed_loop(const TransitionModel& model, const ActionSelector& selector,
                                      std::size_t s0, std::size_t n_epochs, Pcg32& rng,
                                      const TransitionObserver& observer) {
  if (n_epochs == 0) throw Error("simulate_closed_loop: n_epochs must be at least 1");
  const auto& space = model.space();
  space.check_state(s0);
  ClosedLoopRecord record(space, s0);
  std::size_t state = s0;
  for (std::size_t t = 1; t <= n_epochs; ++t) {
    const std::size_t action = selector(t, state, rng);
    space.check_action(action);
    const std::size_t next = sample_transition(model, state, action, rng);
    record.append(action, next);
    if (observer) observer(t, Triple{state, action, next});
    state = next;
  }
  return record;
}

ClosedLoopRecord simulate_closed_loop(const TransitionModel& model, const RuleProvider& provider,
                                      std::size_t s0, std::size_t n_epochs, Pcg32& rng,
                                      const TransitionObserver& observer) {
  const std::size_t n_actions = model.space().n_actions;
  ActionSelector selector = [&](std::size_t t, std::size_t s_prev, Pcg32& g) {
    const std::vector<double> dist = provider(t, s_prev, g);
    if (dist.size() != n_actions) throw ShapeError("rule provider returned wrong action count");
    return sample_categorical(dist, g);
  };
  return simulate_closed_loop(model, selector, s0, n_epochs, rng, observer);
}

RuleProvider policy_provider(const Policy& policy, RolloutRule rollout) {
  return [&policy, rollout](std::size_t t, std::size_t s_prev, Pcg32&) {
    const auto row = policy.rule_for(t, rollout).row(s_prev);
    return std::vector<double>(row.begin(), row.end());
  };
}

}  // namespace fpdtl
