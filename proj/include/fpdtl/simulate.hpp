#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "fpdtl/model.hpp"
#include "fpdtl/record.hpp"
#include "fpdtl/rng.hpp"

namespace fpdtl {

std::size_t sample_transition(const TransitionModel& model, std::size_t s_prev, std::size_t action,
                              Pcg32& rng);

std::size_t sample_action(const DecisionRule& rule, std::size_t s_prev, Pcg32& rng);

/// Distribution over actions in state s_prev at epoch t (1-based). May consume randomness.
using RuleProvider =
    std::function<std::vector<double>(std::size_t epoch, std::size_t s_prev, Pcg32& rng)>;

/// Chooses the action at epoch t directly. Used by agents that randomize between rules.
using ActionSelector = std::function<std::size_t(std::size_t epoch, std::size_t s_prev, Pcg32& rng)>;

/// Called after every transition, before the next decision.
using TransitionObserver = std::function<void(std::size_t epoch, const Triple&)>;

/**
 * Runs the closed loop for n_epochs: at each epoch draw the action, then the
 * next state, from the same generator. The record is chain consistent.
 */
ClosedLoopRecord simulate_closed_loop(const TransitionModel& model, const RuleProvider& provider,
                                      std::size_t s0, std::size_t n_epochs, Pcg32& rng,
                                      const TransitionObserver& observer = {});

ClosedLoopRecord simulate_closed_loop(const TransitionModel& model, const ActionSelector& selector,
                                      std::size_t s0, std::size_t n_epochs, Pcg32& rng,
                                      const TransitionObserver& observer = {});

/// Provider applying a fixed policy, extended past its horizon per `rollout`.
RuleProvider policy_provider(const Policy& policy, RolloutRule rollout);

}  // namespace fpdtl
