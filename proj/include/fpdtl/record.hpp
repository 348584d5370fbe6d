#pragma once

#include <cstddef>
#include <vector>

#include "fpdtl/model.hpp"

namespace fpdtl {

/// One observed decision and transition (s_prev, a) -> s_next.
struct Triple {
  std::size_t s_prev = 0;
  std::size_t action = 0;
  std::size_t s_next = 0;

  bool operator==(const Triple&) const = default;
};

/// Action taken at an epoch together with the state it led to.
struct Step {
  std::size_t action = 0;
  std::size_t next_state = 0;

  bool operator==(const Step&) const = default;
};

/**
 * Observed closed-loop trajectory s_0, (a_1, s_1), ..., (a_k, s_k).
 *
 * Stored as an initial state plus steps, so consecutive triples are chain
 * consistent by construction.
 */
class ClosedLoopRecord {
 public:
  ClosedLoopRecord(StateActionSpace space, std::size_t initial_state, std::vector<Step> steps = {});

  /// Builds a record from explicit triples; throws Error if they do not chain.
  static ClosedLoopRecord from_triples(StateActionSpace space, const std::vector<Triple>& triples);

  const StateActionSpace& space() const { return space_; }
  std::size_t initial_state() const { return initial_state_; }
  const std::vector<Step>& steps() const { return steps_; }
  std::size_t size() const { return steps_.size(); }
  bool empty() const { return steps_.empty(); }

  /// State after the last step (the initial state for an empty record).
  std::size_t last_state() const;

  /// Triple of epoch tau, 1-based.
  Triple triple(std::size_t tau) const;
  std::vector<Triple> triples() const;

  void append(std::size_t action, std::size_t next_state);

  bool operator==(const ClosedLoopRecord&) const = default;

 private:
  StateActionSpace space_;
  std::size_t initial_state_;
  std::vector<Step> steps_;
};

}  // namespace fpdtl
