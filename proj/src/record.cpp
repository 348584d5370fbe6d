#include "fpdtl/record.hpp"

#include <string>

#include "fpdtl/error.hpp"

namespace fpdtl {

ClosedLoopRecord::ClosedLoopRecord(StateActionSpace space, std::size_t initial_state,
                                   std::vector<Step> steps)
    : space_(space), initial_state_(initial_state), steps_(std::move(steps)) {
  space_.check_state(initial_state_);
  for (const Step& st : steps_) {
    space_.check_action(st.action);
    space_.check_state(st.next_state);
  }
}

ClosedLoopRecord ClosedLoopRecord::from_triples(StateActionSpace space,
                                                const std::vector<Triple>& triples) {
  if (triples.empty()) throw Error("cannot infer the initial state of an empty triple list");
  ClosedLoopRecord rec(space, triples.front().s_prev);
  for (std::size_t i = 0; i < triples.size(); ++i) {
    if (triples[i].s_prev != rec.last_state()) {
      throw Error("triple " + std::to_string(i + 1) + " starts in state " +
                  std::to_string(triples[i].s_prev) + " but the previous triple ended in " +
                  std::to_string(rec.last_state()));
    }
    rec.append(triples[i].action, triples[i].s_next);
  }
  return rec;
}

std::size_t ClosedLoopRecord::last_state() const {
  return steps_.empty() ? initial_state_ : steps_.back().next_state;
}

Triple ClosedLoopRecord::triple(std::size_t tau) const {
  if (tau == 0 || tau > steps_.size()) {
    throw IndexError("triple index " + std::to_string(tau) + " outside [1, " +
                     std::to_string(steps_.size()) + "]");
  }
  const std::size_t prev = tau == 1 ? initial_state_ : steps_[tau - 2].next_state;
  return {prev, steps_[tau - 1].action, steps_[tau - 1].next_state};
}

std::vector<Triple> ClosedLoopRecord::triples() const {
  std::vector<Triple> out;
  out.reserve(steps_.size());
  std::size_t prev = initial_state_;
  for (const Step& st : steps_) {
    out.push_back({prev, st.action, st.next_state});
    prev = st.next_state;
  }
  return out;
}

void ClosedLoopRecord::append(std::size_t action, std::size_t next_state) {
  space_.check_action(action);
  space_.check_state(next_state);
  steps_.push_back({action, next_state});
}

}  // namespace fpdtl
