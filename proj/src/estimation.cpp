#include "fpdtl/estimation.hpp"

#include <cmath>

#include "fpdtl/error.hpp"

namespace fpdtl {

TransitionStats::TransitionStats(StateActionSpace space, double kappa)
    : space_(space), kappa_(kappa), counts_(space.tuple_count(), 0.0) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ConfigError("kappa must be positive");
}

void TransitionStats::add(const Triple& x) {
  space_.check_state(x.s_prev);
  space_.check_action(x.action);
  space_.check_state(x.s_next);
  counts_[(x.s_prev * space_.n_actions + x.action) * space_.n_states + x.s_next] += 1.0;
  total_ += 1.0;
}

void TransitionStats::add(const ClosedLoopRecord& record) {
  if (!(record.space() == space_)) throw ShapeError("record does not match the model space");
  for (const Triple& x : record.triples()) add(x);
}

TransitionModel TransitionStats::posterior_mean() const {
  const std::size_t n_s = space_.n_states;
  std::vector<double> probs(counts_.size());
  for (std::size_t row = 0; row < n_s * space_.n_actions; ++row) {
    double n = 0.0;
    for (std::size_t s = 0; s < n_s; ++s) n += counts_[row * n_s + s];
    const double denom = n + static_cast<double>(n_s) * kappa_;
    for (std::size_t s = 0; s < n_s; ++s) probs[row * n_s + s] = (counts_[row * n_s + s] + kappa_) / denom;
  }
  return TransitionModel(space_, std::move(probs));
}

double default_kappa(const StateActionSpace& space) {
  return 1.0 / static_cast<double>(space.n_states);
}

TransitionModel estimate_transition(const ClosedLoopRecord& record, double kappa) {
  TransitionStats stats(record.space(), kappa);
  stats.add(record);
  return stats.posterior_mean();
}

}  // namespace fpdtl
