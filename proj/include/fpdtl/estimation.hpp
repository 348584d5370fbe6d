#pragma once

#include <cstddef>
#include <vector>

#include "fpdtl/model.hpp"
#include "fpdtl/record.hpp"

namespace fpdtl {

/// Observed transition counts n(s', a, s) with a symmetric pseudo-count per cell.
class TransitionStats {
 public:
  TransitionStats(StateActionSpace space, double kappa);

  void add(const Triple& x);
  void add(const ClosedLoopRecord& record);

  const StateActionSpace& space() const { return space_; }
  double kappa() const { return kappa_; }
  double count(std::size_t s_prev, std::size_t a, std::size_t s_next) const {
    return counts_[(s_prev * space_.n_actions + a) * space_.n_states + s_next];
  }
  double total() const { return total_; }

  /// Posterior-mean transition model (n + kappa) / (n(s', a, .) + |S| kappa).
  TransitionModel posterior_mean() const;

 private:
  StateActionSpace space_;
  double kappa_;
  std::vector<double> counts_;
  double total_ = 0.0;
};

/// Default pseudo-count 1/|S|.
double default_kappa(const StateActionSpace& space);

TransitionModel estimate_transition(const ClosedLoopRecord& record, double kappa);

}  // namespace fpdtl
