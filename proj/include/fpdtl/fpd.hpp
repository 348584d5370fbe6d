#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fpdtl/model.hpp"

namespace fpdtl {

/**
 * Intermediate quantities of the FPD backward recursion.
 *
 * alpha(a, s') is the KL divergence of the actual transition row from the
 * ideal one and does not depend on the epoch. beta(t, a, s') is the expected
 * negative log-normalizer of the next epoch, and gamma(t, s) the normalizer
 * of the epoch-(t+1) rule, with gamma(H, .) = 1. Gammas are kept as logs.
 */
struct FpdWorkspace {
  StateActionSpace space;
  std::size_t horizon = 0;
  std::vector<double> alpha;      // [s'][a]
  std::vector<double> beta;       // [t-1][s'][a], t = 1..H
  std::vector<double> log_gamma;  // [t][s], t = 0..H

  double alpha_at(std::size_t a, std::size_t s_prev) const {
    return alpha[s_prev * space.n_actions + a];
  }
  double beta_at(std::size_t epoch, std::size_t a, std::size_t s_prev) const {
    return beta[((epoch - 1) * space.n_states + s_prev) * space.n_actions + a];
  }
  double gamma_at(std::size_t t, std::size_t s) const;
};

struct FpdSolution {
  Policy policy;
  FpdWorkspace workspace;
};

/**
 * Optimal FPD policy over horizon H for a known transition model.
 *
 * The epoch-t rule is  ip(a|s') exp(-alpha - beta_t) / gamma_{t-1}(s'),
 * evaluated in log space. Actions whose actual transitions reach states the
 * ideal excludes get alpha = +inf and zero probability.
 *
 * Throws DegenerateIdealError when every action of some state gets zero
 * weight, ShapeError on mismatched spaces or H == 0.
 */
Policy solve_fpd(const TransitionModel& problem, const IdealClosedLoopModel& ideal,
                 std::size_t horizon);

FpdSolution solve_fpd_detailed(const TransitionModel& problem, const IdealClosedLoopModel& ideal,
                               std::size_t horizon);

/**
 * KL divergence between the actual closed loop (problem, policy, p0) and the
 * ideal one over policy.horizon() epochs. Both loops share the initial
 * distribution p0. Computed by propagating the state marginal forward.
 * Returns +inf when the actual loop puts mass where the ideal has none.
 */
double kl_closed_loop(const TransitionModel& problem, const Policy& policy,
                      const IdealClosedLoopModel& ideal, std::span<const double> p0);

/// KL of a transition row from an ideal row, with 0 ln 0 = 0 and p ln(p/0) = +inf.
double row_divergence(std::span<const double> actual, std::span<const double> ideal);

/**
 * Reward r(s, a, s') = -ln p(s, a | s') / ip(s, a | s') that makes an MDP
 * reproduce the FPD criterion. Cells with zero actual mass hold no value.
 */
class EquivalentReward {
 public:
  EquivalentReward(StateActionSpace space, std::vector<std::optional<double>> values)
      : space_(space), values_(std::move(values)) {}

  const StateActionSpace& space() const { return space_; }
  bool reachable(std::size_t s_prev, std::size_t a, std::size_t s_next) const {
    return values_[index(s_prev, a, s_next)].has_value();
  }
  /// Only valid for reachable cells; may be -inf where the ideal is zero.
  double operator()(std::size_t s_prev, std::size_t a, std::size_t s_next) const {
    return *values_[index(s_prev, a, s_next)];
  }

 private:
  std::size_t index(std::size_t s_prev, std::size_t a, std::size_t s_next) const {
    return (s_prev * space_.n_actions + a) * space_.n_states + s_next;
  }

  StateActionSpace space_;
  std::vector<std::optional<double>> values_;
};

EquivalentReward equivalent_reward(const TransitionModel& problem, const DecisionRule& rule,
                                   const IdealClosedLoopModel& ideal);

}  // namespace fpdtl
