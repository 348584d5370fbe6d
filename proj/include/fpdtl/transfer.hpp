#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "fpdtl/model.hpp"
#include "fpdtl/record.hpp"
#include "fpdtl/rng.hpp"
#include "fpdtl/similarity.hpp"

namespace fpdtl {

/// Exploration gate parameters: epsilon-greedy with probability `epsilon`
/// whenever the mean of the last `m` similarities falls below `q`.
struct ExplorationConfig {
  double epsilon = 0.3;
  double q = 0.4;
  std::size_t m = 10;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

struct WeightedTriple {
  Triple triple;
  double omega = 0.0;
};

/**
 * Dirichlet concentration parameters of the unknown closed-loop factor
 * theta(s, a | s'), one Dirichlet per previous state, plus the window of
 * recently computed similarities.
 *
 * Starts from the symmetric prior nu0 in every cell; each ingested triple
 * adds its weight to exactly one cell.
 */
class TransferStats {
 public:
  TransferStats(StateActionSpace space, double nu0, std::size_t window_capacity);

  const StateActionSpace& space() const { return space_; }
  double nu0() const { return nu0_; }

  double concentration(std::size_t s_prev, std::size_t a, std::size_t s_next) const {
    return v_[(s_prev * space_.n_actions + a) * space_.n_states + s_next];
  }
  /// All concentrations in [s'][a][s] order.
  std::span<const double> concentrations() const { return v_; }

  /// Sum of all ingested weights.
  double total_weight() const { return total_weight_; }

  /// Adds omega to the cell of `x` and pushes omega into the window.
  void ingest(const Triple& x, double omega);

  /// Window contents, oldest first.
  std::vector<double> window() const;
  std::size_t window_capacity() const { return ring_.size(); }

  /// Mean of the newest min(m, size) window entries; empty when no history exists.
  std::optional<double> window_mean(std::size_t m) const;

 private:
  StateActionSpace space_;
  double nu0_;
  std::vector<double> v_;
  double total_weight_ = 0.0;
  std::vector<double> ring_;
  std::size_t ring_head_ = 0;
  std::size_t ring_size_ = 0;
};

/// Symmetric prior: min of the ideal joint divided by |S|. Throws AllZeroIdealError if zero.
double default_prior(const IdealClosedLoopModel& ideal, const StateActionSpace& space);
double default_prior(const JointScores& scores);

/// Posterior predictive of the action at s_prev, from the concentration tensor.
std::vector<double> learned_rule(const TransferStats& stats, std::size_t s_prev);

/// Learned rules of all states collected into one DecisionRule.
DecisionRule learned_decision_rule(const TransferStats& stats);

/// Dirichlet parameters per previous state, in [s'][a][s] order.
struct DirichletParameters {
  StateActionSpace space;
  std::vector<double> values;

  double operator()(std::size_t s_prev, std::size_t a, std::size_t s_next) const {
    return values[(s_prev * space.n_actions + a) * space.n_states + s_next];
  }
};

/// Closed-form weighted-Bayes posterior: prior plus the weighted tally of the data.
DirichletParameters posterior_check(StateActionSpace space, std::span<const WeightedTriple> data,
                                    double nu0);

enum class RuleUsed { Learned, Uniform };

struct Decision {
  std::size_t action = 0;
  RuleUsed rule_used = RuleUsed::Learned;
};

/**
 * Draws the action at s_prev. With the window mean at or above q the learned
 * rule is used; otherwise a uniform draw below epsilon switches to the
 * uniform rule. No history counts as below q.
 */
Decision act(const TransferStats& stats, std::size_t s_prev, const ExplorationConfig& cfg,
             Pcg32& rng);

/// Weighs a new transition by normalized similarity and ingests it. Returns the weight.
double after_step(TransferStats& stats, const Triple& x, const JointScores& ideal_scores);
double after_step(TransferStats& stats, const Triple& x, const IdealClosedLoopModel& ideal);

/// Builds stats from past data weighted against `ideal`; the window ends on the last triples.
TransferStats stats_from_record(const IdealClosedLoopModel& ideal, const ClosedLoopRecord& record,
                                double nu0, std::size_t window_capacity,
                                SimilarityMode mode = SimilarityMode::Normalized);

/// CSV dump: s_prev,action,s_next,concentration
void write_concentrations_csv(const TransferStats& stats, std::ostream& out);
/// CSV dump: position,omega (oldest first)
void write_window_csv(const TransferStats& stats, std::ostream& out);

}  // namespace fpdtl
