#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fpdtl/model.hpp"
#include "fpdtl/record.hpp"

namespace fpdtl {

enum class SimilarityMode { Raw, Normalized };

/**
 * Nonnegative score table over (s', a, s), in [s'][a][s] order.
 *
 * Usually the ideal joint ip(s, a | s'), but any nonnegative table works,
 * which lets the ratio invariance of normalized similarity be exercised on
 * unnormalized scores.
 */
class JointScores {
 public:
  explicit JointScores(const IdealClosedLoopModel& ideal);
  JointScores(StateActionSpace space, std::vector<double> scores);

  const StateActionSpace& space() const { return space_; }
  double operator()(const Triple& x) const;

  /// Largest score over the whole table (exhaustive scan at construction).
  double max() const { return max_; }
  double min() const { return min_; }

 private:
  StateActionSpace space_;
  std::vector<double> scores_;
  double max_ = 0.0;
  double min_ = 0.0;
};

/// Smallest and largest entry of the ideal joint.
struct JointRange {
  double min = 0.0;
  double max = 0.0;
};

/// One streaming pass over the ideal; no table is materialized.
JointRange joint_range(const IdealClosedLoopModel& ideal);

/// ip(s_next, a | s_prev) for the observed triple.
double similarity(const IdealClosedLoopModel& ideal, const Triple& x);

/// max over all tuples of the ideal joint. Throws AllZeroIdealError if it is 0.
double sigma_max(const IdealClosedLoopModel& ideal);
double sigma_max(const JointScores& scores);

/// similarity / sigma_max, in [0, 1].
double normalized_similarity(const IdealClosedLoopModel& ideal, const Triple& x);
double normalized_similarity(const JointScores& scores, const Triple& x);

struct SimilarityWeights {
  std::vector<double> omega;
  SimilarityMode mode = SimilarityMode::Normalized;
  std::optional<double> sigma_max;  // set iff mode == Normalized

  bool normalized() const { return mode == SimilarityMode::Normalized; }
};

/// One weight per triple of `record`, in trajectory order.
SimilarityWeights weigh_record(const IdealClosedLoopModel& ideal, const ClosedLoopRecord& record,
                               SimilarityMode mode = SimilarityMode::Normalized);

}  // namespace fpdtl
