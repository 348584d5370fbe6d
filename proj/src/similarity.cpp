#include "fpdtl/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fpdtl/error.hpp"

namespace fpdtl {

JointScores::JointScores(const IdealClosedLoopModel& ideal)
    : JointScores(ideal.space(), ideal.joint_table()) {}

JointScores::JointScores(StateActionSpace space, std::vector<double> scores)
    : space_(space), scores_(std::move(scores)) {
  if (scores_.size() != space_.tuple_count()) throw ShapeError("score table has wrong size");
  for (const double v : scores_) {
    if (!std::isfinite(v) || v < 0.0) throw NegativeEntryError("score table entries must be >= 0");
  }
  const auto [lo, hi] = std::minmax_element(scores_.begin(), scores_.end());
  min_ = *lo;
  max_ = *hi;
}

double JointScores::operator()(const Triple& x) const {
  space_.check_state(x.s_prev);
  space_.check_action(x.action);
  space_.check_state(x.s_next);
  return scores_[(x.s_prev * space_.n_actions + x.action) * space_.n_states + x.s_next];
}

JointRange joint_range(const IdealClosedLoopModel& ideal) {
  const auto& sp = ideal.space();
  const auto probs = ideal.transition().data();
  const auto rule = ideal.rule().data();
  const std::size_t n = sp.n_states;
  JointRange out{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t row = 0; row < rule.size(); ++row) {
    const double* p = probs.data() + row * n;
    // Four independent lanes keep the compare chains short.
    double lo[4] = {p[0], p[0], p[0], p[0]}, hi[4] = {p[0], p[0], p[0], p[0]};
    std::size_t s = 0;
    for (; s + 4 <= n; s += 4) {
      for (int l = 0; l < 4; ++l) {
        lo[l] = p[s + l] < lo[l] ? p[s + l] : lo[l];
        hi[l] = p[s + l] > hi[l] ? p[s + l] : hi[l];
      }
    }
    for (; s < n; ++s) {
      lo[0] = std::min(lo[0], p[s]);
      hi[0] = std::max(hi[0], p[s]);
    }
    const double row_lo = std::min(std::min(lo[0], lo[1]), std::min(lo[2], lo[3]));
    const double row_hi = std::max(std::max(hi[0], hi[1]), std::max(hi[2], hi[3]));
    // The rule factor is nonnegative, so it scales the row extremes.
    out.min = std::min(out.min, row_lo * rule[row]);
    out.max = std::max(out.max, row_hi * rule[row]);
  }
  return out;
}

double similarity(const IdealClosedLoopModel& ideal, const Triple& x) {
  const auto& sp = ideal.space();
  sp.check_state(x.s_prev);
  sp.check_action(x.action);
  sp.check_state(x.s_next);
  return ideal.joint(x.s_prev, x.action, x.s_next);
}

double sigma_max(const JointScores& scores) {
  if (!(scores.max() > 0.0)) throw AllZeroIdealError("ideal joint is zero everywhere");
  return scores.max();
}

double sigma_max(const IdealClosedLoopModel& ideal) {
  const double hi = joint_range(ideal).max;
  if (!(hi > 0.0)) throw AllZeroIdealError("ideal joint is zero everywhere");
  return hi;
}

double normalized_similarity(const JointScores& scores, const Triple& x) {
  return scores(x) / sigma_max(scores);
}

double normalized_similarity(const IdealClosedLoopModel& ideal, const Triple& x) {
  return similarity(ideal, x) / sigma_max(ideal);
}

SimilarityWeights weigh_record(const IdealClosedLoopModel& ideal, const ClosedLoopRecord& record,
                               SimilarityMode mode) {
  if (record.empty()) throw Error("weigh_record: record has no transitions");
  if (!(record.space() == ideal.space())) throw ShapeError("record and ideal disagree in shape");

  SimilarityWeights out;
  out.mode = mode;
  double scale = 1.0;
  if (mode == SimilarityMode::Normalized) {
    out.sigma_max = sigma_max(ideal);
    scale = *out.sigma_max;
  }
  out.omega.reserve(record.size());
  for (const Triple& x : record.triples()) out.omega.push_back(similarity(ideal, x) / scale);
  return out;
}

}  // namespace fpdtl
