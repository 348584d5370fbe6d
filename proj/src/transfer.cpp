#include "fpdtl/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "fpdtl/error.hpp"

namespace fpdtl {

void ExplorationConfig::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("q must lie in [0, 1]");
  if (m == 0) throw ConfigError("window length m must be positive");
}

TransferStats::TransferStats(StateActionSpace space, double nu0, std::size_t window_capacity)
    : space_(space), nu0_(nu0), v_(space.tuple_count(), nu0), ring_(window_capacity, 0.0) {
  if (!(nu0 > 0.0) || !std::isfinite(nu0)) throw ConfigError("prior pseudo-count must be positive");
  if (window_capacity == 0) throw ConfigError("similarity window must hold at least one value");
}

void TransferStats::ingest(const Triple& x, double omega) {
  space_.check_state(x.s_prev);
  space_.check_action(x.action);
  space_.check_state(x.s_next);
  if (!(omega >= 0.0) || !std::isfinite(omega)) throw ConfigError("weights must be nonnegative");
  v_[(x.s_prev * space_.n_actions + x.action) * space_.n_states + x.s_next] += omega;
  total_weight_ += omega;

  ring_[ring_head_] = omega;
  ring_head_ = (ring_head_ + 1) % ring_.size();
  if (ring_size_ < ring_.size()) ++ring_size_;
}

std::vector<double> TransferStats::window() const {
  std::vector<double> out;
  out.reserve(ring_size_);
  const std::size_t cap = ring_.size();
  for (std::size_t i = 0; i < ring_size_; ++i) out.push_back(ring_[(ring_head_ + cap - ring_size_ + i) % cap]);
  return out;
}

std::optional<double> TransferStats::window_mean(std::size_t m) const {
  if (m > ring_.size()) throw ConfigError("window length exceeds the stored history capacity");
  const std::size_t n = std::min(m, ring_size_);
  if (n == 0) return std::nullopt;
  const std::size_t cap = ring_.size();
  double sum = 0.0;
  for (std::size_t i = 1; i <= n; ++i) sum += ring_[(ring_head_ + cap - i) % cap];
  return sum / static_cast<double>(n);
}

double default_prior(const IdealClosedLoopModel& ideal, const StateActionSpace& space) {
  if (!(ideal.space() == space)) throw ShapeError("ideal does not match the state/action space");
  const double lo = joint_range(ideal).min;
  if (!(lo > 0.0)) {
    throw AllZeroIdealError("ideal joint has a zero cell; the Dirichlet prior would not be positive");
  }
  return lo / static_cast<double>(space.n_states);
}

double default_prior(const JointScores& scores) {
  if (!(scores.min() > 0.0)) {
    throw AllZeroIdealError("ideal joint has a zero cell; the Dirichlet prior would not be positive");
  }
  return scores.min() / static_cast<double>(scores.space().n_states);
}

std::vector<double> learned_rule(const TransferStats& stats, std::size_t s_prev) {
  const auto& sp = stats.space();
  sp.check_state(s_prev);
  std::vector<double> rule(sp.n_actions, 0.0);
  double total = 0.0;
  for (std::size_t a = 0; a < sp.n_actions; ++a) {
    double mass = 0.0;
    for (std::size_t s = 0; s < sp.n_states; ++s) mass += stats.concentration(s_prev, a, s);
    rule[a] = mass;
    total += mass;
  }
  for (double& p : rule) p /= total;
  return rule;
}

DecisionRule learned_decision_rule(const TransferStats& stats) {
  const auto& sp = stats.space();
  std::vector<double> probs;
  probs.reserve(sp.n_states * sp.n_actions);
  for (std::size_t s = 0; s < sp.n_states; ++s) {
    const auto row = learned_rule(stats, s);
    probs.insert(probs.end(), row.begin(), row.end());
  }
  return DecisionRule(sp, std::move(probs));
}

DirichletParameters posterior_check(StateActionSpace space, std::span<const WeightedTriple> data,
                                    double nu0) {
  std::vector<double> tally(space.tuple_count(), 0.0);
  for (const auto& [x, omega] : data) {
    space.check_state(x.s_prev);
    space.check_action(x.action);
    space.check_state(x.s_next);
    if (!(omega >= 0.0)) throw ConfigError("weights must be nonnegative");
    tally[(x.s_prev * space.n_actions + x.action) * space.n_states + x.s_next] += omega;
  }
  for (double& v : tally) v += nu0;
  return {space, std::move(tally)};
}

Decision act(const TransferStats& stats, std::size_t s_prev, const ExplorationConfig& cfg,
             Pcg32& rng) {
  const auto mean = stats.window_mean(cfg.m);
  const bool gate_open = !mean || *mean < cfg.q;
  if (gate_open && rng.uniform01() < cfg.epsilon) {
    return {rng.uniform_index(stats.space().n_actions), RuleUsed::Uniform};
  }
  const auto rule = learned_rule(stats, s_prev);
  return {sample_categorical(rule, rng), RuleUsed::Learned};
}

double after_step(TransferStats& stats, const Triple& x, const JointScores& ideal_scores) {
  const double omega = normalized_similarity(ideal_scores, x);
  stats.ingest(x, omega);
  return omega;
}

double after_step(TransferStats& stats, const Triple& x, const IdealClosedLoopModel& ideal) {
  return after_step(stats, x, JointScores(ideal));
}

TransferStats stats_from_record(const IdealClosedLoopModel& ideal, const ClosedLoopRecord& record,
                                double nu0, std::size_t window_capacity, SimilarityMode mode) {
  TransferStats stats(ideal.space(), nu0, window_capacity);
  if (record.empty()) return stats;
  const auto weights = weigh_record(ideal, record, mode);
  const auto triples = record.triples();
  for (std::size_t i = 0; i < triples.size(); ++i) stats.ingest(triples[i], weights.omega[i]);
  return stats;
}

void write_concentrations_csv(const TransferStats& stats, std::ostream& out) {
  const auto& sp = stats.space();
  out << "s_prev,action,s_next,concentration\n";
  const auto old = out.precision(17);
  for (std::size_t s_prev = 0; s_prev < sp.n_states; ++s_prev) {
    for (std::size_t a = 0; a < sp.n_actions; ++a) {
      for (std::size_t s = 0; s < sp.n_states; ++s) {
        out << s_prev << ',' << a << ',' << s << ',' << stats.concentration(s_prev, a, s) << '\n';
      }
    }
  }
  out.precision(old);
}

void write_window_csv(const TransferStats& stats, std::ostream& out) {
  out << "position,omega\n";
  const auto old = out.precision(17);
  const auto w = stats.window();
  for (std::size_t i = 0; i < w.size(); ++i) out << i << ',' << w[i] << '\n';
  out.precision(old);
}

}  // namespace fpdtl
