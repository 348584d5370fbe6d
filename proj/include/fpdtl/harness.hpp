#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fpdtl/error.hpp"
#include "fpdtl/model.hpp"
#include "fpdtl/record.hpp"
#include "fpdtl/rng.hpp"
#include "fpdtl/statistics.hpp"
#include "fpdtl/transfer.hpp"

namespace fpdtl::harness {

/// Canned ideal models of earlier tasks: favour s^1, s^1 and s^2 equally, or s^3.
enum class PastIdeal { P1, P12, P3 };

enum class Method { Rand, TL, TLexplore, FPDlearn, FPD };

inline constexpr Method kAllMethods[] = {Method::Rand, Method::TL, Method::TLexplore,
                                         Method::FPDlearn, Method::FPD};

std::string_view to_string(PastIdeal kind);
std::string_view to_string(Method method);
std::string_view to_string(RolloutRule rule);
PastIdeal parse_past_ideal(std::string_view text);
Method parse_method(std::string_view text);
RolloutRule parse_rollout_rule(std::string_view text);

/// The preferred state index of the gain metric (s^1).
inline constexpr std::size_t kTargetState = 0;

struct ExperimentConfig {
  std::size_t n_states = 3;
  std::size_t n_actions = 4;
  std::size_t horizon = 10;
  std::size_t k_past = 60;
  std::size_t h_current = 100;
  std::size_t n_reps = 100;
  double epsilon = 0.3;
  double q = 0.4;
  std::size_t m = 10;
  std::uint64_t root_seed = 10;
  PastIdeal past_ideal = PastIdeal::P1;
  std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
  std::optional<double> kappa;  ///< defaults to 1/|S|
  RolloutRule rollout = RolloutRule::First;
  bool freeze_stats = false;
  bool online_model_update = false;
  std::size_t threads = 0;  ///< 0: FPD_TL_THREADS or hardware concurrency; never affects results

  StateActionSpace space() const { return {n_states, n_actions}; }
  ExplorationConfig exploration() const { return {epsilon, q, m}; }
  double effective_kappa() const;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Starts from `base` and overrides every key present; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});

struct RunResult {
  std::size_t run_id = 0;
  Method method = Method::Rand;
  std::size_t gain = 0;
  std::optional<double> wall_time_rule;          ///< seconds spent on the first rule
  std::optional<ClosedLoopRecord> trajectory;
};

/**
 * Ideal with uniform action preference whose transition row puts `floor` on
 * every non-preferred state and splits the remainder evenly over `preferred`.
 */
IdealClosedLoopModel make_preference_ideal(const StateActionSpace& space,
                                           const std::vector<std::size_t>& preferred,
                                           double floor = 1e-5);

/// Exact tables for |S| = 3; throws WrongSizeError otherwise.
IdealClosedLoopModel make_past_ideal(PastIdeal kind, const StateActionSpace& space);

/// Current task ideal: identical to P1 for |S| = 3, generalised via make_preference_ideal otherwise.
IdealClosedLoopModel make_current_ideal(const StateActionSpace& space);

/// Random system with every (s', a) row drawn from a flat Dirichlet.
TransitionModel generate_system(const StateActionSpace& space, Pcg32& rng);

/// Applies the FPD policy that is optimal for `past_ideal` on the true system for k epochs.
ClosedLoopRecord generate_past_data(const TransitionModel& system,
                                    const IdealClosedLoopModel& past_ideal, std::size_t horizon,
                                    std::size_t k, Pcg32& rng,
                                    RolloutRule rollout = RolloutRule::First);

/// Number of visits of s^1 among the next states of `record`.
std::size_t gain(const ClosedLoopRecord& record);

RunResult run_method(Method method, const TransitionModel& system,
                     const IdealClosedLoopModel& current_ideal, const ClosedLoopRecord& past_data,
                     const ExperimentConfig& cfg, std::size_t initial_state, Pcg32& rng,
                     bool keep_trajectory = false);

struct MethodSummary {
  Method method;
  stats::FiveNumber gain;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<RunResult> runs;  ///< sorted by (run_id, method)
  std::vector<MethodSummary> summary;
  std::vector<MethodSummary> minus_rand;  ///< paired gain - Rand gain, when Rand ran

  /// Gains of one method in run_id order.
  std::vector<double> gains(Method method) const;
};

/// Thrown when a repetition fails; carries every run that completed.
class PartialExperimentError : public Error {
 public:
  PartialExperimentError(const std::string& what, std::vector<RunResult> completed)
      : Error(what), completed_(std::move(completed)) {}
  const std::vector<RunResult>& completed() const { return completed_; }

 private:
  std::vector<RunResult> completed_;
};

/// Runs one repetition: fresh system and past data, then every configured method.
std::vector<RunResult> run_repetition(const ExperimentConfig& cfg, std::size_t run_id);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::vector<MethodSummary> summarize(const std::vector<RunResult>& runs,
                                     const std::vector<Method>& methods);

void write_runs_csv(const std::vector<RunResult>& runs, std::ostream& out);
void write_summary_csv(const std::vector<MethodSummary>& summary, std::ostream& out);

/// Writes runs.csv, summary.csv and, with Rand present, summary_minus_rand.csv into `dir`.
void write_experiment(const ExperimentResult& result, const std::filesystem::path& dir);

struct BenchConfig {
  std::vector<std::size_t> state_sizes{3, 6, 12, 24, 48};
  std::size_t n_actions = 4;
  std::size_t k = 30;
  std::size_t horizon = 10;
  std::size_t repeats = 21;
  double min_batch_seconds = 5e-3;
  std::uint64_t root_seed = 10;
  ExplorationConfig exploration{};
};

struct BenchRow {
  std::size_t n_states = 0;
  Method method = Method::TLexplore;
  double median_seconds = 0.0;
};

/// First decision of transfer learning with exploration, including the similarity pass.
Decision first_rule_tl_explore(const IdealClosedLoopModel& ideal, const ClosedLoopRecord& data,
                               const ExplorationConfig& cfg, Pcg32& rng);

/// First decision rule of FPD with a transition model estimated from `data`.
std::vector<double> first_rule_fpd_learn(const IdealClosedLoopModel& ideal,
                                         const ClosedLoopRecord& data, double kappa,
                                         std::size_t horizon);

/// Median per-call time of both first-rule computations for every state-space size.
std::vector<BenchRow> bench_rule_time(const BenchConfig& cfg);

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out);

}  // namespace fpdtl::harness
