#include "fpdtl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include "fpdtl/estimation.hpp"
#include "fpdtl/fpd.hpp"
#include "fpdtl/similarity.hpp"
#include "fpdtl/simulate.hpp"

namespace fpdtl::harness {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

IdealClosedLoopModel ideal_from_row(const StateActionSpace& space, const std::vector<double>& row) {
  std::vector<double> probs;
  probs.reserve(space.tuple_count());
  for (std::size_t i = 0; i < space.n_states * space.n_actions; ++i) {
    probs.insert(probs.end(), row.begin(), row.end());
  }
  return IdealClosedLoopModel(TransitionModel(space, std::move(probs)), DecisionRule::uniform(space));
}

std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FPD_TL_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::size_t method_rank(Method m) {
  for (std::size_t i = 0; i < std::size(kAllMethods); ++i) {
    if (kAllMethods[i] == m) return i;
  }
  return std::size(kAllMethods);
}

}  // namespace

std::string_view to_string(PastIdeal kind) {
  switch (kind) {
    case PastIdeal::P1: return "P1";
    case PastIdeal::P12: return "P12";
    case PastIdeal::P3: return "P3";
  }
  return "?";
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Rand: return "Rand";
    case Method::TL: return "TL";
    case Method::TLexplore: return "TLexplore";
    case Method::FPDlearn: return "FPDlearn";
    case Method::FPD: return "FPD";
  }
  return "?";
}

std::string_view to_string(RolloutRule rule) {
  return rule == RolloutRule::First ? "first" : "cycle";
}

PastIdeal parse_past_ideal(std::string_view text) {
  for (const auto k : {PastIdeal::P1, PastIdeal::P12, PastIdeal::P3}) {
    if (text == to_string(k)) return k;
  }
  throw ConfigError("unknown past ideal '" + std::string(text) + "' (expected P1, P12 or P3)");
}

Method parse_method(std::string_view text) {
  for (const auto m : kAllMethods) {
    if (text == to_string(m)) return m;
  }
  throw ConfigError("unknown method '" + std::string(text) +
                    "' (expected Rand, TL, TLexplore, FPDlearn or FPD)");
}

RolloutRule parse_rollout_rule(std::string_view text) {
  if (text == "first") return RolloutRule::First;
  if (text == "cycle") return RolloutRule::Cycle;
  throw ConfigError("unknown rollout rule '" + std::string(text) + "' (expected first or cycle)");
}

double ExperimentConfig::effective_kappa() const {
  return kappa ? *kappa : default_kappa(space());
}

void ExperimentConfig::validate() const {
  const auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw ConfigError(std::string(name) + " must be positive");
  };
  positive(n_states, "n_states");
  positive(n_actions, "n_actions");
  positive(horizon, "horizon");
  positive(k_past, "k_past");
  positive(h_current, "h_current");
  positive(n_reps, "n_reps");
  positive(m, "m");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("q must lie in [0, 1]");
  if (kappa && !(*kappa > 0.0)) throw ConfigError("kappa must be positive");
  if (methods.empty()) throw ConfigError("at least one method is required");
  if (n_states != 3) throw WrongSizeError("the canned past ideals are defined for n_states = 3 only");
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json methods = nlohmann::json::array();
  for (const auto m : cfg.methods) methods.push_back(std::string(to_string(m)));
  return {
      {"n_states", cfg.n_states},
      {"n_actions", cfg.n_actions},
      {"horizon", cfg.horizon},
      {"k_past", cfg.k_past},
      {"h_current", cfg.h_current},
      {"n_reps", cfg.n_reps},
      {"epsilon", cfg.epsilon},
      {"q", cfg.q},
      {"m", cfg.m},
      {"root_seed", cfg.root_seed},
      {"past_ideal", std::string(to_string(cfg.past_ideal))},
      {"methods", methods},
      {"kappa", cfg.effective_kappa()},
      {"rollout_rule", std::string(to_string(cfg.rollout))},
      {"freeze_stats", cfg.freeze_stats},
      {"online_model_update", cfg.online_model_update},
  };
}

ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig cfg) {
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "n_states") cfg.n_states = value.get<std::size_t>();
      else if (key == "n_actions") cfg.n_actions = value.get<std::size_t>();
      else if (key == "horizon") cfg.horizon = value.get<std::size_t>();
      else if (key == "k_past") cfg.k_past = value.get<std::size_t>();
      else if (key == "h_current") cfg.h_current = value.get<std::size_t>();
      else if (key == "n_reps") cfg.n_reps = value.get<std::size_t>();
      else if (key == "epsilon") cfg.epsilon = value.get<double>();
      else if (key == "q") cfg.q = value.get<double>();
      else if (key == "m") cfg.m = value.get<std::size_t>();
      else if (key == "root_seed") cfg.root_seed = value.get<std::uint64_t>();
      else if (key == "past_ideal") cfg.past_ideal = parse_past_ideal(value.get<std::string>());
      else if (key == "methods") {
        cfg.methods.clear();
        for (const auto& m : value) cfg.methods.push_back(parse_method(m.get<std::string>()));
      } else if (key == "kappa") {
        cfg.kappa = value.is_null() ? std::nullopt : std::optional<double>(value.get<double>());
      } else if (key == "rollout_rule") cfg.rollout = parse_rollout_rule(value.get<std::string>());
      else if (key == "freeze_stats") cfg.freeze_stats = value.get<bool>();
      else if (key == "online_model_update") cfg.online_model_update = value.get<bool>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return cfg;
}

IdealClosedLoopModel make_preference_ideal(const StateActionSpace& space,
                                           const std::vector<std::size_t>& preferred, double floor) {
  if (preferred.empty()) throw ConfigError("at least one preferred state is required");
  std::vector<bool> is_preferred(space.n_states, false);
  for (const auto s : preferred) {
    space.check_state(s);
    is_preferred[s] = true;
  }
  const auto n_pref = static_cast<double>(std::count(is_preferred.begin(), is_preferred.end(), true));
  const double rest = static_cast<double>(space.n_states) - n_pref;
  const double high = (1.0 - floor * rest) / n_pref;
  if (!(high > 0.0)) throw ConfigError("floor probability too large for this state space");
  std::vector<double> row(space.n_states);
  for (std::size_t s = 0; s < space.n_states; ++s) row[s] = is_preferred[s] ? high : floor;
  return ideal_from_row(space, row);
}

IdealClosedLoopModel make_past_ideal(PastIdeal kind, const StateActionSpace& space) {
  if (space.n_states != 3) {
    throw WrongSizeError("canned ideal " + std::string(to_string(kind)) + " needs |S| = 3, got " +
                         std::to_string(space.n_states));
  }
  switch (kind) {
    case PastIdeal::P1: return ideal_from_row(space, {0.99998, 0.00001, 0.00001});
    case PastIdeal::P12: return ideal_from_row(space, {0.499995, 0.499995, 0.00001});
    case PastIdeal::P3: return ideal_from_row(space, {0.00001, 0.00001, 0.99998});
  }
  throw ConfigError("unknown past ideal");
}

IdealClosedLoopModel make_current_ideal(const StateActionSpace& space) {
  if (space.n_states == 3) return make_past_ideal(PastIdeal::P1, space);
  return make_preference_ideal(space, {kTargetState});
}

TransitionModel generate_system(const StateActionSpace& space, Pcg32& rng) {
  // Normalized unit exponentials are a flat Dirichlet draw.
  std::vector<double> probs(space.tuple_count());
  const std::size_t n = space.n_states;
  for (std::size_t row = 0; row < n * space.n_actions; ++row) {
    double total = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      const double e = -std::log1p(-rng.uniform01());
      probs[row * n + s] = e;
      total += e;
    }
    if (!(total > 0.0)) {
      probs[row * n] = total = 1.0;
    }
    for (std::size_t s = 0; s < n; ++s) probs[row * n + s] /= total;
  }
  return TransitionModel(space, std::move(probs));
}

ClosedLoopRecord generate_past_data(const TransitionModel& system,
                                    const IdealClosedLoopModel& past_ideal, std::size_t horizon,
                                    std::size_t k, Pcg32& rng, RolloutRule rollout) {
  const Policy policy = solve_fpd(system, past_ideal, horizon);
  const std::size_t s0 = rng.uniform_index(system.space().n_states);
  return simulate_closed_loop(system, policy_provider(policy, rollout), s0, k, rng);
}

std::size_t gain(const ClosedLoopRecord& record) {
  return static_cast<std::size_t>(std::count_if(record.steps().begin(), record.steps().end(),
                                                [](const Step& st) { return st.next_state == kTargetState; }));
}

RunResult run_method(Method method, const TransitionModel& system,
                     const IdealClosedLoopModel& current_ideal, const ClosedLoopRecord& past_data,
                     const ExperimentConfig& cfg, std::size_t initial_state, Pcg32& rng,
                     bool keep_trajectory) {
  const auto& space = system.space();
  const std::size_t n = cfg.h_current;
  RunResult result;
  result.method = method;

  std::optional<ClosedLoopRecord> record;
  const auto start = Clock::now();

  switch (method) {
    case Method::Rand: {
      const DecisionRule uniform = DecisionRule::uniform(space);
      result.wall_time_rule = seconds_since(start);
      record = simulate_closed_loop(system, policy_provider(Policy({uniform}), RolloutRule::First),
                                    initial_state, n, rng);
      break;
    }
    case Method::TL:
    case Method::TLexplore: {
      const JointScores scores(current_ideal);
      TransferStats stats = stats_from_record(current_ideal, past_data,
                                              default_prior(current_ideal, space), cfg.m);
      result.wall_time_rule = seconds_since(start);
      const ExplorationConfig explore = cfg.exploration();
      ActionSelector selector;
      if (method == Method::TL) {
        selector = [&](std::size_t, std::size_t s, Pcg32& g) {
          return sample_categorical(learned_rule(stats, s), g);
        };
      } else {
        selector = [&](std::size_t, std::size_t s, Pcg32& g) { return act(stats, s, explore, g).action; };
      }
      TransitionObserver observer;
      if (!cfg.freeze_stats) {
        observer = [&](std::size_t, const Triple& x) { after_step(stats, x, scores); };
      }
      record = simulate_closed_loop(system, selector, initial_state, n, rng, observer);
      break;
    }
    case Method::FPDlearn: {
      TransitionStats counts(space, cfg.effective_kappa());
      counts.add(past_data);
      if (!cfg.online_model_update) {
        const Policy policy = solve_fpd(counts.posterior_mean(), current_ideal, cfg.horizon);
        result.wall_time_rule = seconds_since(start);
        record = simulate_closed_loop(system, policy_provider(policy, cfg.rollout), initial_state, n, rng);
      } else {
        // Receding horizon: re-estimate and re-plan before every decision.
        RuleProvider provider = [&](std::size_t, std::size_t s, Pcg32&) {
          const Policy policy = solve_fpd(counts.posterior_mean(), current_ideal, cfg.horizon);
          const auto row = policy.rule(1).row(s);
          return std::vector<double>(row.begin(), row.end());
        };
        TransitionObserver observer = [&](std::size_t, const Triple& x) { counts.add(x); };
        record = simulate_closed_loop(system, provider, initial_state, n, rng, observer);
      }
      break;
    }
    case Method::FPD: {
      const Policy policy = solve_fpd(system, current_ideal, cfg.horizon);
      result.wall_time_rule = seconds_since(start);
      record = simulate_closed_loop(system, policy_provider(policy, cfg.rollout), initial_state, n, rng);
      break;
    }
  }

  result.gain = gain(*record);
  if (keep_trajectory) result.trajectory = std::move(record);
  return result;
}

std::vector<RunResult> run_repetition(const ExperimentConfig& cfg, std::size_t run_id) {
  const auto space = cfg.space();
  Pcg32 system_rng = substream(cfg.root_seed, run_id, "system");
  const TransitionModel system = generate_system(space, system_rng);

  Pcg32 past_rng = substream(cfg.root_seed, run_id, "past-data");
  const ClosedLoopRecord past = generate_past_data(system, make_past_ideal(cfg.past_ideal, space),
                                                   cfg.horizon, cfg.k_past, past_rng, cfg.rollout);

  Pcg32 init_rng = substream(cfg.root_seed, run_id, "initial-state");
  const std::size_t s0 = init_rng.uniform_index(space.n_states);

  const IdealClosedLoopModel current = make_current_ideal(space);
  std::vector<RunResult> out;
  for (const Method m : cfg.methods) {
    Pcg32 rng = substream(cfg.root_seed, run_id, "method/" + std::string(to_string(m)));
    RunResult r = run_method(m, system, current, past, cfg, s0, rng);
    r.run_id = run_id;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<double> ExperimentResult::gains(Method method) const {
  std::vector<double> out;
  for (const auto& r : runs) {
    if (r.method == method) out.push_back(static_cast<double>(r.gain));
  }
  return out;
}

std::vector<MethodSummary> summarize(const std::vector<RunResult>& runs,
                                     const std::vector<Method>& methods) {
  std::vector<MethodSummary> out;
  for (const Method m : methods) {
    std::vector<double> g;
    for (const auto& r : runs) {
      if (r.method == m) g.push_back(static_cast<double>(r.gain));
    }
    if (!g.empty()) out.push_back({m, stats::five_number(g)});
  }
  return out;
}

namespace {

std::vector<MethodSummary> summarize_minus_rand(const std::vector<RunResult>& runs,
                                                const std::vector<Method>& methods) {
  std::vector<MethodSummary> out;
  if (std::find(methods.begin(), methods.end(), Method::Rand) == methods.end()) return out;
  std::vector<double> rand_gain;
  for (const auto& r : runs) {
    if (r.method == Method::Rand) rand_gain.push_back(static_cast<double>(r.gain));
  }
  for (const Method m : methods) {
    if (m == Method::Rand) continue;
    std::vector<double> diff;
    for (const auto& r : runs) {
      if (r.method == m) diff.push_back(static_cast<double>(r.gain));
    }
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= rand_gain[i];
    if (!diff.empty()) out.push_back({m, stats::five_number(diff)});
  }
  return out;
}

void sort_runs(std::vector<RunResult>& runs) {
  std::sort(runs.begin(), runs.end(), [](const RunResult& a, const RunResult& b) {
    if (a.run_id != b.run_id) return a.run_id < b.run_id;
    return method_rank(a.method) < method_rank(b.method);
  });
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<Method> methods = cfg.methods;
  std::sort(methods.begin(), methods.end(), [](Method a, Method b) { return method_rank(a) < method_rank(b); });
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
  ExperimentConfig effective = cfg;
  effective.methods = methods;

  std::vector<std::vector<RunResult>> per_run(cfg.n_reps);
  std::vector<std::exception_ptr> errors(cfg.n_reps);
  std::atomic<std::size_t> next{0};
  const std::size_t n_threads = std::min(resolve_threads(cfg.threads), cfg.n_reps);

  auto worker = [&] {
    for (std::size_t i = next++; i < cfg.n_reps; i = next++) {
      try {
        per_run[i] = run_repetition(effective, i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
  }

  ExperimentResult result;
  result.config = effective;
  for (auto& rows : per_run) {
    for (auto& r : rows) result.runs.push_back(std::move(r));
  }
  sort_runs(result.runs);

  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    std::string what = "repetition " + std::to_string(i) + " failed";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      what += ": ";
      what += e.what();
    } catch (...) {
    }
    throw PartialExperimentError(what, std::move(result.runs));
  }

  result.summary = summarize(result.runs, methods);
  result.minus_rand = summarize_minus_rand(result.runs, methods);
  return result;
}

void write_runs_csv(const std::vector<RunResult>& runs, std::ostream& out) {
  out << "run_id,method,gain\n";
  for (const auto& r : runs) out << r.run_id << ',' << to_string(r.method) << ',' << r.gain << '\n';
}

void write_summary_csv(const std::vector<MethodSummary>& summary, std::ostream& out) {
  const auto old = out.precision(10);
  out << "method,min,q1,median,q3,max\n";
  for (const auto& s : summary) {
    out << to_string(s.method) << ',' << s.gain.min << ',' << s.gain.q1 << ',' << s.gain.median << ','
        << s.gain.q3 << ',' << s.gain.max << '\n';
  }
  out.precision(old);
}

void write_experiment(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw Error("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("runs.csv");
    write_runs_csv(result.runs, f);
  }
  {
    auto f = open("summary.csv");
    write_summary_csv(result.summary, f);
  }
  if (!result.minus_rand.empty()) {
    auto f = open("summary_minus_rand.csv");
    write_summary_csv(result.minus_rand, f);
  }
}

Decision first_rule_tl_explore(const IdealClosedLoopModel& ideal, const ClosedLoopRecord& data,
                               const ExplorationConfig& cfg, Pcg32& rng) {
  // One scan of the ideal joint serves both the prior and the normalizing maximum.
  const JointRange range = joint_range(ideal);
  if (!(range.min > 0.0)) throw AllZeroIdealError("ideal joint has a zero cell");
  TransferStats stats(ideal.space(), range.min / static_cast<double>(ideal.space().n_states), cfg.m);
  for (const Triple& x : data.triples()) stats.ingest(x, similarity(ideal, x) / range.max);
  return act(stats, data.last_state(), cfg, rng);
}

std::vector<double> first_rule_fpd_learn(const IdealClosedLoopModel& ideal,
                                         const ClosedLoopRecord& data, double kappa,
                                         std::size_t horizon) {
  const Policy policy = solve_fpd(estimate_transition(data, kappa), ideal, horizon);
  const auto row = policy.rule(1).row(data.last_state());
  return {row.begin(), row.end()};
}

namespace {

// Smallest power-of-two batch of calls to `f` that takes at least `min_seconds`.
template <typename F>
std::size_t calibrate_batch(F& f, double min_seconds) {
  std::size_t batch = 1;
  for (;;) {
    const auto start = Clock::now();
    for (std::size_t i = 0; i < batch; ++i) f();
    if (seconds_since(start) >= min_seconds || batch >= (std::size_t{1} << 24)) return batch;
    batch *= 2;
  }
}

template <typename F>
double time_batch(F& f, std::size_t batch) {
  const auto start = Clock::now();
  for (std::size_t i = 0; i < batch; ++i) f();
  return seconds_since(start) / static_cast<double>(batch);
}

// Median per-call seconds of `f` and `g`. Batches alternate so both see the same machine load.
template <typename F, typename G>
std::pair<double, double> median_call_seconds(F&& f, G&& g, std::size_t repeats, double min_batch_seconds) {
  const std::size_t batch_f = calibrate_batch(f, min_batch_seconds);
  const std::size_t batch_g = calibrate_batch(g, min_batch_seconds);
  std::vector<double> tf, tg;
  for (std::size_t r = 0; r < repeats; ++r) {
    tf.push_back(time_batch(f, batch_f));
    tg.push_back(time_batch(g, batch_g));
  }
  return {stats::median(tf), stats::median(tg)};
}

}  // namespace

std::vector<BenchRow> bench_rule_time(const BenchConfig& cfg) {
  if (cfg.repeats == 0) throw ConfigError("bench needs at least one timed repeat");
  std::vector<BenchRow> rows;
  for (const std::size_t n_states : cfg.state_sizes) {
    const StateActionSpace space(n_states, cfg.n_actions);
    Pcg32 sys_rng = substream(cfg.root_seed, n_states, "bench-system");
    const TransitionModel system = generate_system(space, sys_rng);
    const IdealClosedLoopModel ideal = make_current_ideal(space);

    Pcg32 data_rng = substream(cfg.root_seed, n_states, "bench-data");
    const Policy uniform({DecisionRule::uniform(space)});
    const ClosedLoopRecord data =
        simulate_closed_loop(system, policy_provider(uniform, RolloutRule::First),
                             data_rng.uniform_index(n_states), cfg.k, data_rng);

    Pcg32 act_rng = substream(cfg.root_seed, n_states, "bench-act");
    volatile std::size_t sink = 0;
    const double kappa = default_kappa(space);
    const auto [tl, fpd] = median_call_seconds(
        [&] { sink = sink + first_rule_tl_explore(ideal, data, cfg.exploration, act_rng).action; },
        [&] { sink = sink + first_rule_fpd_learn(ideal, data, kappa, cfg.horizon).size(); },
        cfg.repeats, cfg.min_batch_seconds);

    rows.push_back({n_states, Method::TLexplore, tl});
    rows.push_back({n_states, Method::FPDlearn, fpd});
  }
  return rows;
}

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out) {
  const auto old = out.precision(6);
  out << "n_states,method,median_seconds\n";
  for (const auto& r : rows) out << r.n_states << ',' << to_string(r.method) << ',' << r.median_seconds << '\n';
  out.precision(old);
}

}  // namespace fpdtl::harness
