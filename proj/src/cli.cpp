#include "fpdtl/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fpdtl/error.hpp"
#include "fpdtl/fpd.hpp"
#include "fpdtl/harness.hpp"
#include "fpdtl/io.hpp"
#include "fpdtl/similarity.hpp"
#include "fpdtl/transfer.hpp"

namespace fpdtl::cli {

namespace fs = std::filesystem;
using namespace fpdtl::harness;

namespace {

const std::vector<std::string> kPastIdealNames{"P1", "P12", "P3"};
const std::vector<std::string> kMethodNames{"Rand", "TL", "TLexplore", "FPDlearn", "FPD"};
const std::vector<std::string> kRolloutNames{"first", "cycle"};

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path.string());
  return f;
}

struct RunExperimentArgs {
  std::string config;
  std::string out = ".";
  std::string past_ideal;
  std::size_t states = 3, actions = 4, horizon = 10, k_past = 60, h_current = 100, reps = 100, m = 10;
  double epsilon = 0.3, q = 0.4, kappa = 0.0;
  std::uint64_t seed = 10;
  std::vector<std::string> methods;
  std::string rollout = "first";
  bool freeze_stats = false, online_model_update = false;
  std::size_t threads = 0;
};

struct RunExperimentOptions {
  CLI::Option *states, *actions, *horizon, *k_past, *h_current, *reps, *epsilon, *q, *m, *seed,
      *past_ideal, *methods, *kappa, *rollout, *freeze, *online, *threads;
};

RunExperimentOptions add_run_experiment(CLI::App& sub, RunExperimentArgs& a) {
  RunExperimentOptions o{};
  sub.add_option("--config", a.config, "JSON experiment config; explicit flags override its values")
      ->check(CLI::ExistingFile);
  sub.add_option("--out", a.out, "output directory for runs.csv, summary.csv, effective_config.json")
      ->capture_default_str();
  o.past_ideal = sub.add_option("--past-ideal", a.past_ideal,
                                "ideal that generated the past data: P1 (favours s1), P12 (s1 and s2), "
                                "P3 (s3) (default P1)")
                     ->check(CLI::IsMember(kPastIdealNames));
  o.states = sub.add_option("--states", a.states, "number of states |S| (default 3)")
                 ->check(CLI::PositiveNumber);
  o.actions = sub.add_option("--actions", a.actions, "number of actions |A| (default 4)")
                  ->check(CLI::PositiveNumber);
  o.horizon = sub.add_option("--horizon", a.horizon, "FPD optimization horizon H (default 10)")
                  ->check(CLI::PositiveNumber);
  o.k_past = sub.add_option("--k-past", a.k_past, "length k of the past data (default 60)")
                 ->check(CLI::PositiveNumber);
  o.h_current = sub.add_option("--h-current", a.h_current, "epochs h of the evaluated run (default 100)")
                    ->check(CLI::PositiveNumber);
  o.reps = sub.add_option("--reps", a.reps, "Monte Carlo repetitions (default 100)")
               ->check(CLI::PositiveNumber);
  o.epsilon = sub.add_option("--epsilon", a.epsilon, "exploration probability epsilon (default 0.3)")
                  ->check(CLI::Range(0.0, 1.0));
  o.q = sub.add_option("--q-threshold", a.q, "similarity-mean threshold q (default 0.4)")
            ->check(CLI::Range(0.0, 1.0));
  o.m = sub.add_option("--window-m", a.m, "number m of recent similarities averaged (default 10)")
            ->check(CLI::PositiveNumber);
  o.seed = sub.add_option("--seed", a.seed, "root seed (default 10)");
  o.methods = sub.add_option("--methods", a.methods,
                             "comma-separated subset of Rand,TL,TLexplore,FPDlearn,FPD (default all)")
                  ->delimiter(',')
                  ->check(CLI::IsMember(kMethodNames));
  o.kappa = sub.add_option("--kappa", a.kappa,
                           "pseudo-count of the transition estimate used by FPDlearn (default 1/|S|)")
                ->check(CLI::PositiveNumber);
  o.rollout = sub.add_option("--rollout-rule", a.rollout,
                             "rule used past the FPD horizon: first or cycle (default first)")
                  ->check(CLI::IsMember(kRolloutNames));
  o.freeze = sub.add_flag("--freeze-stats", a.freeze_stats,
                          "TL methods stop learning after the past data (default off)");
  o.online = sub.add_flag("--online-model-update", a.online_model_update,
                          "FPDlearn re-estimates the model after every transition (default off)");
  o.threads = sub.add_option("--threads", a.threads,
                             "parallel repetitions (default: FPD_TL_THREADS or all cores)");
  return o;
}

ExperimentConfig effective_config(const RunExperimentArgs& a, const RunExperimentOptions& o) {
  ExperimentConfig cfg;
  if (!a.config.empty()) cfg = config_from_json(io::read_json(a.config));
  const auto given = [](const CLI::Option* opt) { return opt->count() > 0; };
  if (given(o.states)) cfg.n_states = a.states;
  if (given(o.actions)) cfg.n_actions = a.actions;
  if (given(o.horizon)) cfg.horizon = a.horizon;
  if (given(o.k_past)) cfg.k_past = a.k_past;
  if (given(o.h_current)) cfg.h_current = a.h_current;
  if (given(o.reps)) cfg.n_reps = a.reps;
  if (given(o.epsilon)) cfg.epsilon = a.epsilon;
  if (given(o.q)) cfg.q = a.q;
  if (given(o.m)) cfg.m = a.m;
  if (given(o.seed)) cfg.root_seed = a.seed;
  if (given(o.past_ideal)) cfg.past_ideal = parse_past_ideal(a.past_ideal);
  if (given(o.methods)) {
    cfg.methods.clear();
    for (const auto& name : a.methods) cfg.methods.push_back(parse_method(name));
  }
  if (given(o.kappa)) cfg.kappa = a.kappa;
  if (given(o.rollout)) cfg.rollout = parse_rollout_rule(a.rollout);
  if (given(o.freeze)) cfg.freeze_stats = a.freeze_stats;
  if (given(o.online)) cfg.online_model_update = a.online_model_update;
  if (given(o.threads)) cfg.threads = a.threads;
  cfg.validate();
  return cfg;
}

int run_experiment_cmd(const RunExperimentArgs& a, const RunExperimentOptions& o, std::ostream& out) {
  const ExperimentConfig cfg = effective_config(a, o);
  const fs::path dir(a.out);
  fs::create_directories(dir);
  io::write_json(dir / "effective_config.json", to_json(cfg));
  try {
    const ExperimentResult result = run_experiment(cfg);
    write_experiment(result, dir);
    write_summary_csv(result.summary, out);
  } catch (const PartialExperimentError& e) {
    auto f = open_out(dir / "runs.csv");
    write_runs_csv(e.completed(), f);
    throw;
  }
  return kExitOk;
}

}  // namespace

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fully probabilistic design and similarity-based transfer learning of decision policies"};
  app.name("fpdtl");
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  RunExperimentArgs run_args;
  auto* run_sub = app.add_subcommand("run-experiment", "Monte Carlo comparison of Rand, TL, TLexplore, FPDlearn, FPD");
  const RunExperimentOptions run_opts = add_run_experiment(*run_sub, run_args);

  std::size_t gs_states = 3, gs_actions = 4;
  std::uint64_t gs_seed = 10;
  std::string gs_out = "system.json";
  auto* gs_sub = app.add_subcommand("generate-system", "Draw a random transition model (flat Dirichlet rows)");
  gs_sub->add_option("--states", gs_states, "number of states (default 3)")->check(CLI::PositiveNumber);
  gs_sub->add_option("--actions", gs_actions, "number of actions (default 4)")->check(CLI::PositiveNumber);
  gs_sub->add_option("--seed", gs_seed, "seed (default 10)");
  gs_sub->add_option("--out", gs_out, "output JSON file")->capture_default_str();

  std::string gd_model, gd_ideal_file, gd_past = "P1", gd_out = "data.json", gd_weights, gd_stats_dir;
  std::string gd_rollout = "first";
  std::size_t gd_horizon = 10, gd_k = 60, gd_m = 10;
  std::uint64_t gd_seed = 10;
  auto* gd_sub = app.add_subcommand("generate-data", "Simulate past closed-loop data under an FPD-optimal policy");
  gd_sub->add_option("--model", gd_model, "transition model JSON")->required()->check(CLI::ExistingFile);
  auto* gd_past_opt = gd_sub->add_option("--past-ideal", gd_past, "canned past ideal P1, P12 or P3 (default P1)")
                          ->check(CLI::IsMember(kPastIdealNames));
  gd_sub->add_option("--ideal", gd_ideal_file, "ideal model JSON used instead of a canned one")
      ->check(CLI::ExistingFile)
      ->excludes(gd_past_opt);
  gd_sub->add_option("--horizon", gd_horizon, "FPD horizon H (default 10)")->check(CLI::PositiveNumber);
  gd_sub->add_option("--k", gd_k, "number of epochs k (default 60)")->check(CLI::PositiveNumber);
  gd_sub->add_option("--seed", gd_seed, "seed (default 10)");
  gd_sub->add_option("--rollout-rule", gd_rollout, "rule used past the horizon: first or cycle (default first)")
      ->check(CLI::IsMember(kRolloutNames));
  gd_sub->add_option("--out", gd_out, "output record JSON")->capture_default_str();
  gd_sub->add_option("--weights", gd_weights,
                     "also write normalized similarities against the current ideal to this CSV");
  gd_sub->add_option("--stats-dir", gd_stats_dir,
                     "also write the Dirichlet concentrations and similarity window to this directory");
  gd_sub->add_option("--window-m", gd_m, "similarity window length for --stats-dir (default 10)")
      ->check(CLI::PositiveNumber);

  std::string sf_model, sf_ideal, sf_out = "policy.json";
  std::size_t sf_horizon = 10;
  auto* sf_sub = app.add_subcommand("solve-fpd", "Compute the optimal FPD policy for a known model");
  sf_sub->add_option("--model", sf_model, "transition model JSON")->required()->check(CLI::ExistingFile);
  sf_sub->add_option("--ideal", sf_ideal, "ideal closed-loop model JSON")->required()->check(CLI::ExistingFile);
  sf_sub->add_option("--horizon", sf_horizon, "optimization horizon H (default 10)")->check(CLI::PositiveNumber);
  sf_sub->add_option("--out", sf_out, "output policy JSON")->capture_default_str();

  BenchConfig bench;
  std::string bench_out = ".";
  auto* bench_sub = app.add_subcommand("bench", "Median time to the first decision rule: TLexplore vs FPDlearn");
  bench_sub->add_option("--states", bench.state_sizes, "state-space sizes (default 3,6,12,24,48)")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  bench_sub->add_option("--actions", bench.n_actions, "number of actions (default 4)")->check(CLI::PositiveNumber);
  bench_sub->add_option("--k", bench.k, "length of the data (default 30)")->check(CLI::PositiveNumber);
  bench_sub->add_option("--horizon", bench.horizon, "FPD horizon (default 10)")->check(CLI::PositiveNumber);
  bench_sub->add_option("--repeats", bench.repeats, "timed batches per point, median reported (default 21)")
      ->check(CLI::Range(std::size_t{11}, std::size_t{100000}));
  bench_sub->add_option("--seed", bench.root_seed, "seed (default 10)");
  bench_sub->add_option("--out", bench_out, "output directory for bench.csv")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  }

  try {
    if (*run_sub) return run_experiment_cmd(run_args, run_opts, out);

    if (*gs_sub) {
      Pcg32 rng = substream(gs_seed, 0, "system");
      const auto model = generate_system(StateActionSpace(gs_states, gs_actions), rng);
      io::write_json(gs_out, io::to_json(model));
      return kExitOk;
    }

    if (*gd_sub) {
      const auto model = io::transition_from_json(io::read_json(gd_model));
      const auto ideal = gd_ideal_file.empty() ? make_past_ideal(parse_past_ideal(gd_past), model.space())
                                               : io::ideal_from_json(io::read_json(gd_ideal_file));
      Pcg32 rng = substream(gd_seed, 0, "past-data");
      const auto record =
          generate_past_data(model, ideal, gd_horizon, gd_k, rng, parse_rollout_rule(gd_rollout));
      io::write_json(gd_out, io::to_json(record));

      const auto current = make_current_ideal(model.space());
      if (!gd_weights.empty()) {
        const auto w = weigh_record(current, record, SimilarityMode::Normalized);
        auto f = open_out(gd_weights);
        f.precision(17);
        f << "tau,s_prev,action,s_next,omega\n";
        const auto triples = record.triples();
        for (std::size_t i = 0; i < triples.size(); ++i) {
          f << i + 1 << ',' << triples[i].s_prev << ',' << triples[i].action << ',' << triples[i].s_next
            << ',' << w.omega[i] << '\n';
        }
      }
      if (!gd_stats_dir.empty()) {
        const auto stats =
            stats_from_record(current, record, default_prior(current, model.space()), gd_m);
        auto fc = open_out(fs::path(gd_stats_dir) / "concentrations.csv");
        write_concentrations_csv(stats, fc);
        auto fw = open_out(fs::path(gd_stats_dir) / "window.csv");
        write_window_csv(stats, fw);
      }
      return kExitOk;
    }

    if (*sf_sub) {
      const auto model = io::transition_from_json(io::read_json(sf_model));
      const auto ideal = io::ideal_from_json(io::read_json(sf_ideal));
      io::write_json(sf_out, io::to_json(solve_fpd(model, ideal, sf_horizon)));
      return kExitOk;
    }

    if (*bench_sub) {
      const fs::path dir(bench_out);
      fs::create_directories(dir);
      io::write_json(dir / "effective_config.json",
                     {{"state_sizes", bench.state_sizes},
                      {"n_actions", bench.n_actions},
                      {"k", bench.k},
                      {"horizon", bench.horizon},
                      {"repeats", bench.repeats},
                      {"root_seed", bench.root_seed}});
      const auto rows = bench_rule_time(bench);
      auto f = open_out(dir / "bench.csv");
      write_bench_csv(rows, f);
      write_bench_csv(rows, out);
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const WrongSizeError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace fpdtl::cli
