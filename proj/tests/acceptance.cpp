// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "fpdtl/fpd.hpp"
#include "fpdtl/harness.hpp"
#include "fpdtl/statistics.hpp"
#include "fpdtl/transfer.hpp"
#include "oracles.hpp"

#ifndef FPDTL_CLI_PATH
#error "FPDTL_CLI_PATH must point at the fpdtl executable"
#endif

using namespace fpdtl;
using namespace fpdtl::harness;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "): " << detail << std::endl;
  if (!ok) ++failures;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

void fpd_oracle() {
  const auto start = std::chrono::steady_clock::now();
  Pcg32 g(1001);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const StateActionSpace sp(1 + g.uniform_index(3), 1 + g.uniform_index(3));
    const std::size_t H = 1 + g.uniform_index(2);
    const auto p = oracle::random_transition(sp, g);
    const IdealClosedLoopModel ideal(oracle::random_transition(sp, g, 0.05), oracle::random_rule(sp, g, 0.05));
    const auto p0 = oracle::dirichlet_row(sp.n_states, g, 0.1);
    const double kl = kl_closed_loop(p, solve_fpd(p, ideal, H), ideal, p0);
    worst = std::max(worst, std::abs(kl - oracle::brute_force_fpd(p, ideal, H, p0).min_kl));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(1, "FPD matches brute-force minimum", worst <= 1e-6 && secs < 120.0,
         "max |KL - brute force| = " + fmt(worst) + " over 50 instances in " + fmt(secs) + " s");
}

void trivial_identity() {
  Pcg32 g(1002);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const StateActionSpace sp(1 + g.uniform_index(6), 1 + g.uniform_index(6));
    const auto p = oracle::random_transition(sp, g);
    const Policy policy = solve_fpd(p, IdealClosedLoopModel(p, DecisionRule::uniform(sp)), 1 + g.uniform_index(12));
    for (const auto& rule : policy.rules())
      for (const double v : rule.data()) worst = std::max(worst, std::abs(v - 1.0 / static_cast<double>(sp.n_actions)));
  }
  report(2, "uniform ideal rule reproduced", worst <= 1e-12, "max deviation from uniform = " + fmt(worst));
}

void three_paths() {
  Pcg32 g(1003);
  double worst_v = 0.0, worst_rule = 0.0;
  for (int i = 0; i < 100; ++i) {
    const StateActionSpace sp(1 + g.uniform_index(4), 1 + g.uniform_index(4));
    const double nu0 = 1e-6 + g.uniform01();
    std::vector<WeightedTriple> data(g.uniform_index(201));
    for (auto& d : data) {
      d.triple = {g.uniform_index(sp.n_states), g.uniform_index(sp.n_actions), g.uniform_index(sp.n_states)};
      d.omega = g.uniform01();
    }
    TransferStats st(sp, nu0, 10);
    for (const auto& d : data) st.ingest(d.triple, d.omega);
    const auto closed = posterior_check(sp, data, nu0);
    for (std::size_t c = 0; c < closed.values.size(); ++c)
      worst_v = std::max(worst_v, std::abs(closed.values[c] - st.concentrations()[c]));
    for (std::size_t s = 0; s < sp.n_states; ++s) {
      const auto incremental = learned_rule(st, s);
      const auto direct = oracle::direct_learned_rule(sp, data, nu0, s);
      for (std::size_t a = 0; a < sp.n_actions; ++a)
        worst_rule = std::max(worst_rule, std::abs(incremental[a] - direct[a]));
    }
  }
  report(3, "weighted Bayes paths agree", worst_v <= 1e-12 && worst_rule <= 1e-12,
         "max |V diff| = " + fmt(worst_v) + ", max |rule diff| = " + fmt(worst_rule));
}

double med(const ExperimentResult& r, Method m) { return stats::median(r.gains(m)); }

// Paired one-sided sign test that `hi` beats `lo`.
double p_greater(const ExperimentResult& r, Method hi, Method lo) {
  return stats::sign_test_greater(r.gains(hi), r.gains(lo)).p_value;
}

std::string medians(const ExperimentResult& r) {
  std::string s;
  for (const auto m : kAllMethods) s += std::string(to_string(m)) + "=" + fmt(med(r, m)) + " ";
  return s;
}

void mismatched(const ExperimentResult& r) {
  const double tl = med(r, Method::TL), rnd = med(r, Method::Rand), tle = med(r, Method::TLexplore),
               fl = med(r, Method::FPDlearn), fpd = med(r, Method::FPD);
  std::vector<double> diff;
  const auto a = r.gains(Method::TLexplore), b = r.gains(Method::Rand);
  for (std::size_t i = 0; i < a.size(); ++i) diff.push_back(a[i] - b[i]);
  const double diff_med = stats::median(diff);
  const double p1 = p_greater(r, Method::Rand, Method::TL), p2 = p_greater(r, Method::TLexplore, Method::Rand),
               p3 = p_greater(r, Method::FPDlearn, Method::TLexplore), p4 = p_greater(r, Method::FPDlearn, Method::FPD);
  const bool order = tl < rnd && rnd < tle && tle < fl && fl <= fpd && diff_med > 0;
  const bool tests = p1 < 0.05 && p2 < 0.05 && p3 < 0.05 && p4 >= 0.05;
  report(4, "ordering with past ideal P3", order && tests,
         "medians " + medians(r) + "| median(TLexplore-Rand)=" + fmt(diff_med) + " | p(Rand>TL)=" + fmt(p1) +
             " p(TLexplore>Rand)=" + fmt(p2) + " p(FPDlearn>TLexplore)=" + fmt(p3) +
             " p(FPDlearn>FPD)=" + fmt(p4) + " (must stay >= 0.05)");
}

void overlapping(const ExperimentResult& r) {
  const double tl = med(r, Method::TL), fpd = med(r, Method::FPD), rnd = med(r, Method::Rand);
  const double rel = std::abs(tl - fpd) / fpd;
  report(5, "ordering with past ideal P12", rel <= 0.10 && tl > rnd && fpd > rnd,
         "medians " + medians(r) + "| |TL-FPD|/FPD=" + fmt(rel));
}

void matching(const ExperimentResult& r) {
  const double tl = med(r, Method::TL), fpd = med(r, Method::FPD), tle = med(r, Method::TLexplore);
  const double rel = std::abs(tle - tl) / tl;
  report(6, "ordering with past ideal P1", tl >= fpd && rel <= 0.05,
         "medians " + medians(r) + "| |TLexplore-TL|/TL=" + fmt(rel));
}

void fpd_invariance(const std::map<PastIdeal, ExperimentResult>& all) {
  const auto ref = all.at(PastIdeal::P1).gains(Method::FPD);
  bool same = !ref.empty();
  for (const auto& [kind, r] : all) same = same && r.gains(Method::FPD) == ref;
  report(7, "FPD gains independent of past data", same, std::to_string(ref.size()) + " runs compared across P1/P12/P3");
}

void timing_trend() {
  const auto rows = bench_rule_time(BenchConfig{});
  std::map<std::size_t, std::map<Method, double>> t;
  for (const auto& row : rows) t[row.n_states][row.method] = row.median_seconds;
  std::string detail = "ratios";
  bool monotone = true;
  double prev = 0.0, last = 0.0;
  for (const auto& [n, m] : t) {
    const double ratio = m.at(Method::FPDlearn) / m.at(Method::TLexplore);
    detail += " |S|=" + std::to_string(n) + ":" + fmt(ratio);
    monotone = monotone && ratio >= prev;
    prev = last = ratio;
  }
  report(8, "first-rule timing ratio trend", monotone && last > 2.0, detail);
}

void exploration_gate() {
  const StateActionSpace sp(3, 4);
  const ExplorationConfig cfg{0.3, 0.4, 10};
  TransferStats low(sp, 0.01, 10), high(sp, 0.01, 10);
  for (int i = 0; i < 10; ++i) {
    low.ingest({0, 0, 0}, 0.1 + 0.02 * i);
    high.ingest({0, 0, 0}, 0.45 + 0.05 * i);
  }
  Pcg32 rng(1009);
  int uniform_low = 0, uniform_high = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    uniform_low += act(low, i % 3, cfg, rng).rule_used == RuleUsed::Uniform;
    uniform_high += act(high, i % 3, cfg, rng).rule_used == RuleUsed::Uniform;
  }
  const double freq = uniform_low / static_cast<double>(n);
  report(9, "exploration gate", std::abs(freq - cfg.epsilon) <= 0.01 && uniform_high == 0,
         "uniform frequency below q = " + fmt(freq) + ", above q = " + std::to_string(uniform_high));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void reproducibility() {
  const fs::path base = fs::temp_directory_path() / "fpdtl_acceptance_repro";
  fs::remove_all(base);
  bool ok = true;
  for (const char* sub : {"a", "b"}) {
    const std::string cmd = std::string("\"") + FPDTL_CLI_PATH + "\" run-experiment --past-ideal P3 --seed 10 --out \"" +
                            (base / sub).string() + "\" > \"" + (base / (std::string(sub) + ".log")).string() + "\"";
    fs::create_directories(base);
    ok = ok && std::system(cmd.c_str()) == 0;
  }
  const auto a = slurp(base / "a" / "runs.csv"), b = slurp(base / "b" / "runs.csv");
  ok = ok && !a.empty() && a == b;
  report(10, "reproducible runs.csv", ok, std::to_string(a.size()) + " bytes, identical=" + (a == b ? "yes" : "no"));
  fs::remove_all(base);
}

}  // namespace

int main() {
  fpd_oracle();
  trivial_identity();
  three_paths();

  std::map<PastIdeal, ExperimentResult> experiments;
  for (const auto kind : {PastIdeal::P3, PastIdeal::P12, PastIdeal::P1}) {
    ExperimentConfig cfg;
    cfg.past_ideal = kind;
    experiments.emplace(kind, run_experiment(cfg));
  }
  mismatched(experiments.at(PastIdeal::P3));
  overlapping(experiments.at(PastIdeal::P12));
  matching(experiments.at(PastIdeal::P1));
  fpd_invariance(experiments);

  timing_trend();
  exploration_gate();
  reproducibility();

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
