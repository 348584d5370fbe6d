#pragma once

// Test-only reference computations. Nothing here calls the code paths it is
// used to check: FPD is minimized numerically over each simplex, learned
// rules are evaluated straight from the weighted data, and tallies are
// recounted from the raw triples.

#include <cmath>
#include <functional>
#include <map>
#include <tuple>
#include <vector>

#include "fpdtl/model.hpp"
#include "fpdtl/record.hpp"
#include "fpdtl/rng.hpp"
#include "fpdtl/transfer.hpp"

namespace oracle {

using fpdtl::DecisionRule;
using fpdtl::IdealClosedLoopModel;
using fpdtl::Pcg32;
using fpdtl::StateActionSpace;
using fpdtl::TransitionModel;

inline double xlogx_ratio(double p, double q) {
  if (p <= 0.0) return 0.0;
  return p * std::log(p / q);
}

/// Golden-section minimum of a unimodal f on [lo, hi].
inline std::pair<double, double> golden_min(const std::function<double(double)>& f, double lo,
                                            double hi, int iterations = 64) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  // Boundary optima are common (zero-probability actions); compare against the ends too.
  double best_x = (a + b) / 2.0, best_f = f(best_x);
  for (double x : {lo, hi}) {
    const double fx = f(x);
    if (fx < best_f) {
      best_f = fx;
      best_x = x;
    }
  }
  return {best_x, best_f};
}

/// Minimizes f over the probability simplex of dimension n by nested golden-section search.
inline std::pair<std::vector<double>, double> simplex_min(
    const std::function<double(const std::vector<double>&)>& f, std::size_t n) {
  std::vector<double> point(n, 0.0);
  std::function<double(std::size_t, double)> inner = [&](std::size_t i, double mass) -> double {
    if (i + 1 == n) {
      point[i] = mass;
      return f(point);
    }
    auto [x, fx] = golden_min(
        [&](double v) {
          point[i] = v;
          return inner(i + 1, mass - v);
        },
        0.0, mass);
    point[i] = x;
    inner(i + 1, mass - x);
    return fx;
  };
  const double best = inner(0, 1.0);
  std::vector<double> arg = point;
  return {arg, best};
}

struct BruteForceFpd {
  std::vector<std::vector<double>> rules;  // [t-1] -> flat [s'][a]
  double min_kl = 0.0;
};

/**
 * Backward dynamic programming where every per-state minimization over the
 * action simplex is done numerically on the KL cost (rule log-ratio plus
 * transition divergence plus expected cost-to-go).
 */
inline BruteForceFpd brute_force_fpd(const TransitionModel& p, const IdealClosedLoopModel& ideal,
                                     std::size_t horizon, const std::vector<double>& p0) {
  const auto sp = p.space();
  const std::size_t S = sp.n_states, A = sp.n_actions;
  std::vector<double> divergence(S * A, 0.0);
  for (std::size_t s1 = 0; s1 < S; ++s1) {
    for (std::size_t a = 0; a < A; ++a) {
      double d = 0.0;
      for (std::size_t s = 0; s < S; ++s) d += xlogx_ratio(p(s1, a, s), ideal.transition()(s1, a, s));
      divergence[s1 * A + a] = d;
    }
  }
  BruteForceFpd out;
  out.rules.assign(horizon, std::vector<double>(S * A));
  std::vector<double> cost_to_go(S, 0.0);
  for (std::size_t t = horizon; t >= 1; --t) {
    std::vector<double> cost(S);
    for (std::size_t s1 = 0; s1 < S; ++s1) {
      auto objective = [&](const std::vector<double>& r) {
        double v = 0.0;
        for (std::size_t a = 0; a < A; ++a) {
          if (r[a] <= 0.0) continue;
          double future = 0.0;
          for (std::size_t s = 0; s < S; ++s) future += p(s1, a, s) * cost_to_go[s];
          v += xlogx_ratio(r[a], ideal.rule()(s1, a)) + r[a] * (divergence[s1 * A + a] + future);
        }
        return v;
      };
      auto [arg, val] = simplex_min(objective, A);
      for (std::size_t a = 0; a < A; ++a) out.rules[t - 1][s1 * A + a] = arg[a];
      cost[s1] = val;
    }
    cost_to_go = cost;
  }
  for (std::size_t s = 0; s < S; ++s) out.min_kl += p0[s] * cost_to_go[s];
  return out;
}

inline std::vector<double> dirichlet_row(std::size_t n, Pcg32& rng, double floor = 0.0) {
  std::vector<double> row(n);
  double total = 0.0;
  for (double& v : row) {
    v = -std::log1p(-rng.uniform01()) + floor;
    total += v;
  }
  for (double& v : row) v /= total;
  return row;
}

inline TransitionModel random_transition(const StateActionSpace& sp, Pcg32& rng, double floor = 0.0) {
  std::vector<double> probs;
  for (std::size_t i = 0; i < sp.n_states * sp.n_actions; ++i) {
    const auto row = dirichlet_row(sp.n_states, rng, floor);
    probs.insert(probs.end(), row.begin(), row.end());
  }
  return TransitionModel(sp, probs);
}

inline DecisionRule random_rule(const StateActionSpace& sp, Pcg32& rng, double floor = 0.0) {
  std::vector<double> probs;
  for (std::size_t i = 0; i < sp.n_states; ++i) {
    const auto row = dirichlet_row(sp.n_actions, rng, floor);
    probs.insert(probs.end(), row.begin(), row.end());
  }
  return DecisionRule(sp, probs);
}

/// Learned action distribution evaluated directly from the weighted data list.
inline std::vector<double> direct_learned_rule(const StateActionSpace& sp,
                                               const std::vector<fpdtl::WeightedTriple>& data,
                                               double nu0, std::size_t s_prev) {
  std::vector<double> numer(sp.n_actions, 0.0);
  double denom = 0.0;
  for (const auto& [x, w] : data) {
    if (x.s_prev != s_prev) continue;
    numer[x.action] += w;
    denom += w;
  }
  const double S = static_cast<double>(sp.n_states), A = static_cast<double>(sp.n_actions);
  std::vector<double> rule(sp.n_actions);
  for (std::size_t a = 0; a < sp.n_actions; ++a) rule[a] = (numer[a] + S * nu0) / (denom + S * A * nu0);
  return rule;
}

/// Weighted occurrence counts keyed by (s', a, s).
inline std::map<std::tuple<std::size_t, std::size_t, std::size_t>, double> tally(
    const std::vector<fpdtl::Triple>& triples, const std::vector<double>& weights) {
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, double> out;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    out[{triples[i].s_prev, triples[i].action, triples[i].s_next}] += weights[i];
  }
  return out;
}

/// Expected number of visits to `target` in epochs 1..h of the chain induced by a fixed rule.
inline double expected_visits(const TransitionModel& p, const DecisionRule& rule, std::size_t s0,
                              std::size_t h, std::size_t target) {
  const auto sp = p.space();
  std::vector<double> dist(sp.n_states, 0.0), next(sp.n_states);
  dist[s0] = 1.0;
  double visits = 0.0;
  for (std::size_t t = 1; t <= h; ++t) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t s1 = 0; s1 < sp.n_states; ++s1) {
      for (std::size_t a = 0; a < sp.n_actions; ++a) {
        for (std::size_t s = 0; s < sp.n_states; ++s) next[s] += dist[s1] * rule(s1, a) * p(s1, a, s);
      }
    }
    dist = next;
    visits += dist[target];
  }
  return visits;
}

}  // namespace oracle
