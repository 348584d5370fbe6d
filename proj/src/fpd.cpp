#include "fpdtl/fpd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fpdtl/error.hpp"

namespace fpdtl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_shapes(const TransitionModel& problem, const IdealClosedLoopModel& ideal) {
  if (!(problem.space() == ideal.space())) {
    throw ShapeError("transition model and ideal model disagree in shape");
  }
}

}  // namespace

double FpdWorkspace::gamma_at(std::size_t t, std::size_t s) const {
  return std::exp(log_gamma[t * space.n_states + s]);
}

double row_divergence(std::span<const double> actual, std::span<const double> ideal) {
  double d = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double p = actual[i];
    if (p <= 0.0) continue;
    if (ideal[i] <= 0.0) return kInf;
    d += p * std::log(p / ideal[i]);
  }
  return d;
}

FpdSolution solve_fpd_detailed(const TransitionModel& problem, const IdealClosedLoopModel& ideal,
                               std::size_t horizon) {
  check_shapes(problem, ideal);
  if (horizon == 0) throw ShapeError("FPD horizon must be at least 1");

  const auto& sp = problem.space();
  const std::size_t n_s = sp.n_states;
  const std::size_t n_a = sp.n_actions;

  FpdWorkspace ws;
  ws.space = sp;
  ws.horizon = horizon;
  ws.alpha.resize(n_s * n_a);
  ws.beta.assign(horizon * n_s * n_a, 0.0);
  ws.log_gamma.assign((horizon + 1) * n_s, 0.0);

  // Epoch-independent part of the log weight: ln ip(a | s') - alpha(a, s').
  std::vector<double> base(n_s * n_a);
  for (std::size_t s_prev = 0; s_prev < n_s; ++s_prev) {
    for (std::size_t a = 0; a < n_a; ++a) {
      const std::size_t i = s_prev * n_a + a;
      ws.alpha[i] = row_divergence(problem.row(s_prev, a), ideal.transition().row(s_prev, a));
      const double prior = ideal.rule()(s_prev, a);
      base[i] = (prior > 0.0 && std::isfinite(ws.alpha[i])) ? std::log(prior) - ws.alpha[i] : -kInf;
    }
  }

  std::vector<DecisionRule> rules(horizon, DecisionRule::uniform(sp));
  std::vector<double> log_weight(n_a);
  std::vector<double> probs(n_s * n_a);

  for (std::size_t t = horizon; t >= 1; --t) {
    const double* next_log_gamma = &ws.log_gamma[t * n_s];
    double* log_gamma = &ws.log_gamma[(t - 1) * n_s];

    for (std::size_t s_prev = 0; s_prev < n_s; ++s_prev) {
      double top = -kInf;
      for (std::size_t a = 0; a < n_a; ++a) {
        double beta = 0.0;
        const auto row = problem.row(s_prev, a);
        for (std::size_t s = 0; s < n_s; ++s) {
          if (row[s] > 0.0) beta -= next_log_gamma[s] * row[s];
        }
        ws.beta[((t - 1) * n_s + s_prev) * n_a + a] = beta;

        log_weight[a] = base[s_prev * n_a + a] - beta;
        top = std::max(top, log_weight[a]);
      }
      if (!std::isfinite(top)) {
        throw DegenerateIdealError("every action of state " + std::to_string(s_prev) +
                                   " reaches states the ideal model excludes");
      }

      double total = 0.0;
      for (std::size_t a = 0; a < n_a; ++a) {
        const double w = std::exp(log_weight[a] - top);
        probs[s_prev * n_a + a] = w;
        total += w;
      }
      for (std::size_t a = 0; a < n_a; ++a) probs[s_prev * n_a + a] /= total;
      log_gamma[s_prev] = top + std::log(total);
    }
    rules[t - 1] = DecisionRule(sp, probs);
  }

  return {Policy(std::move(rules)), std::move(ws)};
}

Policy solve_fpd(const TransitionModel& problem, const IdealClosedLoopModel& ideal,
                 std::size_t horizon) {
  return solve_fpd_detailed(problem, ideal, horizon).policy;
}

double kl_closed_loop(const TransitionModel& problem, const Policy& policy,
                      const IdealClosedLoopModel& ideal, std::span<const double> p0) {
  check_shapes(problem, ideal);
  if (!(policy.space() == problem.space())) throw ShapeError("policy shape mismatch");
  const auto& sp = problem.space();
  if (p0.size() != sp.n_states) throw ShapeError("initial distribution has wrong length");

  std::vector<double> marginal(p0.begin(), p0.end());
  std::vector<double> next(sp.n_states);
  double kl = 0.0;

  for (std::size_t t = 1; t <= policy.horizon(); ++t) {
    const DecisionRule& rule = policy.rule(t);
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t s_prev = 0; s_prev < sp.n_states; ++s_prev) {
      const double mass = marginal[s_prev];
      if (mass <= 0.0) continue;
      for (std::size_t a = 0; a < sp.n_actions; ++a) {
        const double r = rule(s_prev, a);
        if (r <= 0.0) continue;
        const double ideal_r = ideal.rule()(s_prev, a);
        const auto row = problem.row(s_prev, a);
        const double alpha = row_divergence(row, ideal.transition().row(s_prev, a));
        if (ideal_r <= 0.0 || !std::isfinite(alpha)) return kInf;
        kl += mass * r * (std::log(r / ideal_r) + alpha);
        for (std::size_t s = 0; s < sp.n_states; ++s) next[s] += mass * r * row[s];
      }
    }
    marginal.swap(next);
  }
  return kl;
}

EquivalentReward equivalent_reward(const TransitionModel& problem, const DecisionRule& rule,
                                   const IdealClosedLoopModel& ideal) {
  check_shapes(problem, ideal);
  const auto& sp = problem.space();
  std::vector<std::optional<double>> values(sp.tuple_count());
  std::size_t i = 0;
  for (std::size_t s_prev = 0; s_prev < sp.n_states; ++s_prev) {
    for (std::size_t a = 0; a < sp.n_actions; ++a) {
      for (std::size_t s = 0; s < sp.n_states; ++s, ++i) {
        const double actual = problem(s_prev, a, s) * rule(s_prev, a);
        if (actual <= 0.0) continue;
        const double target = ideal.joint(s_prev, a, s);
        values[i] = target > 0.0 ? -std::log(actual / target) : -kInf;
      }
    }
  }
  return EquivalentReward(sp, std::move(values));
}

}  // namespace fpdtl
