#include "fpdtl/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fpdtl::stats {

double quantile(std::span<const double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile level outside [0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

FiveNumber five_number(std::span<const double> values) {
  return {quantile(values, 0.0), quantile(values, 0.25), quantile(values, 0.5),
          quantile(values, 0.75), quantile(values, 1.0)};
}

double median(std::span<const double> values) { return quantile(values, 0.5); }

double binomial_upper_tail_half(std::size_t n, std::size_t k) {
  if (k == 0) return 1.0;
  if (k > n) return 0.0;
  // Sum of C(n, i) 2^-n in log space; n is at most a few thousand here.
  double tail = 0.0;
  const double log_half_n = -static_cast<double>(n) * std::log(2.0);
  for (std::size_t i = k; i <= n; ++i) {
    const double log_c = std::lgamma(static_cast<double>(n) + 1.0) -
                         std::lgamma(static_cast<double>(i) + 1.0) -
                         std::lgamma(static_cast<double>(n - i) + 1.0);
    tail += std::exp(log_c + log_half_n);
  }
  return std::min(1.0, tail);
}

SignTest sign_test_greater(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("sign test needs paired samples");
  SignTest t;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > y[i]) {
      ++t.positive;
    } else if (x[i] < y[i]) {
      ++t.negative;
    } else {
      ++t.ties;
    }
  }
  t.p_value = binomial_upper_tail_half(t.positive + t.negative, t.positive);
  return t;
}

}  // namespace fpdtl::stats
