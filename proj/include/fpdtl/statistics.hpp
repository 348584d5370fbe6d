#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fpdtl::stats {

/// Five-number summary with linearly interpolated quartiles.
struct FiveNumber {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

/// Quantile at p in [0, 1] by linear interpolation between order statistics
/// at position p * (n - 1). `values` need not be sorted.
double quantile(std::span<const double> values, double p);

FiveNumber five_number(std::span<const double> values);

double median(std::span<const double> values);

struct SignTest {
  std::size_t positive = 0;  ///< pairs with x > y
  std::size_t negative = 0;  ///< pairs with x < y
  std::size_t ties = 0;
  double p_value = 1.0;      ///< one-sided, H1: P(x > y) > 1/2
};

/// Paired one-sided sign test of "x tends to exceed y"; ties are dropped.
SignTest sign_test_greater(std::span<const double> x, std::span<const double> y);

/// P(X >= k) for X ~ Binomial(n, 1/2).
double binomial_upper_tail_half(std::size_t n, std::size_t k);

}  // namespace fpdtl::stats
