#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace lqsd::stats {

/// Two-sided Kolmogorov-Smirnov statistic sup_x |F_n(x) - F(x)|. Sorts a copy.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Asymptotic 1% critical value 1.63 / sqrt(n).
double ks_critical_1pct(std::size_t n);

struct MeanAndError {
  double mean = 0.0;
  double std_err = 0.0;
};

/// Sample mean and standard error with compensated, index-ordered sums.
MeanAndError mean_and_error(const std::vector<double>& values);

}  // namespace lqsd::stats
