#include "lqsd/stats.hpp"

#include <algorithm>
#include <cmath>

#include "lqsd/numerics.hpp"

namespace lqsd::stats {

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return d;
}

double ks_critical_1pct(std::size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }

MeanAndError mean_and_error(const std::vector<double>& values) {
  MeanAndError out;
  if (values.empty()) return out;
  const auto n = static_cast<double>(values.size());
  numerics::CompensatedSum s;
  for (double v : values) s.add(v);
  out.mean = s.value() / n;
  if (values.size() < 2) return out;
  numerics::CompensatedSum ss;
  for (double v : values) ss.add((v - out.mean) * (v - out.mean));
  out.std_err = std::sqrt(ss.value() / (n - 1.0) / n);
  return out;
}

}  // namespace lqsd::stats
