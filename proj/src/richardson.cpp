#include "weaklab/richardson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace weaklab {

std::vector<double> LambdaLadder::values() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  double lambda = top;
  for (int i = 0; i < count; ++i) {
    out.push_back(lambda);
    lambda /= ratio;
  }
  return out;
}

LimitEstimate richardson_limit(const std::vector<double>& samples, double ratio,
                               int levels) {
  const int n = static_cast<int>(samples.size());
  LimitEstimate est;
  if (n == 0) {
    return est;
  }
  if (n == 1) {
    est.value = samples[0];
    est.error_estimate = std::numeric_limits<double>::infinity();
    return est;
  }
  levels = std::min(levels, n - 1);

  double scale = 1.0;
  for (double s : samples) {
    scale = std::max(scale, std::abs(s));
  }
  // Samples of λ⁻¹·(cancelling sum) carry roundoff amplified by 1/λ; with
  // ladders bottoming out near 1e-5 that is ~1e-11 relative noise.
  const double floor = 1e-10 * scale;

  // Empirical order from the tail of the raw first differences.
  std::vector<double> diffs(samples.size() - 1);
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    diffs[i] = samples[i + 1] - samples[i];
  }
  bool below_floor = std::abs(diffs.back()) <= floor;
  est.empirical_order = std::numeric_limits<double>::quiet_NaN();
  if (!below_floor) {
    const std::size_t last = diffs.size() - 1;
    if (std::abs(diffs[last - 1]) > floor) {
      est.empirical_order =
          std::log(std::abs(diffs[last - 1]) / std::abs(diffs[last])) /
          std::log(ratio);
    }
  }

  // Richardson table along the geometric ladder.
  std::vector<double> row = samples;
  std::vector<double> prev;
  double last_correction = 0.0;
  for (int k = 1; k <= levels; ++k) {
    const double weight = std::pow(ratio, k);
    prev = row;
    for (std::size_t i = row.size() - 1; i >= static_cast<std::size_t>(k);
         --i) {
      row[i] = (weight * row[i] - row[i - 1]) / (weight - 1.0);
    }
    last_correction = std::abs(row.back() - prev.back());
  }

  est.value = row.back();
  est.error_estimate =
      std::max({std::abs(row.back() - row[row.size() - 2]), last_correction,
                1e-15 * scale});

  if (below_floor) {
    est.converged = true;
  } else {
    // Empirical first-order (or faster) decay of the raw differences.
    est.converged = std::isfinite(est.empirical_order)
                        ? est.empirical_order > 0.3
                        : true;
  }
  return est;
}

double richardson_limit_checked(const std::vector<double>& samples,
                                double ratio, int levels) {
  LimitEstimate est = richardson_limit(samples, ratio, levels);
  if (!est.converged) {
    throw ExtrapolationDiverged(
        "richardson_limit: samples show no first-order convergence");
  }
  return est.value;
}

double two_point_slope(double f_at_lambda, double f_at_lambda_over_ratio,
                       double lambda, double ratio) {
  const double s1 = f_at_lambda / lambda;
  const double s2 = f_at_lambda_over_ratio / (lambda / ratio);
  return (ratio * s2 - s1) / (ratio - 1.0);
}

}  // namespace weaklab
