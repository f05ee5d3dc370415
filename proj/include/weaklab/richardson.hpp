#pragma once

#include <vector>

#include "weaklab/errors.hpp"

namespace weaklab {

/// Geometric coupling ladder {top·ratio^{−i}}, i = 0..count−1.
struct LambdaLadder {
  double top = 1e-2;
  int count = 9;
  double ratio = 2.0;

  std::vector<double> values() const;
};

struct LimitEstimate {
  double value = 0.0;
  double error_estimate = 0.0;
  // Empirical convergence order of the raw samples (power of 1/ratio);
  // NaN when differences sit below the noise floor.
  double empirical_order = 0.0;
  bool converged = false;
};

/// Extrapolates g(λ) → g(0) from samples on a geometric ladder
/// (samples[i] = g(λ_i), λ descending by `ratio`). `levels` Richardson
/// passes remove the λ¹..λ^levels terms.
LimitEstimate richardson_limit(const std::vector<double>& samples,
                               double ratio = 2.0, int levels = 2);

/// Same, but throws ExtrapolationDiverged when no convergence is seen.
double richardson_limit_checked(const std::vector<double>& samples,
                                double ratio = 2.0, int levels = 2);

/// First-order coefficient of F(λ) = c₁λ + c₂λ² + … (F(0) = 0) from two
/// samples at λ and λ/ratio (used by the O(λ²) slope tests).
double two_point_slope(double f_at_lambda, double f_at_lambda_over_ratio,
                       double lambda, double ratio = 2.0);

}  // namespace weaklab
