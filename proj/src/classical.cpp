#include "weaklab/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace weaklab {

namespace {

double poly_eval(const std::vector<RealVec>& coeffs, int index,
                 double lambda) {
  double acc = 0.0;
  double power = 1.0;
  for (const auto& c : coeffs) {
    acc += c(index) * power;
    power *= lambda;
  }
  return acc;
}

RealMat poly_eval(const std::vector<RealMat>& coeffs, double lambda) {
  RealMat acc = RealMat::Zero(coeffs.front().rows(), coeffs.front().cols());
  double power = 1.0;
  for (const auto& c : coeffs) {
    acc += c * power;
    power *= lambda;
  }
  return acc;
}

}  // namespace

OnticDistribution::OnticDistribution(RealVec probs) : probs_(std::move(probs)) {
  if (probs_.size() < 1) {
    throw DimensionMismatch("OnticDistribution: empty");
  }
  if (probs_.minCoeff() < 0.0) {
    throw ValidationError("OnticDistribution: negative probability");
  }
  if (std::abs(probs_.sum() - 1.0) > 1e-12) {
    throw ValidationError("OnticDistribution: probabilities must sum to 1");
  }
}

OnticDistribution OnticDistribution::point(int n_states, int state) {
  RealVec p = RealVec::Zero(n_states);
  p(state) = 1.0;
  return OnticDistribution(std::move(p));
}

PostselectionWeights::PostselectionWeights(RealVec weights)
    : weights_(std::move(weights)) {
  if (weights_.size() < 1) {
    throw DimensionMismatch("PostselectionWeights: empty");
  }
  if (weights_.minCoeff() < 0.0 || weights_.maxCoeff() > 1.0) {
    throw ValidationError("PostselectionWeights: weights must lie in [0, 1]");
  }
}

PostselectionWeights PostselectionWeights::accept_all(int n_states) {
  return PostselectionWeights(RealVec::Ones(n_states));
}

ClassicalInstrument::ClassicalInstrument(int n_states,
                                         std::vector<ClassicalOutcome> outcomes,
                                         double lambda_hint)
    : n_states_(n_states), outcomes_(std::move(outcomes)) {
  if (n_states_ < 1 || outcomes_.empty()) {
    throw DimensionMismatch("ClassicalInstrument: empty state or outcome set");
  }
  for (const auto& out : outcomes_) {
    if (out.prob_coeffs.empty() || out.transition_coeffs.empty()) {
      throw ValidationError("ClassicalInstrument: missing series data");
    }
    for (const auto& c : out.prob_coeffs) {
      if (c.size() != n_states_ || !c.allFinite()) {
        throw ValidationError("ClassicalInstrument: bad probability series");
      }
    }
    for (const auto& t : out.transition_coeffs) {
      if (t.rows() != n_states_ || t.cols() != n_states_ || !t.allFinite()) {
        throw ValidationError("ClassicalInstrument: bad transition series");
      }
    }
    // λ = 0: no interaction, so the update map must be the identity.
    if ((out.transition_coeffs[0] - RealMat::Identity(n_states_, n_states_))
            .cwiseAbs()
            .maxCoeff() > 1e-12) {
      throw ValidationError(
          "ClassicalInstrument: transition at lambda = 0 is not the identity");
    }
    // Column-stochastic at every λ: coefficients beyond order 0 sum to zero.
    for (std::size_t r = 1; r < out.transition_coeffs.size(); ++r) {
      if (out.transition_coeffs[r].colwise().sum().cwiseAbs().maxCoeff() >
          1e-12) {
        throw ValidationError(
            "ClassicalInstrument: transition series breaks stochasticity");
      }
    }
    // λ = 0 outcome probability must be state independent.
    const RealVec& p0 = out.prob_coeffs[0];
    if ((p0.array() - p0(0)).abs().maxCoeff() > 1e-12) {
      throw ValidationError(
          "ClassicalInstrument: lambda = 0 probability depends on the state");
    }
  }

  // Σ_m P(m | s_j) = 1 identically in λ.
  std::size_t max_order = 0;
  for (const auto& out : outcomes_) {
    max_order = std::max(max_order, out.prob_coeffs.size());
  }
  for (std::size_t r = 0; r < max_order; ++r) {
    RealVec total = RealVec::Zero(n_states_);
    for (const auto& out : outcomes_) {
      if (r < out.prob_coeffs.size()) {
        total += out.prob_coeffs[r];
      }
    }
    const double expected = (r == 0) ? 1.0 : 0.0;
    if ((total.array() - expected).abs().maxCoeff() > 1e-12) {
      throw ValidationError(
          "ClassicalInstrument: outcome probabilities do not sum to 1");
    }
  }

  // Center the contextual values, recording the shift.
  const RealVec p0 = zero_coupling_probs();
  double mean = 0.0;
  for (int m = 0; m < n_outcomes(); ++m) {
    mean += outcomes_[m].value * p0(m);
  }
  contextual_shift_ = mean;
  for (auto& out : outcomes_) {
    out.value -= mean;
  }

  lambda_max_ = scan_lambda_max(lambda_hint);
}

RealVec ClassicalInstrument::zero_coupling_probs() const {
  RealVec p0(n_outcomes());
  for (int m = 0; m < n_outcomes(); ++m) {
    p0(m) = outcomes_[m].prob_coeffs[0](0);
  }
  return p0;
}

void ClassicalInstrument::check_lambda(double lambda) const {
  if (lambda < 0.0 || lambda > lambda_max_) {
    throw LambdaOutOfRange("ClassicalInstrument: lambda outside [0, " +
                           std::to_string(lambda_max_) + "]");
  }
}

double ClassicalInstrument::outcome_probability(double lambda, int state,
                                                int m) const {
  check_lambda(lambda);
  if (exact_prob_) {
    return exact_prob_(lambda, state, m);
  }
  return poly_eval(outcomes_[m].prob_coeffs, state, lambda);
}

RealMat ClassicalInstrument::transition(double lambda, int m) const {
  check_lambda(lambda);
  if (exact_transition_) {
    return exact_transition_(lambda, m);
  }
  return poly_eval(outcomes_[m].transition_coeffs, lambda);
}

ClassicalInstrument ClassicalInstrument::with_exact(
    ExactProb prob, ExactTransition transition, double lambda_max) const {
  if (!prob || !transition || lambda_max <= 0.0) {
    throw ValidationError("with_exact: evaluators and range required");
  }
  ClassicalInstrument out = *this;
  // Agreement with the series data at λ = 0.
  const RealVec p0 = zero_coupling_probs();
  for (int m = 0; m < n_outcomes(); ++m) {
    for (int j = 0; j < n_states_; ++j) {
      if (std::abs(prob(0.0, j, m) - p0(m)) > 1e-10) {
        throw ValidationError(
            "with_exact: evaluator disagrees with P0 at lambda = 0");
      }
    }
    if ((transition(0.0, m) - RealMat::Identity(n_states_, n_states_))
            .cwiseAbs()
            .maxCoeff() > 1e-10) {
      throw ValidationError(
          "with_exact: transition at lambda = 0 is not the identity");
    }
  }
  // Probability and stochasticity constraints on a sample grid.
  for (int i = 1; i <= 16; ++i) {
    const double lambda = lambda_max * i / 16.0;
    for (int j = 0; j < n_states_; ++j) {
      double total = 0.0;
      for (int m = 0; m < n_outcomes(); ++m) {
        const double p = prob(lambda, j, m);
        if (p < -1e-10 || p > 1.0 + 1e-10) {
          throw ValidationError("with_exact: probability leaves [0, 1]");
        }
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-10) {
        throw ValidationError(
            "with_exact: outcome probabilities do not sum to 1");
      }
    }
    for (int m = 0; m < n_outcomes(); ++m) {
      const RealMat t = transition(lambda, m);
      if (t.minCoeff() < -1e-10 || t.maxCoeff() > 1.0 + 1e-10 ||
          (t.colwise().sum().array() - 1.0).abs().maxCoeff() > 1e-10) {
        throw ValidationError("with_exact: transition is not stochastic");
      }
    }
  }
  out.exact_prob_ = std::move(prob);
  out.exact_transition_ = std::move(transition);
  out.lambda_max_ = lambda_max;
  return out;
}

double ClassicalInstrument::scan_lambda_max(double hint) const {
  // All entries of every probability and transition polynomial must stay in
  // [0, 1] on [0, λ*]. Linear series admit exact bounds; otherwise a grid
  // scan with bisection refinement.
  bool all_linear = true;
  for (const auto& out : outcomes_) {
    if (out.prob_coeffs.size() > 2 || out.transition_coeffs.size() > 2) {
      all_linear = false;
    }
  }

  if (all_linear) {
    double bound = hint;
    auto clamp_linear = [&bound](double a, double b) {
      // a + bλ ∈ [0, 1] for λ ∈ [0, bound]
      if (b > 0.0) {
        bound = std::min(bound, (1.0 - a) / b);
      } else if (b < 0.0) {
        bound = std::min(bound, a / (-b));
      }
    };
    for (const auto& out : outcomes_) {
      for (int j = 0; j < n_states_; ++j) {
        const double a = out.prob_coeffs[0](j);
        const double b =
            out.prob_coeffs.size() > 1 ? out.prob_coeffs[1](j) : 0.0;
        clamp_linear(a, b);
      }
      for (int k = 0; k < n_states_; ++k) {
        for (int j = 0; j < n_states_; ++j) {
          const double a = out.transition_coeffs[0](k, j);
          const double b = out.transition_coeffs.size() > 1
                               ? out.transition_coeffs[1](k, j)
                               : 0.0;
          clamp_linear(a, b);
        }
      }
    }
    return std::max(bound, 0.0);
  }

  auto feasible = [this](double lambda) {
    for (int m = 0; m < n_outcomes(); ++m) {
      for (int j = 0; j < n_states_; ++j) {
        const double p = poly_eval(outcomes_[m].prob_coeffs, j, lambda);
        if (p < -1e-12 || p > 1.0 + 1e-12) {
          return false;
        }
      }
      const RealMat t = poly_eval(outcomes_[m].transition_coeffs, lambda);
      if (t.minCoeff() < -1e-12 || t.maxCoeff() > 1.0 + 1e-12) {
        return false;
      }
    }
    return true;
  };

  const int grid = 4096;
  double last_good = 0.0;
  double first_bad = -1.0;
  for (int i = 1; i <= grid; ++i) {
    const double lambda = hint * static_cast<double>(i) / grid;
    if (feasible(lambda)) {
      last_good = lambda;
    } else {
      first_bad = lambda;
      break;
    }
  }
  if (first_bad < 0.0) {
    return last_good;
  }
  double lo = last_good;
  double hi = first_bad;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double classical_postselected_expectation(const ClassicalInstrument& inst,
                                          const OnticDistribution& p,
                                          const PostselectionWeights& q,
                                          double lambda) {
  if (p.size() != inst.n_states() || q.size() != inst.n_states()) {
    throw DimensionMismatch(
        "classical_postselected_expectation: size mismatch");
  }
  double numerator = 0.0;
  double denominator = 0.0;
  for (int m = 0; m < inst.n_outcomes(); ++m) {
    const RealMat t = inst.transition(lambda, m);
    double joint = 0.0;  // Σ_{kj} q_k T_kj P(m|s_j) p_j
    for (int j = 0; j < inst.n_states(); ++j) {
      if (p[j] == 0.0) {
        continue;
      }
      const double pm = inst.outcome_probability(lambda, j, m);
      joint += pm * p[j] * q.weights().dot(t.col(j));
    }
    numerator += inst.contextual_value(m) * joint;
    denominator += joint;
  }
  if (denominator <= tol::overlap_floor) {
    throw ZeroPostselectionProbability(
        "classical_postselected_expectation: postselection never succeeds");
  }
  return numerator / denominator;
}

double classical_weak_value(const RealMat& a_tilde, const OnticDistribution& p,
                            const PostselectionWeights& q) {
  if (a_tilde.rows() != a_tilde.cols() || a_tilde.rows() != p.size() ||
      q.size() != p.size()) {
    throw DimensionMismatch("classical_weak_value: size mismatch");
  }
  const double denominator = q.weights().dot(p.probs());
  if (denominator <= tol::overlap_floor) {
    throw ZeroPostselectionProbability(
        "classical_weak_value: q·p vanishes");
  }
  const double numerator = q.weights().dot(a_tilde * p.probs());
  return numerator / denominator;
}

ClassicalInstrument build_two_outcome_model(const RealMat& a_tilde) {
  if (a_tilde.rows() != a_tilde.cols()) {
    throw DimensionMismatch("build_two_outcome_model: matrix must be square");
  }
  if (!a_tilde.allFinite()) {
    throw ValidationError("build_two_outcome_model: non-finite entries");
  }
  const int n = static_cast<int>(a_tilde.rows());
  const RealVec column_sums = a_tilde.colwise().sum();

  std::vector<ClassicalOutcome> outcomes(2);
  for (int idx = 0; idx < 2; ++idx) {
    const double sign = idx == 0 ? 1.0 : -1.0;
    ClassicalOutcome& out = outcomes[idx];
    out.value = sign;
    out.prob_coeffs = {RealVec::Constant(n, 0.5),
                       0.5 * sign * column_sums};

    RealMat first = RealMat::Zero(n, n);
    for (int j = 0; j < n; ++j) {
      double leaving = 0.0;
      for (int k = 0; k < n; ++k) {
        if (k == j) {
          continue;
        }
        const double rate = 2.0 * std::max(sign * a_tilde(k, j), 0.0);
        first(k, j) = rate;
        leaving += rate;
      }
      first(j, j) = -leaving;
    }
    out.transition_coeffs = {RealMat::Identity(n, n), first};
  }
  return ClassicalInstrument(n, std::move(outcomes));
}

WeakMatrixEstimate extract_weak_matrix(const ClassicalInstrument& inst,
                                       const LambdaLadder& ladder) {
  const int n = inst.n_states();
  std::vector<double> lambdas = ladder.values();
  // Drop rungs above the instrument's validity range.
  std::erase_if(lambdas,
                [&inst](double l) { return l > inst.lambda_max(); });
  if (lambdas.size() < 3) {
    throw LambdaOutOfRange(
        "extract_weak_matrix: ladder does not fit below lambda_max");
  }

  WeakMatrixEstimate est;
  est.matrix = RealMat::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      std::vector<double> samples;
      samples.reserve(lambdas.size());
      for (double lambda : lambdas) {
        double acc = 0.0;
        for (int m = 0; m < inst.n_outcomes(); ++m) {
          acc += inst.contextual_value(m) *
                 inst.outcome_probability(lambda, j, m) *
                 inst.transition(lambda, m)(k, j);
        }
        samples.push_back(acc / lambda);
      }
      LimitEstimate limit = richardson_limit(samples, ladder.ratio);
      if (!limit.converged) {
        throw ExtrapolationDiverged(
            "extract_weak_matrix: no first-order convergence at entry (" +
            std::to_string(k) + ", " + std::to_string(j) + ")");
      }
      est.matrix(k, j) = limit.value;
      est.error_estimate = std::max(est.error_estimate, limit.error_estimate);
    }
  }
  return est;
}

DisturbanceClassification classify_disturbance(const ClassicalInstrument& inst,
                                               double slope_tolerance) {
  const int n = inst.n_states();
  double lambda = std::min(1e-2, 0.5 * inst.lambda_max());
  if (lambda <= 0.0) {
    throw LambdaOutOfRange("classify_disturbance: empty validity range");
  }

  double value_scale = 1.0;
  for (int m = 0; m < inst.n_outcomes(); ++m) {
    value_scale = std::max(value_scale, std::abs(inst.contextual_value(m)));
  }
  const double threshold = slope_tolerance * value_scale;

  DisturbanceClassification result;
  result.strong_ok = true;
  result.weak_ok = true;
  std::optional<ClassicalWitness> strong_witness;
  std::optional<ClassicalWitness> weak_witness;

  const RealMat eye = RealMat::Identity(n, n);
  RealMat averaged_full = RealMat::Zero(n, n);
  RealMat averaged_half = RealMat::Zero(n, n);
  for (int m = 0; m < inst.n_outcomes(); ++m) {
    const RealMat t_full = inst.transition(lambda, m);
    const RealMat t_half = inst.transition(lambda / 2.0, m);
    for (int j = 0; j < n; ++j) {
      averaged_full.col(j) +=
          inst.outcome_probability(lambda, j, m) * t_full.col(j);
      averaged_half.col(j) +=
          inst.outcome_probability(lambda / 2.0, j, m) * t_half.col(j);
    }
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < n; ++j) {
        const double slope = two_point_slope(t_full(k, j) - eye(k, j),
                                             t_half(k, j) - eye(k, j), lambda);
        if (std::abs(slope) > threshold && !strong_witness) {
          strong_witness = ClassicalWitness{m, j, k, slope};
        }
      }
    }
  }
  averaged_full -= eye;
  averaged_half -= eye;
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      const double slope =
          two_point_slope(averaged_full(k, j), averaged_half(k, j), lambda);
      if (std::abs(slope) > threshold && !weak_witness) {
        weak_witness = ClassicalWitness{-1, j, k, slope};
      }
    }
  }

  result.strong_ok = !strong_witness.has_value();
  result.weak_ok = !weak_witness.has_value();
  result.witness = result.strong_ok ? weak_witness : strong_witness;

  // Classical equivalence (weak ⇒ strong); numerically this can only fail if
  // the slope test misclassifies, which we refuse to hide.
  if (result.weak_ok && !result.strong_ok) {
    throw ValidationError(
        "classify_disturbance: weak-sense check passed but strong-sense "
        "failed; classical equivalence violated");
  }
  return result;
}

}  // namespace weaklab
