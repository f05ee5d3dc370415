#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "weaklab/linalg.hpp"
#include "weaklab/richardson.hpp"

namespace weaklab {

/// Probability distribution over a finite set of ontic states.
class OnticDistribution {
 public:
  explicit OnticDistribution(RealVec probs);
  static OnticDistribution point(int n_states, int state);

  int size() const { return static_cast<int>(probs_.size()); }
  const RealVec& probs() const { return probs_; }
  double operator[](int j) const { return probs_(j); }

 private:
  RealVec probs_;
};

/// Acceptance probabilities q_j ∈ [0, 1] of a classical postselection.
class PostselectionWeights {
 public:
  explicit PostselectionWeights(RealVec weights);
  static PostselectionWeights accept_all(int n_states);

  int size() const { return static_cast<int>(weights_.size()); }
  const RealVec& weights() const { return weights_; }
  double operator[](int j) const { return weights_(j); }

 private:
  RealVec weights_;
};

/// One outcome of a classical instrument. Probabilities and transition maps
/// are polynomials in the coupling λ:
///   prob(λ | s_j)  = Σ_r prob_coeffs[r](j)·λ^r
///   T(λ)           = Σ_r transition_coeffs[r]·λ^r,  T_kj = P(j → k | m).
struct ClassicalOutcome {
  double value = 0.0;  // contextual value A_m
  std::vector<RealVec> prob_coeffs;
  std::vector<RealMat> transition_coeffs;
};

/// Finite-state measurement model: outcome probabilities plus per-outcome
/// stochastic state-update maps, each polynomial in λ (optionally overridden
/// by exact evaluators). Contextual values are centered at construction
/// (Σ_m A_m P⁰(m) = 0) and the applied shift kept.
class ClassicalInstrument {
 public:
  using ExactProb = std::function<double(double lambda, int state, int m)>;
  using ExactTransition = std::function<RealMat(double lambda, int m)>;

  ClassicalInstrument(int n_states, std::vector<ClassicalOutcome> outcomes,
                      double lambda_hint = 0.5);

  /// Attaches exact λ-evaluators (arbitrary functions of λ), checked against
  /// the series at λ = 0 and for probability/stochasticity constraints on a
  /// sample grid. The evaluators take over outcome_probability/transition.
  ClassicalInstrument with_exact(ExactProb prob, ExactTransition transition,
                                 double lambda_max) const;

  int n_states() const { return n_states_; }
  int n_outcomes() const { return static_cast<int>(outcomes_.size()); }
  double contextual_value(int m) const { return outcomes_[m].value; }
  double contextual_shift() const { return contextual_shift_; }
  double lambda_max() const { return lambda_max_; }
  const std::vector<ClassicalOutcome>& outcomes() const { return outcomes_; }

  /// P⁰(m), the λ = 0 outcome distribution (state independent).
  RealVec zero_coupling_probs() const;

  /// P^λ(m | s_j). Throws LambdaOutOfRange outside [0, lambda_max].
  double outcome_probability(double lambda, int state, int m) const;

  RealMat transition(double lambda, int m) const;

 private:
  void check_lambda(double lambda) const;
  double scan_lambda_max(double hint) const;

  int n_states_;
  std::vector<ClassicalOutcome> outcomes_;
  double contextual_shift_ = 0.0;
  double lambda_max_ = 0.0;
  ExactProb exact_prob_;
  ExactTransition exact_transition_;
};

/// Finite-λ conditional expectation of the contextual values given
/// preparation p and postselection q (joint-probability form, no
/// intermediate normalization).
double classical_postselected_expectation(const ClassicalInstrument& inst,
                                          const OnticDistribution& p,
                                          const PostselectionWeights& q,
                                          double lambda);

/// (Σ_{jk} q_k Ã_kj p_j) / (Σ_j q_j p_j).
double classical_weak_value(const RealMat& a_tilde, const OnticDistribution& p,
                            const PostselectionWeights& q);

/// Explicit two-outcome instrument realizing a given weak matrix:
///   P(± | s_j) = 1/2 ± (λ/2)·Σ_k Ã_kj,  A_± = ±1,
///   off-diagonal transitions 2λ[±Ã_kj]_+.
ClassicalInstrument build_two_outcome_model(const RealMat& a_tilde);

struct WeakMatrixEstimate {
  RealMat matrix;
  double error_estimate = 0.0;
};

/// Recovers Ã_kj = lim λ⁻¹ Σ_m A_m P^λ(m|s_j)·T_kj(λ, m) by Richardson
/// extrapolation over the ladder. Throws ExtrapolationDiverged.
WeakMatrixEstimate extract_weak_matrix(const ClassicalInstrument& inst,
                                       const LambdaLadder& ladder = {});

struct ClassicalWitness {
  int outcome = -1;  // −1 for the outcome-averaged (weak sense) check
  int from_state = 0;
  int to_state = 0;
  double slope = 0.0;
};

struct DisturbanceClassification {
  bool strong_ok = false;
  bool weak_ok = false;
  std::optional<ClassicalWitness> witness;
};

/// Slope tests of the per-outcome and outcome-averaged transition maps.
/// For classical instruments, weak-sense non-disturbance implies the strong
/// sense; that implication is asserted here.
DisturbanceClassification classify_disturbance(const ClassicalInstrument& inst,
                                               double slope_tolerance = 1e-6);

}  // namespace weaklab
