#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "weaklab/linalg.hpp"
#include "weaklab/richardson.hpp"

namespace weaklab {

/// Positive unit-trace operator. Validation is strict: inputs outside the
/// tolerance are rejected, never projected back.
class DensityState {
 public:
  explicit DensityState(Mat matrix);
  static DensityState pure(const PureState& psi);
  static DensityState maximally_mixed(Eigen::Index dim);

  const Mat& matrix() const { return matrix_; }
  Eigen::Index dim() const { return matrix_.rows(); }

 private:
  Mat matrix_;
};

/// Positive operator with spectrum in [0, 1]; the postselection probability
/// on state s is tr[effect·s].
class Effect {
 public:
  explicit Effect(Mat matrix);
  static Effect identity(Eigen::Index dim);
  static Effect pure(const PureState& phi);

  const Mat& matrix() const { return matrix_; }
  Eigen::Index dim() const { return matrix_.rows(); }

 private:
  Mat matrix_;
};

/// Operator Â parameterizing postselected weak statistics, defined modulo
/// imaginary multiples of the identity. Stored as the canonical
/// representative with tr[Â^I] = 0.
class GeneralizedObservable {
 public:
  explicit GeneralizedObservable(const Mat& rep);

  const Mat& canonical() const { return canonical_; }
  Eigen::Index dim() const { return canonical_.rows(); }
  Mat hermitian_part() const;      // Â^R
  Mat antihermitian_part() const;  // Â^I

 private:
  Mat canonical_;
};

/// λ-expansion of one Kraus operator,
///   K̂^λ = K0·𝟙 + λ·δK̂ + (λ²/2)·δ²K̂ + O(λ³),
/// optionally with an exact evaluator λ ↦ K̂^λ. In sqrt-lambda instruments
/// the same record stores K̂^λ = √λ·L̂ + O(λ^{3/2}) with L̂ in first_order
/// and K0 = 0.
struct KrausSeries {
  double k0 = 0.0;
  Mat first_order;
  std::optional<Mat> second_order;
  std::function<Mat(double)> exact;
};

struct InstrumentOutcome {
  double value = 0.0;  // contextual value A_m
  std::vector<KrausSeries> kraus;
};

enum class InstrumentMode { Series, Exact, SqrtLambda };

/// Kraus-operator description of a measurement with coupling λ. Contextual
/// values are centered at construction (recorded in contextual_shift) and
/// each series is phase-fixed so K0 is real and non-negative.
///
/// Finite-λ evaluation: Exact instruments use their evaluators directly.
/// Series instruments are completed to an exactly trace-preserving family by
/// right-multiplying the truncated polynomials with S(λ)^{−1/2}, where
/// S(λ) = Σ K̂†K̂; the completion leaves every coefficient the series pins
/// down (through λ² in probabilities) untouched.
class QuantumInstrument {
 public:
  QuantumInstrument(Eigen::Index dim, InstrumentMode mode,
                    std::vector<InstrumentOutcome> outcomes,
                    double lambda_max = 5e-2);

  Eigen::Index dim() const { return dim_; }
  InstrumentMode mode() const { return mode_; }
  int n_outcomes() const { return static_cast<int>(outcomes_.size()); }
  const std::vector<InstrumentOutcome>& outcomes() const { return outcomes_; }
  double contextual_value(int m) const { return outcomes_[m].value; }
  double contextual_shift() const { return contextual_shift_; }
  double lambda_max() const { return lambda_max_; }

  bool has_series() const;
  bool has_exact() const;

  /// P⁰(m) = Σ_n K0².
  RealVec zero_coupling_probs() const;

  /// δK̄_m = Σ_n K0·δK̂. Requires series data (ModeMismatch otherwise).
  Mat averaged_first_order(int m) const;

  /// All Kraus operators at finite λ, grouped by outcome.
  /// Throws LambdaOutOfRange outside [0, lambda_max].
  std::vector<std::vector<Mat>> evaluate(double lambda) const;

 private:
  Eigen::Index dim_;
  InstrumentMode mode_;
  std::vector<InstrumentOutcome> outcomes_;
  double contextual_shift_ = 0.0;
  double lambda_max_;
};

RealVec outcome_probabilities(const QuantumInstrument& inst,
                              const DensityState& s, double lambda);

/// Σ_n K̂ s K̂† / P^λ(m|s). Throws ZeroOutcomeProbability.
DensityState post_measurement_state(const QuantumInstrument& inst,
                                    const DensityState& s, double lambda,
                                    int m);

/// Finite-λ conditional expectation of the contextual values.
double postselected_expectation(const QuantumInstrument& inst,
                                const DensityState& s, const Effect& effect,
                                double lambda);

struct ObservableExtraction {
  GeneralizedObservable observable;
  std::vector<Mat> averaged_first_order;  // δK̄_m per outcome
};

/// Â = 2 Σ_m A_m δK̄_m from the series data.
ObservableExtraction extract_generalized_observable(
    const QuantumInstrument& inst);

/// Re tr[š Â s] / tr[š s]. Throws ZeroOverlap.
double weak_value(const GeneralizedObservable& a_hat, const DensityState& s,
                  const Effect& effect);

struct WeakLimit {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Richardson-extrapolated λ⁻¹·postselected_expectation over the ladder.
WeakLimit numeric_weak_limit(const QuantumInstrument& inst,
                             const DensityState& s, const Effect& effect,
                             const LambdaLadder& ladder = {});

/// D̂ = −i Σ_m δK̄_m; Hermitian by first-order completeness.
Mat drift_operator(const QuantumInstrument& inst);

/// K̂ → e^{−iλD̂}·K̂: cancels the first-order outcome-averaged back-action
/// without changing the generalized observable.
QuantumInstrument compensate(const QuantumInstrument& inst);

/// M^λ_?(s) = Σ_m P^λ(m|s)·M_m^λ(s).
DensityState ignore_outcome_channel(const QuantumInstrument& inst,
                                    const DensityState& s, double lambda);

/// First-order relative change of the postselection probability when the
/// outcome is ignored: −2·Im tr[š D̂ s]/tr[š s].
double postselection_shift(const QuantumInstrument& inst,
                           const DensityState& s, const Effect& effect);

struct EquivalenceResult {
  bool equivalent = false;
  // Present when not equivalent: a preparation/postselection pair whose
  // weak values differ, with gap = Re tr[š (Â−Â′) s].
  std::optional<std::pair<DensityState, Effect>> witness;
  double gap = 0.0;
};

/// Decides Â ∼ Â′ (difference an imaginary multiple of 𝟙) and otherwise
/// produces an explicit discriminating pair: the eigenprojector of the
/// Hermitian part, or the e^{±iπ/4} superposition pair of two eigenvectors
/// of the anti-Hermitian part.
EquivalenceResult observable_equiv(const GeneralizedObservable& a,
                                   const GeneralizedObservable& b,
                                   double eps = 1e-9);

struct StrongSenseWitness {
  int outcome = 0;
  PureState state;
  double slope = 0.0;  // λ² fidelity-deficit coefficient
};

/// A pure state whose post-measurement ray moves at first order for some
/// outcome; absent only when every δK̄_m ∝ 𝟙 (trivial instrument).
std::optional<StrongSenseWitness> strong_sense_witness(
    const QuantumInstrument& inst, double threshold = 1e-8);

}  // namespace weaklab
