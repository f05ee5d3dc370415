#include "weaklab/instrument.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "weaklab/random.hpp"

namespace weaklab {

namespace {

constexpr double kEigenvalueFloor = -1e-10;

void require_square(const Mat& m, const char* who) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw DimensionMismatch(std::string(who) + ": matrix must be square");
  }
}

}  // namespace

DensityState::DensityState(Mat matrix) : matrix_(std::move(matrix)) {
  require_square(matrix_, "DensityState");
  if (!is_hermitian(matrix_)) {
    throw ValidationError("DensityState: matrix is not Hermitian");
  }
  if (std::abs(matrix_.trace().real() - 1.0) > tol::hermitian) {
    throw ValidationError("DensityState: trace must be 1");
  }
  Eigen::SelfAdjointEigenSolver<Mat> solver(matrix_);
  if (solver.eigenvalues().minCoeff() < kEigenvalueFloor) {
    throw ValidationError("DensityState: negative eigenvalue");
  }
}

DensityState DensityState::pure(const PureState& psi) {
  return DensityState(psi.projector());
}

DensityState DensityState::maximally_mixed(Eigen::Index dim) {
  return DensityState(Mat::Identity(dim, dim) / static_cast<double>(dim));
}

Effect::Effect(Mat matrix) : matrix_(std::move(matrix)) {
  require_square(matrix_, "Effect");
  if (!is_hermitian(matrix_)) {
    throw ValidationError("Effect: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Mat> solver(matrix_);
  if (solver.eigenvalues().minCoeff() < kEigenvalueFloor ||
      solver.eigenvalues().maxCoeff() > 1.0 - kEigenvalueFloor) {
    throw ValidationError("Effect: spectrum must lie in [0, 1]");
  }
}

Effect Effect::identity(Eigen::Index dim) {
  return Effect(Mat::Identity(dim, dim));
}

Effect Effect::pure(const PureState& phi) { return Effect(phi.projector()); }

GeneralizedObservable::GeneralizedObservable(const Mat& rep) {
  require_square(rep, "GeneralizedObservable");
  // tr[Â^I] = Im tr[Â]; subtracting i·tr[Â^I]/d·𝟙 fixes the gauge.
  const double imag_trace = rep.trace().imag();
  const double d = static_cast<double>(rep.rows());
  canonical_ =
      rep - Complex{0.0, imag_trace / d} * Mat::Identity(rep.rows(), rep.rows());
}

Mat GeneralizedObservable::hermitian_part() const {
  return hermitian_split(canonical_).real_part;
}

Mat GeneralizedObservable::antihermitian_part() const {
  return hermitian_split(canonical_).imag_part;
}

QuantumInstrument::QuantumInstrument(Eigen::Index dim, InstrumentMode mode,
                                     std::vector<InstrumentOutcome> outcomes,
                                     double lambda_max)
    : dim_(dim), mode_(mode), outcomes_(std::move(outcomes)),
      lambda_max_(lambda_max) {
  if (dim_ < 1 || outcomes_.empty()) {
    throw DimensionMismatch("QuantumInstrument: empty outcome set");
  }
  if (lambda_max_ <= 0.0) {
    throw ValidationError("QuantumInstrument: lambda_max must be positive");
  }

  for (auto& out : outcomes_) {
    if (out.kraus.empty()) {
      throw ValidationError("QuantumInstrument: outcome without Kraus data");
    }
    for (auto& ks : out.kraus) {
      if (ks.first_order.rows() != dim_ || ks.first_order.cols() != dim_) {
        throw DimensionMismatch("QuantumInstrument: Kraus dimension mismatch");
      }
      if (ks.second_order &&
          (ks.second_order->rows() != dim_ || ks.second_order->cols() != dim_)) {
        throw DimensionMismatch("QuantumInstrument: Kraus dimension mismatch");
      }
      // Phase convention: K0 real and non-negative.
      if (ks.k0 < 0.0) {
        ks.k0 = -ks.k0;
        ks.first_order = -ks.first_order;
        if (ks.second_order) {
          *ks.second_order = -*ks.second_order;
        }
        if (ks.exact) {
          auto inner = ks.exact;
          ks.exact = [inner](double l) { return Mat(-inner(l)); };
        }
      }
      if (mode_ == InstrumentMode::SqrtLambda && ks.k0 != 0.0) {
        throw ValidationError(
            "QuantumInstrument: sqrt-lambda Kraus data must have K0 = 0");
      }
      if (ks.exact) {
        const Mat at_zero = ks.exact(0.0);
        if (max_abs(at_zero - ks.k0 * Mat::Identity(dim_, dim_)) > 1e-8) {
          throw ValidationError(
              "QuantumInstrument: exact evaluator does not reduce to K0 at "
              "lambda = 0");
        }
        const double h = 1e-5;
        const Mat derivative = (ks.exact(h) - ks.exact(-h)) / (2.0 * h);
        if (max_abs(derivative - ks.first_order) > 1e-6) {
          throw ValidationError(
              "QuantumInstrument: exact evaluator derivative at 0 does not "
              "match the first-order term");
        }
      }
    }
  }

  if (mode_ == InstrumentMode::Exact && !has_exact()) {
    throw ModeMismatch("QuantumInstrument: exact mode without evaluators");
  }

  if (mode_ == InstrumentMode::SqrtLambda) {
    if (n_outcomes() != 2) {
      throw ValidationError(
          "QuantumInstrument: sqrt-lambda instruments use the two-outcome "
          "realization");
    }
  } else {
    // Σ_{m,n} K0² = 1.
    double p0_total = 0.0;
    for (const auto& out : outcomes_) {
      for (const auto& ks : out.kraus) {
        p0_total += ks.k0 * ks.k0;
      }
    }
    if (std::abs(p0_total - 1.0) > tol::hermitian) {
      throw ValidationError(
          "QuantumInstrument: zeroth-order completeness fails");
    }

    // First order: Σ K0·(δK̂ + δK̂†) = 0.
    Mat first = Mat::Zero(dim_, dim_);
    bool all_second = true;
    Mat second = Mat::Zero(dim_, dim_);
    for (const auto& out : outcomes_) {
      for (const auto& ks : out.kraus) {
        first += ks.k0 * (ks.first_order + ks.first_order.adjoint());
        second += ks.first_order.adjoint() * ks.first_order;
        if (ks.second_order) {
          second += 0.5 * ks.k0 *
                    (ks.second_order->adjoint() + *ks.second_order);
        } else {
          all_second = false;
        }
      }
    }
    if (max_abs(first) > tol::completeness) {
      throw ValidationError(
          "QuantumInstrument: first-order completeness fails");
    }
    if (all_second && max_abs(second) > tol::completeness) {
      throw ValidationError(
          "QuantumInstrument: second-order completeness fails");
    }
  }

  // Center the contextual values and record the shift.
  const RealVec p0 = zero_coupling_probs();
  double mean = 0.0;
  for (int m = 0; m < n_outcomes(); ++m) {
    mean += outcomes_[m].value * p0(m);
  }
  contextual_shift_ = mean;
  for (auto& out : outcomes_) {
    out.value -= mean;
  }
}

bool QuantumInstrument::has_series() const {
  return mode_ != InstrumentMode::SqrtLambda;
}

bool QuantumInstrument::has_exact() const {
  for (const auto& out : outcomes_) {
    for (const auto& ks : out.kraus) {
      if (!ks.exact) {
        return false;
      }
    }
  }
  return true;
}

RealVec QuantumInstrument::zero_coupling_probs() const {
  RealVec p0(n_outcomes());
  if (mode_ == InstrumentMode::SqrtLambda) {
    p0.setConstant(0.5);
    return p0;
  }
  for (int m = 0; m < n_outcomes(); ++m) {
    double acc = 0.0;
    for (const auto& ks : outcomes_[m].kraus) {
      acc += ks.k0 * ks.k0;
    }
    p0(m) = acc;
  }
  return p0;
}

Mat QuantumInstrument::averaged_first_order(int m) const {
  if (!has_series()) {
    throw ModeMismatch(
        "QuantumInstrument: sqrt-lambda data has no first-order series");
  }
  Mat acc = Mat::Zero(dim_, dim_);
  for (const auto& ks : outcomes_[m].kraus) {
    acc += ks.k0 * ks.first_order;
  }
  return acc;
}

std::vector<std::vector<Mat>> QuantumInstrument::evaluate(
    double lambda) const {
  if (lambda < 0.0 || lambda > lambda_max_) {
    throw LambdaOutOfRange("QuantumInstrument: lambda outside [0, " +
                           std::to_string(lambda_max_) + "]");
  }
  if (mode_ == InstrumentMode::SqrtLambda) {
    throw ModeMismatch(
        "QuantumInstrument: no finite-lambda Kraus family in sqrt-lambda "
        "mode");
  }

  std::vector<std::vector<Mat>> kraus(outcomes_.size());
  const Mat eye = Mat::Identity(dim_, dim_);

  if (mode_ == InstrumentMode::Exact) {
    Mat completeness = Mat::Zero(dim_, dim_);
    for (std::size_t m = 0; m < outcomes_.size(); ++m) {
      for (const auto& ks : outcomes_[m].kraus) {
        kraus[m].push_back(ks.exact(lambda));
        completeness += kraus[m].back().adjoint() * kraus[m].back();
      }
    }
    if (max_abs(completeness - eye) > tol::completeness) {
      throw ValidationError(
          "QuantumInstrument: exact Kraus family is not complete at lambda = " +
          std::to_string(lambda));
    }
    return kraus;
  }

  // Series: truncate, then restore exact completeness with S^{−1/2}.
  Mat s_total = Mat::Zero(dim_, dim_);
  for (std::size_t m = 0; m < outcomes_.size(); ++m) {
    for (const auto& ks : outcomes_[m].kraus) {
      Mat k = ks.k0 * eye + lambda * ks.first_order;
      if (ks.second_order) {
        k += 0.5 * lambda * lambda * (*ks.second_order);
      }
      kraus[m].push_back(std::move(k));
      s_total += kraus[m].back().adjoint() * kraus[m].back();
    }
  }
  Mat normalizer;
  try {
    normalizer = inverse_sqrt(s_total);
  } catch (const ValidationError&) {
    throw LambdaOutOfRange(
        "QuantumInstrument: series evaluation breaks down at lambda = " +
        std::to_string(lambda));
  }
  for (auto& outcome_kraus : kraus) {
    for (auto& k : outcome_kraus) {
      k = k * normalizer;
    }
  }
  return kraus;
}

namespace {

// First-order joint operators P^λ(m|s)·M_m^λ(s) of the two-outcome
// realization carrying √λ Kraus terms.
std::vector<Mat> sqrt_lambda_joint(const QuantumInstrument& inst,
                                   const DensityState& s, double lambda) {
  if (lambda < 0.0 || lambda > inst.lambda_max()) {
    throw LambdaOutOfRange("sqrt_lambda_joint: lambda outside range");
  }
  const Mat& rho = s.matrix();
  Mat anticommutator = Mat::Zero(inst.dim(), inst.dim());
  for (const auto& out : inst.outcomes()) {
    for (const auto& ks : out.kraus) {
      const Mat gram = ks.first_order.adjoint() * ks.first_order;
      anticommutator += gram * rho + rho * gram;
    }
  }
  std::vector<Mat> joint;
  joint.reserve(inst.outcomes().size());
  for (const auto& out : inst.outcomes()) {
    Mat acc = 0.5 * rho - 0.25 * lambda * anticommutator;
    for (const auto& ks : out.kraus) {
      acc += lambda * ks.first_order * rho * ks.first_order.adjoint();
    }
    joint.push_back(std::move(acc));
  }
  return joint;
}

}  // namespace

RealVec outcome_probabilities(const QuantumInstrument& inst,
                              const DensityState& s, double lambda) {
  if (s.dim() != inst.dim()) {
    throw DimensionMismatch("outcome_probabilities: dimension mismatch");
  }
  RealVec probs(inst.n_outcomes());
  if (inst.mode() == InstrumentMode::SqrtLambda) {
    const auto joint = sqrt_lambda_joint(inst, s, lambda);
    for (int m = 0; m < inst.n_outcomes(); ++m) {
      probs(m) = joint[m].trace().real();
    }
    return probs;
  }
  const auto kraus = inst.evaluate(lambda);
  for (int m = 0; m < inst.n_outcomes(); ++m) {
    double acc = 0.0;
    for (const Mat& k : kraus[m]) {
      acc += (s.matrix() * k.adjoint() * k).trace().real();
    }
    probs(m) = acc;
  }
  return probs;
}

DensityState post_measurement_state(const QuantumInstrument& inst,
                                    const DensityState& s, double lambda,
                                    int m) {
  if (inst.mode() == InstrumentMode::SqrtLambda) {
    const auto joint = sqrt_lambda_joint(inst, s, lambda);
    const double prob = joint[m].trace().real();
    if (prob <= tol::overlap_floor) {
      throw ZeroOutcomeProbability(
          "post_measurement_state: outcome never occurs");
    }
    try {
      return DensityState(joint[m] / prob);
    } catch (const ValidationError&) {
      // The map is defined to first order only; its O(λ²) part is not
      // completely positive.
      throw LambdaOutOfRange(
          "post_measurement_state: the first-order sqrt-lambda map loses "
          "positivity at lambda = " +
          std::to_string(lambda) + "; use a smaller coupling");
    }
  }
  const auto kraus = inst.evaluate(lambda);
  Mat numerator = Mat::Zero(inst.dim(), inst.dim());
  for (const Mat& k : kraus[m]) {
    numerator += k * s.matrix() * k.adjoint();
  }
  const double prob = numerator.trace().real();
  if (prob <= tol::overlap_floor) {
    throw ZeroOutcomeProbability(
        "post_measurement_state: outcome never occurs");
  }
  return DensityState(numerator / prob);
}

double postselected_expectation(const QuantumInstrument& inst,
                                const DensityState& s, const Effect& effect,
                                double lambda) {
  if (s.dim() != inst.dim() || effect.dim() != inst.dim()) {
    throw DimensionMismatch("postselected_expectation: dimension mismatch");
  }
  double numerator = 0.0;
  double denominator = 0.0;
  if (inst.mode() == InstrumentMode::SqrtLambda) {
    const auto joint = sqrt_lambda_joint(inst, s, lambda);
    for (int m = 0; m < inst.n_outcomes(); ++m) {
      const double weight = (effect.matrix() * joint[m]).trace().real();
      numerator += inst.contextual_value(m) * weight;
      denominator += weight;
    }
  } else {
    const auto kraus = inst.evaluate(lambda);
    for (int m = 0; m < inst.n_outcomes(); ++m) {
      double weight = 0.0;
      for (const Mat& k : kraus[m]) {
        weight += (effect.matrix() * k * s.matrix() * k.adjoint())
                      .trace()
                      .real();
      }
      numerator += inst.contextual_value(m) * weight;
      denominator += weight;
    }
  }
  if (denominator <= tol::overlap_floor) {
    throw ZeroPostselectionProbability(
        "postselected_expectation: postselection never succeeds");
  }
  return numerator / denominator;
}

ObservableExtraction extract_generalized_observable(
    const QuantumInstrument& inst) {
  if (!inst.has_series()) {
    throw ModeMismatch(
        "extract_generalized_observable: sqrt-lambda instruments do not "
        "define a generalized observable");
  }
  // Contextual values are centered at construction, so the plain formula
  // needs no baseline correction.
  Mat a_hat = Mat::Zero(inst.dim(), inst.dim());
  std::vector<Mat> averaged;
  averaged.reserve(inst.n_outcomes());
  for (int m = 0; m < inst.n_outcomes(); ++m) {
    averaged.push_back(inst.averaged_first_order(m));
    a_hat += 2.0 * inst.contextual_value(m) * averaged.back();
  }
  return ObservableExtraction{GeneralizedObservable(a_hat),
                              std::move(averaged)};
}

double weak_value(const GeneralizedObservable& a_hat, const DensityState& s,
                  const Effect& effect) {
  if (a_hat.dim() != s.dim() || effect.dim() != s.dim()) {
    throw DimensionMismatch("weak_value: dimension mismatch");
  }
  const double overlap = (effect.matrix() * s.matrix()).trace().real();
  if (overlap <= tol::overlap_floor) {
    throw ZeroOverlap("weak_value: tr[effect·state] vanishes");
  }
  const double numerator =
      (effect.matrix() * a_hat.canonical() * s.matrix()).trace().real();
  return numerator / overlap;
}

WeakLimit numeric_weak_limit(const QuantumInstrument& inst,
                             const DensityState& s, const Effect& effect,
                             const LambdaLadder& ladder) {
  std::vector<double> lambdas = ladder.values();
  std::erase_if(lambdas,
                [&inst](double l) { return l > inst.lambda_max(); });
  if (lambdas.size() < 3) {
    throw LambdaOutOfRange(
        "numeric_weak_limit: ladder does not fit below lambda_max");
  }
  std::vector<double> samples;
  samples.reserve(lambdas.size());
  for (double lambda : lambdas) {
    samples.push_back(postselected_expectation(inst, s, effect, lambda) /
                      lambda);
  }
  LimitEstimate est = richardson_limit(samples, ladder.ratio);
  if (!est.converged) {
    throw ExtrapolationDiverged(
        "numeric_weak_limit: conditional expectation does not converge at "
        "first order");
  }
  return WeakLimit{est.value, est.error_estimate};
}

Mat drift_operator(const QuantumInstrument& inst) {
  if (!inst.has_series()) {
    throw ModeMismatch("drift_operator: series data required");
  }
  Mat sum = Mat::Zero(inst.dim(), inst.dim());
  for (int m = 0; m < inst.n_outcomes(); ++m) {
    sum += inst.averaged_first_order(m);
  }
  const Mat drift = Complex{0.0, -1.0} * sum;
  if (!is_hermitian(drift)) {
    throw ValidationError("drift_operator: result is not Hermitian");
  }
  return drift;
}

QuantumInstrument compensate(const QuantumInstrument& inst) {
  if (!inst.has_series()) {
    throw ModeMismatch("compensate: series data required");
  }
  const Mat drift = drift_operator(inst);
  const Complex minus_i{0.0, -1.0};

  std::vector<InstrumentOutcome> outcomes = inst.outcomes();
  for (auto& out : outcomes) {
    out.value += inst.contextual_shift();  // re-centered by the constructor
    for (auto& ks : out.kraus) {
      const Mat dk = ks.first_order;
      ks.first_order = dk + minus_i * drift * ks.k0;
      if (ks.second_order) {
        *ks.second_order = *ks.second_order +
                           2.0 * minus_i * drift * dk - drift * drift * ks.k0;
      }
      if (ks.exact) {
        auto inner = ks.exact;
        const Mat drift_copy = drift;
        ks.exact = [inner, drift_copy](double l) {
          return Mat(matrix_exp(drift_copy, Complex{0.0, -l}) * inner(l));
        };
      }
    }
  }
  return QuantumInstrument(inst.dim(), inst.mode(), std::move(outcomes),
                           inst.lambda_max());
}

DensityState ignore_outcome_channel(const QuantumInstrument& inst,
                                    const DensityState& s, double lambda) {
  if (inst.mode() == InstrumentMode::SqrtLambda) {
    const auto joint = sqrt_lambda_joint(inst, s, lambda);
    Mat total = Mat::Zero(inst.dim(), inst.dim());
    for (const Mat& j : joint) {
      total += j;
    }
    try {
      return DensityState(std::move(total));
    } catch (const ValidationError&) {
      throw LambdaOutOfRange(
          "ignore_outcome_channel: the first-order sqrt-lambda map loses "
          "positivity at lambda = " +
          std::to_string(lambda) + "; use a smaller coupling");
    }
  }
  const auto kraus = inst.evaluate(lambda);
  Mat total = Mat::Zero(inst.dim(), inst.dim());
  for (const auto& outcome_kraus : kraus) {
    for (const Mat& k : outcome_kraus) {
      total += k * s.matrix() * k.adjoint();
    }
  }
  return DensityState(std::move(total));
}

double postselection_shift(const QuantumInstrument& inst,
                           const DensityState& s, const Effect& effect) {
  const Mat drift = drift_operator(inst);
  const double overlap = (effect.matrix() * s.matrix()).trace().real();
  if (overlap <= tol::overlap_floor) {
    throw ZeroOverlap("postselection_shift: tr[effect·state] vanishes");
  }
  const double imag_part =
      (effect.matrix() * drift * s.matrix()).trace().imag();
  return -2.0 * imag_part / overlap;
}

EquivalenceResult observable_equiv(const GeneralizedObservable& a,
                                   const GeneralizedObservable& b,
                                   double eps) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("observable_equiv: dimension mismatch");
  }
  const Mat diff = a.canonical() - b.canonical();
  EquivalenceResult result;
  if (max_abs(diff) <= eps) {
    result.equivalent = true;
    return result;
  }

  const HermitianParts parts = hermitian_split(diff);
  const Eigen::Index d = diff.rows();

  auto finish = [&diff, &result](const Vec& prep, const Vec& post) {
    const PureState s_state = PureState::normalized(prep);
    const PureState e_state = PureState::normalized(post);
    result.witness = std::make_pair(DensityState::pure(s_state),
                                    Effect::pure(e_state));
    result.gap = (e_state.projector() * diff * s_state.projector())
                     .trace()
                     .real();
  };

  if (max_abs(parts.real_part) > eps) {
    // Hermitian branch: project onto the extreme eigenvector.
    Eigen::SelfAdjointEigenSolver<Mat> solver(parts.real_part);
    const RealVec& eigs = solver.eigenvalues();
    const Eigen::Index pick =
        std::abs(eigs(0)) > std::abs(eigs(d - 1)) ? 0 : d - 1;
    const Vec v = solver.eigenvectors().col(pick);
    finish(v, v);
    return result;
  }

  // Anti-Hermitian branch: e^{±iπ/4} superposition of the two most
  // separated eigenvectors.
  Eigen::SelfAdjointEigenSolver<Mat> solver(parts.imag_part);
  const Vec v_low = solver.eigenvectors().col(0);
  const Vec v_high = solver.eigenvectors().col(d - 1);
  const Complex phase = std::polar(1.0, std::numbers::pi / 4.0);
  finish(v_high + phase * v_low, v_high + std::conj(phase) * v_low);
  return result;
}

std::optional<StrongSenseWitness> strong_sense_witness(
    const QuantumInstrument& inst, double threshold) {
  if (!inst.has_series()) {
    throw ModeMismatch("strong_sense_witness: series data required");
  }
  const Eigen::Index d = inst.dim();
  const RealVec p0 = inst.zero_coupling_probs();

  int best_outcome = -1;
  double best_deviation = 0.0;
  std::vector<Mat> deviations;
  deviations.reserve(inst.n_outcomes());
  for (int m = 0; m < inst.n_outcomes(); ++m) {
    Mat dev = inst.averaged_first_order(m);
    dev -= (dev.trace() / static_cast<double>(d)) * Mat::Identity(d, d);
    const double norm = max_abs(dev);
    deviations.push_back(std::move(dev));
    if (norm > best_deviation) {
      best_deviation = norm;
      best_outcome = m;
    }
  }
  if (best_outcome < 0 || best_deviation <= threshold) {
    return std::nullopt;
  }

  // Maximize the orthogonal component of δK̄ψ over a deterministic
  // candidate set.
  const Mat& dev = deviations[best_outcome];
  std::vector<Vec> candidates;
  const HermitianParts parts = hermitian_split(dev);
  for (const Mat& herm : {parts.real_part, parts.imag_part}) {
    Eigen::SelfAdjointEigenSolver<Mat> solver(herm);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = i + 1; j < d; ++j) {
        candidates.push_back(solver.eigenvectors().col(i) +
                             solver.eigenvectors().col(j));
      }
    }
  }
  Eigen::JacobiSVD<Mat> svd(dev, Eigen::ComputeFullV);
  for (Eigen::Index i = 0; i < d; ++i) {
    candidates.push_back(svd.matrixV().col(i));
  }
  Rng rng(0x5eed);
  for (int i = 0; i < 8; ++i) {
    candidates.push_back(haar_random_pure(d, rng).amplitudes());
  }

  double best_norm_sq = -1.0;
  Vec best_vec;
  for (const Vec& raw : candidates) {
    const Vec psi = raw / raw.norm();
    const Vec image = dev * psi;
    const Complex mean = psi.dot(image);
    const double norm_sq = (image - mean * psi).squaredNorm();
    if (norm_sq > best_norm_sq) {
      best_norm_sq = norm_sq;
      best_vec = psi;
    }
  }

  const double p = p0(best_outcome);
  StrongSenseWitness witness{best_outcome, PureState::normalized(best_vec),
                             best_norm_sq / (p * p)};
  if (witness.slope <= threshold) {
    return std::nullopt;
  }
  return witness;
}

}  // namespace weaklab
