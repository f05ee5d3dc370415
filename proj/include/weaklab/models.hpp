#pragma once

#include <vector>

#include "weaklab/classical.hpp"
#include "weaklab/instrument.hpp"

namespace weaklab {

/// Interaction generator of the qubit-coupling model on system ⊗ qubit,
///   2Ĥ = iÂ^R⊗|−⟩⟨+| − iÂ^R⊗|+⟩⟨−| + Â^I⊗|+⟩⟨+| − Â^I⊗|−⟩⟨−|.
Mat qubit_model_hamiltonian(const Mat& a_hat);

/// Two-outcome instrument K_±^λ = (1/√2)·tr_aux[e^{iλĤ}(|+⟩+|−⟩)⟨±|],
/// A_± = ±1. Carries the exact unitary evaluator and the series
/// K0 = 1/√2, δK̂_± = ±Â/(2√2) with the exact second-order term.
QuantumInstrument build_qubit_model(const Mat& a_hat);

/// Pointer state family ψ(x) ∝ exp(−(1/(4σ²) + iβ)x²) sampled on a uniform
/// grid over [−L, L]. With β = 0 this is the plain Gaussian meter.
struct MeterSpec {
  double sigma = 1.0;
  double chirp = 0.0;  // β
  int points = 4096;
  // Defaults to 8σ + 2·max|eig Ô| when unset (0).
  double half_width = 0.0;
};

/// The chirp that realizes a target ⟨{X̂,P̂}⟩ at a given width.
double chirp_for_xp(double target_xp, double sigma);

/// Pointer-based measurement Û^σ = e^{i(σ^{−2}/2)B̂X̂}·e^{−iÔP̂} applied
/// exactly on the grid: spectral translation of the meter per eigenvalue of
/// Ô, then the X̂-diagonal phase per eigenvector of B̂.
class VonNeumannModel {
 public:
  VonNeumannModel(Mat o_hat, Mat b_hat, MeterSpec meter);

  Eigen::Index dim() const { return o_hat_.rows(); }
  const Mat& o_hat() const { return o_hat_; }
  const Mat& b_hat() const { return b_hat_; }
  double sigma() const { return spec_.sigma; }

  const RealVec& grid() const { return grid_; }
  double grid_step() const { return dx_; }
  const Vec& meter_wavefunction() const { return meter_; }

  // Grid moments of the initial meter state.
  double meter_x_mean() const { return x_mean_; }
  double meter_x_var() const { return x_var_; }
  double meter_p_mean() const { return p_mean_; }
  double meter_p_squared() const { return p_sq_; }
  double meter_xp_anticommutator() const { return xp_sym_; }

  /// Joint amplitudes after the interaction; row = system index, column =
  /// grid point. Throws GridTooCoarse when edge amplitudes show aliasing.
  Mat joint_evolve(const PureState& system) const;

  /// ⟨X̂⟩ after the interaction, no postselection; equals ⟨Ô⟩_s.
  double unconditioned_meter_mean(const DensityState& s) const;

  /// ⟨X̂⟩ after the interaction conditioned on the system postselection.
  double conditioned_meter_mean(const DensityState& s,
                                const Effect& effect) const;

  /// Â′ = Ô + i(B̂ − ⟨{X̂,P̂}⟩·Ô) from the grid moments.
  GeneralizedObservable observable() const;

  struct MeterDistribution {
    RealVec x;
    RealVec initial;       // P_i
    RealVec postselected;  // P_f
    RealVec predicted;     // four-term expansion
    RealVec residual;      // P_f − predicted
    Complex weak_value_o;
    Complex weak_value_b;
  };
  MeterDistribution meter_distribution(const DensityState& s,
                                       const Effect& effect) const;

  /// System state with the meter traced out (for survival probabilities).
  DensityState system_after_ignore(const DensityState& s) const;

  /// Haar-averaged survival probability on the grid (closed-form second
  /// moment, no sampling).
  double haar_mean_survival() const;

  /// σ²⟨P̂²⟩f(Ô) + ¼f(B̂) − ½⟨{X̂,P̂}⟩·(d·tr[ÔB̂] − tr[Ô]tr[B̂]).
  double script_f() const;

 private:
  Vec translated_meter(double shift) const;
  Vec momentum_apply(const Vec& wave) const;
  void check_edges(const Mat& joint) const;

  Mat o_hat_;
  Mat b_hat_;
  MeterSpec spec_;
  double half_width_;
  double dx_;
  RealVec grid_;
  Vec meter_;
  RealVec o_eigs_;
  Mat o_vecs_;
  RealVec b_eigs_;
  Mat b_vecs_;
  double x_mean_ = 0.0, x_var_ = 0.0, p_mean_ = 0.0, p_sq_ = 0.0,
         xp_sym_ = 0.0;
};

/// One term of the general bilinear weak-value family
/// Σ_j ε_j·tr[š Â_j s Â_j†]/tr[š s].
struct BilinearTerm {
  Mat op;
  int sign = 1;  // ε_j = ±1
};

struct NullWeakModel {
  std::vector<BilinearTerm> terms;
};

double general_bilinear_weak_value(const NullWeakModel& model,
                                   const DensityState& s,
                                   const Effect& effect);

/// Re tr[š Â s B̂] written as a ±1 pair of bilinear terms,
///   ¼(tr[š(Â+B̂†)s(Â+B̂†)†] − tr[š(Â−B̂†)s(Â−B̂†)†]).
NullWeakModel polarization_split(const Mat& a, const Mat& b);

/// Bilinear family whose numerator is tr[Ô s]·tr[š]; for unit-trace
/// postselections the value reduces to tr[Ô s]/tr[š s].
NullWeakModel null_weak_model(const Mat& o_hermitian);

/// √λ-Kraus embedding of a classical weak matrix: directions
/// √|Ã_kj|·|k⟩⟨j| routed to outcome sgn(Ã_kj), A_± = ±1.
QuantumInstrument classical_embedding_instrument(const RealMat& a_tilde);

/// Weak value of the embedding on diagonal s = diag(p), š = diag(q);
/// equals the classical formula.
double classical_embedding_weak_value(const RealMat& a_tilde,
                                      const OnticDistribution& p,
                                      const PostselectionWeights& q);

}  // namespace weaklab
