#pragma once

#include <optional>

#include "weaklab/instrument.hpp"
#include "weaklab/models.hpp"
#include "weaklab/random.hpp"

namespace weaklab {

/// F^λ(ψ) = tr[M_?^λ(|ψ⟩⟨ψ|)·|ψ⟩⟨ψ|], the probability that the measurement
/// did not kick the system out of its initial pure state.
double survival_probability(const QuantumInstrument& inst, const PureState& psi,
                            double lambda);

/// λ² coefficient of 1 − F^λ(ψ):
/// Σ_{m,n}(⟨ψ|δK̂†δK̂|ψ⟩ − |⟨ψ|δK̂|ψ⟩|²).
double survival_second_order_coefficient(const QuantumInstrument& inst,
                                         const PureState& psi);

struct DisturbanceReport {
  double f_script = 0.0;            // Σ(d·tr[δK̂†δK̂] − |tr δK̂|²)
  double f_script_split = 0.0;      // Σ f(δK̂^R) + f(δK̂^I)
  double f_script_mc = 0.0;         // d(d+1)·Haar mean of the λ² coefficient
  double mc_std_error = 0.0;        // standard error of f_script_mc
  int mc_samples = 0;
  std::uint64_t mc_seed = 0;
};

/// The disturbance functional computed three ways (closed form, the
/// Hermitian/anti-Hermitian split, seeded Haar Monte Carlo).
DisturbanceReport script_f(const QuantumInstrument& inst, std::uint64_t seed,
                           int samples = 200000);

/// Closed form only.
double script_f_value(const QuantumInstrument& inst);

/// Reductions that never increase the disturbance and keep Â^R:
/// one Kraus operator per outcome (merged along δK̄_m), anti-Hermitian parts
/// dropped, per-outcome traces redistributed minimally over the outcomes so
/// the full Â^R (trace included) is preserved; the output is traceless
/// whenever tr[Â^R] = 0.
QuantumInstrument canonicalize(const QuantumInstrument& inst);

/// The same reductions applied one at a time (merge, drop anti-Hermitian
/// parts, redistribute traces), so each pass can be checked on its own.
std::vector<QuantumInstrument> canonicalize_passes(
    const QuantumInstrument& inst);

struct MinimizationProblem {
  Eigen::Index dim = 2;
  int n_outcomes = 2;
  Mat target;                              // Ô, Hermitian
  std::optional<RealVec> fixed_values;     // A_m fixed …
  std::optional<RealVec> value_box_low;    // … or box bounds
  std::optional<RealVec> value_box_high;
  bool optimize_weights = false;  // optimize P⁰_m instead of the centered
                                  // near-uniform default
  int multi_starts = 8;
  int max_iterations = 500;
  std::uint64_t seed = 1;
};

struct MinimizationResult {
  QuantumInstrument instrument;
  double f_script = 0.0;
  double certificate_gap = 0.0;  // ‖canon(Â) − canon(Ô)‖_max
  RealVec values;                // chosen A_m
  RealVec weights;               // chosen P⁰_m
  int iterations = 0;
};

/// Projected gradient descent over one Hermitian δK̂ per outcome under the
/// affine constraint Â^R = Ô, with multi-start; box-bounded contextual
/// values are searched on the box boundary. Throws InfeasibleProblem.
MinimizationResult minimize_disturbance(const MinimizationProblem& prob);

struct VonNeumannBoundCheck {
  double f_script = 0.0;            // model value of 𝓕
  double intermediate_bound = 0.0;  // (σ²σ_p² − ¼⟨{X̂,P̂}⟩²)·f(Ô)
  double aav_bound = 0.0;           // f(Ô)/4
  double margin_intermediate = 0.0;
  double margin_aav = 0.0;
  bool saturated = false;  // 𝓕 = f(Ô)/4 within tolerance
};

/// Checks 𝓕 ≥ (σ²σ_p² − ¼⟨{X̂,P̂}⟩²)f(Ô) ≥ f(Ô)/4 on the grid moments.
VonNeumannBoundCheck von_neumann_bound_check(const VonNeumannModel& model,
                                             double saturation_tol = 1e-6);

}  // namespace weaklab
