#include "weaklab/disturbance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace weaklab {

double survival_probability(const QuantumInstrument& inst, const PureState& psi,
                            double lambda) {
  if (psi.dim() != inst.dim()) {
    throw DimensionMismatch("survival_probability: dimension mismatch");
  }
  const auto kraus = inst.evaluate(lambda);
  double acc = 0.0;
  for (const auto& outcome_kraus : kraus) {
    for (const Mat& k : outcome_kraus) {
      acc += std::norm((psi.amplitudes().adjoint() * k * psi.amplitudes())(0));
    }
  }
  return acc;
}

double survival_second_order_coefficient(const QuantumInstrument& inst,
                                         const PureState& psi) {
  if (!inst.has_series()) {
    throw ModeMismatch("survival_second_order_coefficient: series required");
  }
  const Vec& v = psi.amplitudes();
  double acc = 0.0;
  for (const auto& out : inst.outcomes()) {
    for (const KrausSeries& ks : out.kraus) {
      const Vec image = ks.first_order * v;
      acc += image.squaredNorm() - std::norm(v.dot(image));
    }
  }
  return acc;
}

double script_f_value(const QuantumInstrument& inst) {
  if (!inst.has_series()) {
    throw ModeMismatch("script_f_value: series required");
  }
  const double d = static_cast<double>(inst.dim());
  double acc = 0.0;
  for (const auto& out : inst.outcomes()) {
    for (const KrausSeries& ks : out.kraus) {
      acc += d * (ks.first_order.adjoint() * ks.first_order).trace().real() -
             std::norm(ks.first_order.trace());
    }
  }
  return acc;
}

DisturbanceReport script_f(const QuantumInstrument& inst, std::uint64_t seed,
                           int samples) {
  DisturbanceReport report;
  report.f_script = script_f_value(inst);

  for (const auto& out : inst.outcomes()) {
    for (const KrausSeries& ks : out.kraus) {
      const HermitianParts parts = hermitian_split(ks.first_order);
      report.f_script_split +=
          f_functional(parts.real_part) + f_functional(parts.imag_part);
    }
  }

  const double d = static_cast<double>(inst.dim());
  const double factor = d * (d + 1.0);
  Rng rng(seed);
  double mean = 0.0;
  double m2 = 0.0;
  for (int i = 0; i < samples; ++i) {
    const PureState psi = haar_random_pure(inst.dim(), rng);
    const double value = survival_second_order_coefficient(inst, psi);
    const double delta = value - mean;
    mean += delta / (i + 1);
    m2 += delta * (value - mean);
  }
  const double variance = samples > 1 ? m2 / (samples - 1) : 0.0;
  report.f_script_mc = factor * mean;
  report.mc_std_error = factor * std::sqrt(variance / samples);
  report.mc_samples = samples;
  report.mc_seed = seed;
  return report;
}

namespace {

QuantumInstrument rebuild(const QuantumInstrument& reference,
                          std::vector<InstrumentOutcome> outcomes) {
  // Restore pre-centering values so the constructor records the same shift.
  for (auto& out : outcomes) {
    out.value += reference.contextual_shift();
  }
  return QuantumInstrument(reference.dim(), InstrumentMode::Series,
                           std::move(outcomes), reference.lambda_max());
}

QuantumInstrument merge_kraus(const QuantumInstrument& inst) {
  std::vector<InstrumentOutcome> outcomes;
  const RealVec p0 = inst.zero_coupling_probs();
  for (int m = 0; m < inst.n_outcomes(); ++m) {
    KrausSeries ks;
    ks.k0 = std::sqrt(p0(m));
    ks.first_order = ks.k0 > 0.0
                         ? Mat(inst.averaged_first_order(m) / ks.k0)
                         : Mat::Zero(inst.dim(), inst.dim());
    InstrumentOutcome out;
    out.value = inst.contextual_value(m);
    out.kraus.push_back(std::move(ks));
    outcomes.push_back(std::move(out));
  }
  return rebuild(inst, std::move(outcomes));
}

QuantumInstrument drop_antihermitian(const QuantumInstrument& inst) {
  std::vector<InstrumentOutcome> outcomes = inst.outcomes();
  for (auto& out : outcomes) {
    for (auto& ks : out.kraus) {
      ks.first_order = hermitian_split(ks.first_order).real_part;
      ks.second_order.reset();
      ks.exact = nullptr;
    }
  }
  return rebuild(inst, std::move(outcomes));
}

QuantumInstrument redistribute_traces(const QuantumInstrument& inst) {
  // δK̂_m → δK̂_m − (tr δK̂_m/d)𝟙 + c_m𝟙 with the least-norm c keeping
  // tr[Â^R] and first-order completeness; leaves 𝓕 untouched. Runs after
  // the merge pass, so each outcome holds one Kraus operator.
  const Eigen::Index d = inst.dim();
  const int n = inst.n_outcomes();
  RealVec w(n), u(n);
  double target = 0.0;  // tr[Â^R]/2 = Σ_m A_m K0_m tr[δK̂_m]
  std::vector<InstrumentOutcome> outcomes = inst.outcomes();
  for (int m = 0; m < n; ++m) {
    if (outcomes[m].kraus.size() != 1) {
      throw ModeMismatch("redistribute_traces: expects merged instruments");
    }
    const KrausSeries& ks = outcomes[m].kraus.front();
    u(m) = ks.k0;
    w(m) = inst.contextual_value(m) * ks.k0;
    target += w(m) * ks.first_order.trace().real();
  }
  // Least-norm c with Σ w_m c_m = target/d and Σ u_m c_m = 0 (completeness);
  // w ⊥ u by the centering constraint, roundoff cleaned by re-projection.
  RealVec c = RealVec::Zero(n);
  const double w_sq = w.squaredNorm();
  const double u_sq = u.squaredNorm();
  if (w_sq > 0.0) {
    c = (target / static_cast<double>(d)) / w_sq * w;
    if (u_sq > 0.0) {
      c -= u * (u.dot(c) / u_sq);
      c += w * ((target / static_cast<double>(d) - w.dot(c)) / w_sq);
    }
  }
  const Mat eye = Mat::Identity(d, d);
  for (int m = 0; m < n; ++m) {
    KrausSeries& ks = outcomes[m].kraus.front();
    const Complex tr = ks.first_order.trace();
    ks.first_order +=
        (Complex{c(m), 0.0} - tr / static_cast<double>(d)) * eye;
  }
  return rebuild(inst, std::move(outcomes));
}

}  // namespace

std::vector<QuantumInstrument> canonicalize_passes(
    const QuantumInstrument& inst) {
  if (!inst.has_series()) {
    throw ModeMismatch("canonicalize: series required");
  }
  std::vector<QuantumInstrument> passes;
  passes.push_back(merge_kraus(inst));
  passes.push_back(drop_antihermitian(passes.back()));
  passes.push_back(redistribute_traces(passes.back()));
  return passes;
}

QuantumInstrument canonicalize(const QuantumInstrument& inst) {
  return canonicalize_passes(inst).back();
}

namespace {

// Orthonormal traceless Hermitian basis (generalized Gell-Mann matrices).
std::vector<Mat> traceless_hermitian_basis(Eigen::Index d) {
  std::vector<Mat> basis;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      Mat sym = Mat::Zero(d, d);
      sym(i, j) = inv_sqrt2;
      sym(j, i) = inv_sqrt2;
      basis.push_back(sym);
      Mat asym = Mat::Zero(d, d);
      asym(i, j) = Complex{0.0, -inv_sqrt2};
      asym(j, i) = Complex{0.0, inv_sqrt2};
      basis.push_back(asym);
    }
  }
  for (Eigen::Index l = 1; l < d; ++l) {
    Mat diag = Mat::Zero(d, d);
    const double norm = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
    for (Eigen::Index k = 0; k < l; ++k) {
      diag(k, k) = norm;
    }
    diag(l, l) = -static_cast<double>(l) * norm;
    basis.push_back(diag);
  }
  return basis;
}

// Weights P⁰ with Σ P = 1, Σ A·P = 0, P ≥ floor, close to uniform
// (active-set least squares).
std::optional<RealVec> centered_weights(const RealVec& values, double floor) {
  const int n = static_cast<int>(values.size());
  std::vector<bool> clamped(n, false);
  for (int round = 0; round <= n; ++round) {
    double free_count = 0.0;
    double clamped_sum = 0.0;
    double clamped_value_sum = 0.0;
    for (int m = 0; m < n; ++m) {
      if (clamped[m]) {
        clamped_sum += floor;
        clamped_value_sum += values(m) * floor;
      } else {
        free_count += 1.0;
      }
    }
    if (free_count == 0.0) {
      return std::nullopt;
    }
    // Minimize Σ(P−1/n)² over the free coordinates under the two equalities:
    // P = base + α + β·A on the free set.
    double sum_a = 0.0;
    double sum_a2 = 0.0;
    for (int m = 0; m < n; ++m) {
      if (!clamped[m]) {
        sum_a += values(m);
        sum_a2 += values(m) * values(m);
      }
    }
    const double base = 1.0 / n;
    const double rhs1 = (1.0 - clamped_sum) - base * free_count;
    const double rhs2 = -clamped_value_sum - base * sum_a;
    const double det = free_count * sum_a2 - sum_a * sum_a;
    double alpha = 0.0;
    double beta = 0.0;
    if (std::abs(det) > 1e-14) {
      alpha = (rhs1 * sum_a2 - rhs2 * sum_a) / det;
      beta = (free_count * rhs2 - sum_a * rhs1) / det;
    } else if (std::abs(sum_a) < 1e-14 && std::abs(rhs2) < 1e-14 &&
               free_count > 0.0) {
      alpha = rhs1 / free_count;
    } else {
      return std::nullopt;
    }
    RealVec p(n);
    bool ok = true;
    for (int m = 0; m < n; ++m) {
      p(m) = clamped[m] ? floor : base + alpha + beta * values(m);
      if (!clamped[m] && p(m) < floor - 1e-12) {
        clamped[m] = true;
        ok = false;
      }
    }
    if (ok) {
      if (std::abs(p.sum() - 1.0) > 1e-9 ||
          std::abs(p.dot(values)) > 1e-9) {
        return std::nullopt;
      }
      return p;
    }
  }
  return std::nullopt;
}

// Maximize Σ A²·P under the same constraints; optimum sits on a vertex
// supported by one positive and one negative value.
std::optional<RealVec> max_variance_weights(const RealVec& values,
                                            double floor) {
  const int n = static_cast<int>(values.size());
  std::optional<RealVec> best;
  double best_v = -1.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || values(i) <= 0.0 || values(j) >= 0.0) {
        continue;
      }
      double others = 0.0;
      double others_val = 0.0;
      for (int m = 0; m < n; ++m) {
        if (m != i && m != j) {
          others += floor;
          others_val += values(m) * floor;
        }
      }
      // P_i + P_j = 1 − others,  A_i P_i + A_j P_j = −others_val.
      const double det = values(i) - values(j);
      const double budget = 1.0 - others;
      const double pi = (-others_val - values(j) * budget) / det;
      const double pj = budget - pi;
      if (pi < floor - 1e-12 || pj < floor - 1e-12) {
        continue;
      }
      RealVec p = RealVec::Constant(n, floor);
      p(i) = pi;
      p(j) = pj;
      const double v = p.dot(values.cwiseProduct(values));
      if (v > best_v) {
        best_v = v;
        best = p;
      }
    }
  }
  return best;
}

struct InnerSolution {
  std::vector<Mat> delta_k;  // Hermitian, one per outcome
  double f_script = 0.0;
  int iterations = 0;
};

// Projected gradient descent on 𝓕 = d·Σ‖θ_m‖² over the affine set
// {2Σ w_m θ_m = o, Σ u_m θ_m = 0} (per basis component; w ⊥ u by centering).
InnerSolution solve_inner(const Mat& target, const RealVec& w, const RealVec& u,
                          Eigen::Index d, int starts, int max_iterations,
                          Rng& rng) {
  const std::vector<Mat> basis = traceless_hermitian_basis(d);
  const int n_basis = static_cast<int>(basis.size());
  const int n = static_cast<int>(w.size());
  const double w_sq = w.squaredNorm();
  const double u_sq = u.squaredNorm();
  if (w_sq <= 0.0) {
    throw InfeasibleProblem(
        "minimize_disturbance: all contextual weights vanish");
  }

  RealVec o(n_basis);
  for (int a = 0; a < n_basis; ++a) {
    o(a) = (basis[a] * target).trace().real();
  }

  auto project = [&](RealMat& theta) {
    for (int a = 0; a < n_basis; ++a) {
      RealVec col = theta.col(a);
      col += w * ((o(a) / 2.0 - w.dot(col)) / w_sq);
      if (u_sq > 0.0) {
        col -= u * (u.dot(col) / u_sq);
        // Re-impose the first constraint exactly (w ⊥ u keeps it, this is
        // just roundoff control).
        col += w * ((o(a) / 2.0 - w.dot(col)) / w_sq);
      }
      theta.col(a) = col;
    }
  };

  InnerSolution best;
  double best_f = std::numeric_limits<double>::infinity();
  for (int s = 0; s < starts; ++s) {
    RealMat theta = RealMat::Zero(n, n_basis);
    if (s > 0) {
      for (int m = 0; m < n; ++m) {
        for (int a = 0; a < n_basis; ++a) {
          theta(m, a) = rng.gaussian();
        }
      }
    }
    project(theta);
    const double dd = static_cast<double>(d);
    double step = 1.0 / (4.0 * dd);
    double f_prev = dd * theta.squaredNorm();
    int it = 0;
    for (; it < max_iterations; ++it) {
      RealMat next = theta - step * (2.0 * dd) * theta;
      project(next);
      const double f_next = dd * next.squaredNorm();
      if (f_next > f_prev + 1e-15) {
        step *= 0.5;
        if (step < 1e-12) {
          break;
        }
        continue;
      }
      const double delta = (next - theta).norm();
      theta = next;
      f_prev = f_next;
      if (delta < 1e-13) {
        break;
      }
    }
    if (f_prev < best_f) {
      best_f = f_prev;
      best.delta_k.assign(n, Mat::Zero(d, d));
      for (int m = 0; m < n; ++m) {
        Mat acc = Mat::Zero(d, d);
        for (int a = 0; a < n_basis; ++a) {
          acc += theta(m, a) * basis[a];
        }
        best.delta_k[m] = acc;
      }
      best.f_script = f_prev;
      best.iterations = it;
    }
  }
  return best;
}

}  // namespace

MinimizationResult minimize_disturbance(const MinimizationProblem& prob) {
  if (prob.target.rows() != prob.dim || prob.target.cols() != prob.dim) {
    throw DimensionMismatch("minimize_disturbance: target dimension mismatch");
  }
  if (!is_hermitian(prob.target)) {
    throw NonHermitianInput("minimize_disturbance: target must be Hermitian");
  }
  if (prob.n_outcomes < 2) {
    throw InfeasibleProblem("minimize_disturbance: at least two outcomes");
  }

  // Candidate contextual-value assignments.
  std::vector<RealVec> candidates;
  if (prob.fixed_values) {
    if (prob.fixed_values->size() != prob.n_outcomes) {
      throw DimensionMismatch("minimize_disturbance: values size mismatch");
    }
    candidates.push_back(*prob.fixed_values);
  } else if (prob.value_box_low && prob.value_box_high) {
    if (prob.value_box_low->size() != prob.n_outcomes ||
        prob.value_box_high->size() != prob.n_outcomes) {
      throw DimensionMismatch("minimize_disturbance: box size mismatch");
    }
    if (prob.n_outcomes > 12) {
      throw InfeasibleProblem(
          "minimize_disturbance: box search limited to 12 outcomes");
    }
    // |A_m| grows 𝓕⁻¹, so optima sit on the box boundary; search corners.
    const int corners = 1 << prob.n_outcomes;
    for (int mask = 0; mask < corners; ++mask) {
      RealVec v(prob.n_outcomes);
      for (int m = 0; m < prob.n_outcomes; ++m) {
        v(m) = (mask >> m) & 1 ? (*prob.value_box_high)(m)
                               : (*prob.value_box_low)(m);
      }
      candidates.push_back(std::move(v));
    }
  } else {
    throw InfeasibleProblem(
        "minimize_disturbance: no contextual-value constraint given");
  }

  const double floor = 1e-3;
  const bool trivial_target =
      max_abs(prob.target - (prob.target.trace() / static_cast<double>(
                                 prob.dim)) *
                                Mat::Identity(prob.dim, prob.dim)) <= 1e-14;

  Rng rng(prob.seed);
  std::optional<MinimizationResult> best;
  for (const RealVec& values : candidates) {
    std::optional<RealVec> weights =
        prob.optimize_weights ? max_variance_weights(values, floor)
                              : centered_weights(values, floor);
    if (!weights) {
      continue;
    }
    RealVec w(prob.n_outcomes), u(prob.n_outcomes);
    for (int m = 0; m < prob.n_outcomes; ++m) {
      u(m) = std::sqrt((*weights)(m));
      w(m) = values(m) * u(m);
    }
    if (w.squaredNorm() <= 0.0 && !trivial_target) {
      continue;
    }

    InnerSolution inner;
    if (trivial_target && w.squaredNorm() <= 0.0) {
      inner.delta_k.assign(prob.n_outcomes, Mat::Zero(prob.dim, prob.dim));
    } else {
      inner = solve_inner(prob.target, w, u, prob.dim, prob.multi_starts,
                          prob.max_iterations, rng);
    }

    // Trace component: least-norm c with 2Σ w_m c_m = tr[Ô]/d, Σ u_m c_m = 0.
    const double trace_target =
        prob.target.trace().real() / static_cast<double>(prob.dim);
    RealVec c = RealVec::Zero(prob.n_outcomes);
    if (w.squaredNorm() > 0.0) {
      c = w * (trace_target / (2.0 * w.squaredNorm()));
      if (u.squaredNorm() > 0.0) {
        c -= u * (u.dot(c) / u.squaredNorm());
        c += w * ((trace_target / 2.0 - w.dot(c)) / w.squaredNorm());
      }
    } else if (std::abs(trace_target) > 1e-12) {
      continue;
    }

    std::vector<InstrumentOutcome> outcomes(prob.n_outcomes);
    for (int m = 0; m < prob.n_outcomes; ++m) {
      KrausSeries ks;
      ks.k0 = u(m);
      ks.first_order =
          inner.delta_k[m] + c(m) * Mat::Identity(prob.dim, prob.dim);
      outcomes[m].value = values(m);
      outcomes[m].kraus.push_back(std::move(ks));
    }
    QuantumInstrument inst(prob.dim, InstrumentMode::Series,
                           std::move(outcomes));
    const double f = script_f_value(inst);
    if (!best || f < best->f_script) {
      const GeneralizedObservable a_hat =
          extract_generalized_observable(inst).observable;
      const GeneralizedObservable target_obs(prob.target);
      MinimizationResult result{std::move(inst),
                                f,
                                max_abs(a_hat.canonical() -
                                        target_obs.canonical()),
                                values,
                                *weights,
                                inner.iterations};
      best = std::move(result);
    }
  }
  if (!best) {
    throw InfeasibleProblem(
        "minimize_disturbance: no centered weight assignment exists for the "
        "given contextual values");
  }
  return std::move(*best);
}

VonNeumannBoundCheck von_neumann_bound_check(const VonNeumannModel& model,
                                             double saturation_tol) {
  VonNeumannBoundCheck check;
  check.f_script = model.script_f();
  const double sig_sq = model.sigma() * model.sigma();
  const double p_var = model.meter_p_squared() -
                       model.meter_p_mean() * model.meter_p_mean();
  const double xp = model.meter_xp_anticommutator();
  const double f_o = f_functional(model.o_hat());
  check.intermediate_bound = (sig_sq * p_var - 0.25 * xp * xp) * f_o;
  check.aav_bound = 0.25 * f_o;
  check.margin_intermediate = check.f_script - check.intermediate_bound;
  check.margin_aav = check.intermediate_bound - check.aav_bound;
  check.saturated = std::abs(check.f_script - check.aav_bound) <=
                    saturation_tol * std::max(1.0, check.aav_bound);
  return check;
}

}  // namespace weaklab
