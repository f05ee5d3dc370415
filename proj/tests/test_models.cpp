#include <doctest.h>

#include "weaklab/disturbance.hpp"
#include "weaklab/models.hpp"
#include "test_util.hpp"

using namespace weaklab;
using namespace weaklab::testutil;

namespace {

Mat pauli_z() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

PureState angle_state(double theta, double sign) {
  Vec v(2);
  v << std::cos(theta), sign * std::sin(theta);
  return PureState::normalized(v);
}

}  // namespace

TEST_CASE("qubit model construction") {
  Rng rng(5);
  const Mat a = random_complex(3, 3, rng);
  const Mat h = qubit_model_hamiltonian(a);
  CHECK(is_hermitian(h, 1e-12));

  const QuantumInstrument inst = build_qubit_model(a);
  CHECK(inst.mode() == InstrumentMode::Exact);
  CHECK(inst.n_outcomes() == 2);
  CHECK(inst.zero_coupling_probs()(0) == doctest::Approx(0.5));

  SUBCASE("exact Kraus agree with the series at the expected orders") {
    for (int m = 0; m < 2; ++m) {
      const KrausSeries& ks = inst.outcomes()[m].kraus[0];
      auto residual_first = [&](double lambda) {
        return max_abs(ks.exact(lambda) -
                       (ks.k0 * Mat::Identity(3, 3) +
                        lambda * ks.first_order));
      };
      auto residual_second = [&](double lambda) {
        return max_abs(ks.exact(lambda) -
                       (ks.k0 * Mat::Identity(3, 3) + lambda * ks.first_order +
                        0.5 * lambda * lambda * (*ks.second_order)));
      };
      // O(λ²) and O(λ³) truncation errors: factors 4 and 8 under halving.
      const double r1 = residual_first(1e-2) / residual_first(5e-3);
      const double r2 = residual_second(1e-2) / residual_second(5e-3);
      CHECK(r1 > 3.5);
      CHECK(r1 < 4.5);
      CHECK(r2 > 7.0);
      CHECK(r2 < 9.0);
    }
  }

  SUBCASE("sigma_z coupling stays within the absolute residual budget") {
    const QuantumInstrument zmodel = build_qubit_model(pauli_z());
    const double lambda = 1e-2;
    for (int m = 0; m < 2; ++m) {
      const KrausSeries& ks = zmodel.outcomes()[m].kraus[0];
      const Mat truncated =
          ks.k0 * Mat::Identity(2, 2) + lambda * ks.first_order;
      CHECK(max_abs(ks.exact(lambda) - truncated) <= 1e-3 * lambda);
    }
  }

  SUBCASE("exact family is complete at finite lambda") {
    for (double lambda : {0.0, 0.1, 0.4}) {
      Mat total = Mat::Zero(3, 3);
      for (const auto& out : inst.outcomes()) {
        const Mat k = out.kraus[0].exact(lambda);
        total += k.adjoint() * k;
      }
      CHECK(max_abs(total - Mat::Identity(3, 3)) < 1e-12);
    }
  }

  SUBCASE("trivial observable gives a trivial model") {
    const QuantumInstrument trivial = build_qubit_model(Mat::Identity(2, 2));
    CHECK(script_f_value(trivial) < 1e-12);
    CHECK(!strong_sense_witness(trivial).has_value());
  }
}

TEST_CASE("qubit model disturbance identity") {
  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const Mat a = random_complex(2 + trial % 2, 2 + trial % 2, rng);
    const QuantumInstrument inst = build_qubit_model(a);
    const HermitianParts parts = hermitian_split(a);
    const double expected =
        0.25 * (f_functional(parts.real_part) +
                f_functional(parts.imag_part));
    CHECK(script_f_value(inst) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(max_abs(drift_operator(inst)) < 1e-12);
  }
}

TEST_CASE("meter moments on the grid") {
  SUBCASE("plain Gaussian") {
    const VonNeumannModel model(pauli_z(), Mat::Zero(2, 2),
                                MeterSpec{4.0, 0.0, 4096, 0.0});
    CHECK(model.meter_x_mean() == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(model.meter_x_var() == doctest::Approx(16.0).epsilon(1e-8));
    CHECK(std::abs(model.meter_p_mean()) < 1e-12);
    CHECK(model.meter_p_squared() ==
          doctest::Approx(1.0 / 64.0).epsilon(1e-8));
    CHECK(std::abs(model.meter_xp_anticommutator()) < 1e-8);
  }

  SUBCASE("chirped Gaussian matches the closed-form moments") {
    const double sigma = 4.0;
    const double beta = 0.01;
    const VonNeumannModel model(pauli_z(), Mat::Zero(2, 2),
                                MeterSpec{sigma, beta, 4096, 0.0});
    // ⟨{X̂,P̂}⟩ = −4βσ², ⟨P̂²⟩ = 1/(4σ²) + 4β²σ².
    CHECK(model.meter_xp_anticommutator() ==
          doctest::Approx(-4.0 * beta * sigma * sigma).epsilon(1e-8));
    const double sig_sq = sigma * sigma;
    CHECK(model.meter_p_squared() ==
          doctest::Approx(1.0 / (4.0 * sig_sq) + 4.0 * beta * beta * sig_sq)
              .epsilon(1e-8));
    CHECK(model.meter_x_var() == doctest::Approx(sig_sq).epsilon(1e-8));

    // chirp_for_xp inverts the anticommutator relation.
    const double target = -4.0 * beta * sigma * sigma;
    CHECK(chirp_for_xp(target, sigma) == doctest::Approx(beta));
  }

  SUBCASE("too-narrow grids are rejected") {
    CHECK_THROWS_AS(VonNeumannModel(pauli_z(), Mat::Zero(2, 2),
                                    MeterSpec{4.0, 0.0, 4096, 10.0}),
                    GridTooCoarse);
    CHECK_THROWS_AS(VonNeumannModel(pauli_z(), Mat::Zero(2, 2),
                                    MeterSpec{4.0, 0.0, 64, 0.0}),
                    GridTooCoarse);
  }

  SUBCASE("non-Hermitian operators are rejected") {
    Mat bad = Mat::Zero(2, 2);
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(VonNeumannModel(bad, Mat::Zero(2, 2), MeterSpec{}),
                    NonHermitianInput);
  }
}

TEST_CASE("unconditioned meter mean equals the observable expectation") {
  Rng rng(11);
  const Mat o = random_hermitian(2, rng);
  const Mat b = random_hermitian(2, rng);
  for (double sigma : {4.0, 8.0, 16.0}) {
    const VonNeumannModel model(o, b, MeterSpec{sigma, 0.0, 4096, 0.0});
    const DensityState s = random_density(2, rng);
    const double expected = (o * s.matrix()).trace().real();
    CHECK(model.unconditioned_meter_mean(s) ==
          doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("conditioned meter mean converges to the weak value") {
  const Mat o = pauli_z();
  const double theta = 0.5 * std::acos(0.2);  // overlap cos2θ = 0.2
  const DensityState s = DensityState::pure(angle_state(theta, 1.0));
  const Effect effect = Effect::pure(angle_state(theta, -1.0));

  SUBCASE("plain meter recovers the AAV value within the 1/sigma budget") {
    std::vector<double> errors;
    for (double sigma : {4.0, 8.0, 16.0, 32.0}) {
      const VonNeumannModel model(o, Mat::Zero(2, 2),
                                  MeterSpec{sigma, 0.0, 4096, 0.0});
      const double wv = weak_value(model.observable(), s, effect);
      CHECK(wv == doctest::Approx(5.0).epsilon(1e-10));  // 1/0.2
      const double err =
          std::abs(model.conditioned_meter_mean(s, effect) - wv);
      CHECK(err <= 6.0 / sigma);
      errors.push_back(err);
    }
    // Parity of the real configuration cancels the 1/σ coefficient, so the
    // empirical order settles near 2, comfortably inside the O(1/σ) claim.
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
      const double order = std::log2(errors[i] / errors[i + 1]);
      CHECK(order > 1.4);
      CHECK(order < 2.4);
    }
  }

  SUBCASE("generalized model shifts the imaginary part") {
    Rng rng(13);
    const Mat b = random_hermitian(2, rng);
    const double sigma = 16.0;
    const VonNeumannModel model(o, b, MeterSpec{sigma, 0.0, 4096, 0.0});
    // Â′ = Ô + i(B̂ − ⟨{X̂,P̂}⟩Ô) with a real Gaussian meter: ⟨{X̂,P̂}⟩ = 0.
    const Mat expected = o + Complex{0, 1} * b;
    CHECK(max_abs(model.observable().canonical() -
                  GeneralizedObservable(expected).canonical()) < 1e-8);
    const double wv = weak_value(model.observable(), s, effect);
    CHECK(std::abs(model.conditioned_meter_mean(s, effect) - wv) < 12.0 / sigma);
  }
}

TEST_CASE("postselected meter distribution and its expansion") {
  const Mat o = pauli_z();
  const double theta = 0.5 * std::acos(0.25);
  const DensityState s = DensityState::pure(angle_state(theta, 1.0));
  const Effect effect = Effect::pure(angle_state(theta, -1.0));

  SUBCASE("no postselection, no chirp: pure translation at leading order") {
    std::vector<double> ratios;
    for (double sigma : {8.0, 16.0, 32.0}) {
      const VonNeumannModel model(o, Mat::Zero(2, 2),
                                  MeterSpec{sigma, 0.0, 4096, 0.0});
      const auto dist = model.meter_distribution(s, Effect::identity(2));
      CHECK(std::abs(dist.weak_value_o.imag()) < 1e-10);
      const double correction =
          (dist.postselected - dist.initial).cwiseAbs().maxCoeff();
      ratios.push_back(dist.residual.cwiseAbs().maxCoeff() / correction);
    }
    // The translation term dominates; what it misses fades one power of σ
    // faster.
    CHECK(ratios[1] < 0.35);
    CHECK(ratios[2] < 0.2);
    CHECK(ratios[0] / ratios[1] > 1.4);
    CHECK(ratios[1] / ratios[2] > 1.4);
  }

  SUBCASE("residual of the four-term expansion decays like sigma^-3") {
    std::vector<double> residuals;
    for (double sigma : {4.0, 8.0, 16.0, 32.0}) {
      const VonNeumannModel model(o, Mat::Zero(2, 2),
                                  MeterSpec{sigma, 0.0, 4096, 0.0});
      const auto dist = model.meter_distribution(s, effect);
      residuals.push_back(dist.residual.cwiseAbs().maxCoeff());
    }
    for (std::size_t i = 0; i + 1 < residuals.size(); ++i) {
      const double order = std::log2(residuals[i] / residuals[i + 1]);
      CHECK(order > 2.4);
      CHECK(order < 3.6);
    }
  }

  SUBCASE("purely imaginary weak value deforms instead of translating") {
    // Ô = σ_z, ψ = |+⟩, φ = (|0⟩ + i|1⟩)/√2 makes tr[šÔs]/tr[šs] = i. A
    // chirped meter (⟨{X̂,P̂}⟩ = 1) exposes the imaginary part through the
    // anticommutator term; there is no translation to subtract.
    Vec plus(2), phase(2);
    plus << 1, 1;
    phase << 1, Complex{0, 1};
    const DensityState sp = DensityState::pure(PureState::normalized(plus));
    const Effect ep = Effect::pure(PureState::normalized(phase));
    const double sigma = 16.0;
    const VonNeumannModel model(
        o, Mat::Zero(2, 2),
        MeterSpec{sigma, chirp_for_xp(1.0, sigma), 4096, 0.0});
    const auto dist = model.meter_distribution(sp, ep);
    CHECK(std::abs(dist.weak_value_o.real()) < 1e-10);
    CHECK(dist.weak_value_o.imag() == doctest::Approx(1.0));
    // Â′ = Ô − i⟨{X̂,P̂}⟩Ô turns the imaginary part into a mean shift.
    const double wv_prime = weak_value(model.observable(), sp, ep);
    CHECK(wv_prime == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(model.conditioned_meter_mean(sp, ep) - wv_prime) <
          1.0 / sigma);
    // The anticommutator term captures the deformation.
    const double correction =
        (dist.postselected - dist.initial).cwiseAbs().maxCoeff();
    CHECK(correction > 0.0);
    CHECK(dist.residual.cwiseAbs().maxCoeff() < 0.1 * correction);
  }

  SUBCASE("B-coupling term isolated when O vanishes") {
    Rng rng(17);
    const Mat zero = Mat::Zero(2, 2);
    const Mat b = pauli_z();
    Vec plus(2), phase(2);
    plus << 1, 1;
    phase << 1, Complex{0, 1};
    const DensityState sp = DensityState::pure(PureState::normalized(plus));
    const Effect ep = Effect::pure(PureState::normalized(phase));
    const double sigma = 8.0;
    const VonNeumannModel model(zero, b, MeterSpec{sigma, 0.0, 4096, 0.0});
    const auto dist = model.meter_distribution(sp, ep);
    CHECK(std::abs(dist.weak_value_b.imag()) > 0.9);
    // With Ô = 0 the only surviving correction is −Im(wv_B)·σ⁻²·x·P_i.
    RealVec correction =
        dist.postselected - dist.initial;
    RealVec predicted_term =
        -dist.weak_value_b.imag() / (sigma * sigma) *
        (dist.x.array() * dist.initial.array()).matrix();
    CHECK((correction - predicted_term).cwiseAbs().maxCoeff() <
          0.05 * predicted_term.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("system after ignoring the meter") {
  // Non-disturbing in the weak sense iff ⟨P̂⟩ = 0; Gaussian meters satisfy
  // that, so the ignore-channel is the identity at order 1/σ.
  Rng rng(19);
  const Mat o = random_hermitian(2, rng);
  const DensityState s = random_density(2, rng);
  std::vector<double> deviations;
  for (double sigma : {8.0, 16.0, 32.0}) {
    const VonNeumannModel model(o, Mat::Zero(2, 2),
                                MeterSpec{sigma, 0.0, 4096, 0.0});
    deviations.push_back(
        max_abs(model.system_after_ignore(s).matrix() - s.matrix()));
  }
  // Decay at least like σ⁻²: the first-order term vanishes with ⟨P̂⟩ = 0.
  for (std::size_t i = 0; i + 1 < deviations.size(); ++i) {
    const double order = std::log2(deviations[i] / deviations[i + 1]);
    CHECK(order > 1.6);
  }
}

TEST_CASE("general bilinear weak values") {
  Rng rng(23);

  SUBCASE("single identity term") {
    NullWeakModel model;
    model.terms.push_back({Mat::Identity(3, 3), +1});
    const DensityState s = random_density(3, rng);
    const Effect e = random_effect(3, rng);
    CHECK(general_bilinear_weak_value(model, s, e) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("polarization identity is exact") {
    for (int trial = 0; trial < 10; ++trial) {
      const Mat a = random_complex(3, 3, rng);
      const Mat b = random_complex(3, 3, rng);
      const DensityState s = random_density(3, rng);
      const Effect e = random_effect(3, rng);
      const double direct =
          (e.matrix() * a * s.matrix() * b).trace().real() /
          (e.matrix() * s.matrix()).trace().real();
      const NullWeakModel split = polarization_split(a, b);
      CHECK(general_bilinear_weak_value(split, s, e) ==
            doctest::Approx(direct).epsilon(1e-12));
    }
  }

  SUBCASE("polarization against the identity recovers the weak value") {
    const Mat a = random_complex(3, 3, rng);
    const DensityState s = random_density(3, rng);
    const Effect e = random_effect(3, rng);
    const NullWeakModel split = polarization_split(a, Mat::Identity(3, 3));
    CHECK(general_bilinear_weak_value(split, s, e) ==
          doctest::Approx(weak_value(GeneralizedObservable(a), s, e))
              .epsilon(1e-12));
  }

  SUBCASE("null weak value of sigma_z") {
    Vec zero(2);
    zero << 1, 0;
    const DensityState s = DensityState::pure(PureState(zero));
    const Effect half(0.5 * Mat::Identity(2, 2));
    const NullWeakModel model = null_weak_model(pauli_z());
    // tr[Ô s]/tr[š s] = 1/(1/2) = 2 for the unit-trace effect š = 𝟙/2.
    CHECK(general_bilinear_weak_value(model, s, half) ==
          doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("classical embedding") {
  Rng rng(29);

  SUBCASE("diagonal weak matrices reduce to the diagonal formula") {
    RealMat a = RealMat::Zero(2, 2);
    a(0, 0) = 0.7;
    a(1, 1) = -0.2;
    RealVec pv(2), qv(2);
    pv << 0.4, 0.6;
    qv << 0.9, 0.5;
    const double expected =
        (qv(0) * 0.7 * pv(0) + qv(1) * (-0.2) * pv(1)) / qv.dot(pv);
    CHECK(classical_embedding_weak_value(a, OnticDistribution(pv),
                                         PostselectionWeights(qv)) ==
          doctest::Approx(expected).epsilon(1e-12));
  }

  SUBCASE("random matrices agree with the classical module") {
    for (int trial = 0; trial < 10; ++trial) {
      const int n = 3;
      RealMat a(n, n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          a(i, j) = rng.uniform(-1.0, 1.0);
        }
      }
      RealVec pv(n), qv(n);
      for (int j = 0; j < n; ++j) {
        pv(j) = rng.uniform(0.01, 1.0);
        qv(j) = rng.uniform(0.01, 1.0);
      }
      pv /= pv.sum();
      const OnticDistribution p(pv);
      const PostselectionWeights q(qv);
      CHECK(classical_embedding_weak_value(a, p, q) ==
            doctest::Approx(classical_weak_value(a, p, q)).epsilon(1e-12));
    }
  }

  SUBCASE("anomalous embedded value") {
    RealMat a = RealMat::Zero(2, 2);
    a(0, 1) = 1.0;
    RealVec pv(2), qv(2);
    pv << 0.0, 1.0;
    const double eps = 1e-3;
    qv << 1.0, eps;
    CHECK(classical_embedding_weak_value(a, OnticDistribution(pv),
                                         PostselectionWeights(qv)) ==
          doctest::Approx(1.0 / eps).epsilon(1e-12));
  }
}

TEST_CASE("zero couplings leave the joint state a product") {
  const Mat zero = Mat::Zero(2, 2);
  const VonNeumannModel model(zero, zero, MeterSpec{4.0, 0.0, 1024, 0.0});
  Vec amps(2);
  amps << std::cos(0.3), std::sin(0.3);
  const PureState system = PureState::normalized(amps);
  const Mat joint = model.joint_evolve(system);
  const Mat expected =
      system.amplitudes() * model.meter_wavefunction().transpose();
  CHECK(max_abs(joint - expected) < 1e-12);
}
