#include <doctest.h>

#include "weaklab/classical.hpp"
#include "weaklab/random.hpp"

using namespace weaklab;

namespace {

RealMat diag2(double a, double b) {
  RealMat m = RealMat::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

OnticDistribution dist(std::initializer_list<double> p) {
  RealVec v(static_cast<Eigen::Index>(p.size()));
  Eigen::Index i = 0;
  for (double x : p) {
    v(i++) = x;
  }
  return OnticDistribution(v);
}

PostselectionWeights weights(std::initializer_list<double> q) {
  RealVec v(static_cast<Eigen::Index>(q.size()));
  Eigen::Index i = 0;
  for (double x : q) {
    v(i++) = x;
  }
  return PostselectionWeights(v);
}

RealMat random_weak_matrix(int n, Rng& rng) {
  RealMat m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      m(i, j) = rng.uniform(-1.0, 1.0);
    }
  }
  return m;
}

}  // namespace

TEST_CASE("classical weak value closed form") {
  CHECK(classical_weak_value(diag2(1.0, -1.0), dist({0.5, 0.5}),
                             weights({0.9, 0.1})) == doctest::Approx(0.8));

  // Deterministic preparation picks out the diagonal entry.
  RealMat a = diag2(0.7, -0.3);
  CHECK(classical_weak_value(a, dist({1.0, 0.0}), weights({0.5, 0.8})) ==
        doctest::Approx(0.7));

  // Anomalous value from an off-diagonal weak matrix.
  RealMat offdiag = RealMat::Zero(2, 2);
  offdiag(0, 1) = 1.0;
  const double eps = 1e-3;
  CHECK(classical_weak_value(offdiag, dist({0.0, 1.0}), weights({1.0, eps})) ==
        doctest::Approx(1.0 / eps));

  CHECK_THROWS_AS(classical_weak_value(a, dist({1.0, 0.0}),
                                       weights({0.0, 1.0})),
                  ZeroPostselectionProbability);
}

TEST_CASE("two-outcome model basics") {
  const ClassicalInstrument trivial = build_two_outcome_model(
      RealMat::Zero(2, 2));
  CHECK(trivial.outcome_probability(0.01, 0, 0) == doctest::Approx(0.5));
  CHECK(trivial.outcome_probability(0.01, 1, 1) == doctest::Approx(0.5));
  CHECK((trivial.transition(0.01, 0) - RealMat::Identity(2, 2))
            .cwiseAbs()
            .maxCoeff() < 1e-15);
  CHECK(classical_postselected_expectation(trivial, dist({0.3, 0.7}),
                                           weights({1.0, 0.4}), 0.01) ==
        doctest::Approx(0.0));

  // Validity bound for an off-diagonal entry of size 2: the transition rate
  // 2λ·2 caps λ at 1/4 before the probability shift does at 1/2.
  RealMat big = RealMat::Zero(2, 2);
  big(0, 1) = 2.0;
  const ClassicalInstrument capped = build_two_outcome_model(big);
  CHECK(capped.lambda_max() == doctest::Approx(0.25));
  CHECK_THROWS_AS(capped.outcome_probability(0.3, 0, 0), LambdaOutOfRange);
}

TEST_CASE("postselected expectation reduces without postselection") {
  Rng rng(17);
  const RealMat a = random_weak_matrix(3, rng);
  const ClassicalInstrument inst = build_two_outcome_model(a);
  const OnticDistribution p = dist({0.2, 0.5, 0.3});
  const double lambda = 0.25 * inst.lambda_max();

  // q ≡ 1: conditional expectation equals Σ_m A_m P(m|p).
  double plain = 0.0;
  for (int m = 0; m < inst.n_outcomes(); ++m) {
    double pm = 0.0;
    for (int j = 0; j < 3; ++j) {
      pm += p[j] * inst.outcome_probability(lambda, j, m);
    }
    plain += inst.contextual_value(m) * pm;
  }
  CHECK(classical_postselected_expectation(
            inst, p, PostselectionWeights::accept_all(3), lambda) ==
        doctest::Approx(plain).epsilon(1e-12));
}

TEST_CASE("small-lambda behaviour of the two-outcome model") {
  const ClassicalInstrument inst = build_two_outcome_model(diag2(1.0, -1.0));
  const OnticDistribution p = dist({1.0, 0.0});
  const PostselectionWeights q = weights({1.0, 1.0});
  // E^λ = λ·Ã_00 + O(λ²) for the point preparation.
  for (double lambda : {1e-2, 1e-3, 1e-4}) {
    const double e = classical_postselected_expectation(inst, p, q, lambda);
    CHECK(std::abs(e - lambda) <= 2.0 * lambda * lambda);
  }
}

TEST_CASE("impossible postselection raises") {
  const ClassicalInstrument inst = build_two_outcome_model(RealMat::Zero(2, 2));
  CHECK_THROWS_AS(classical_postselected_expectation(
                      inst, dist({1.0, 0.0}), weights({0.0, 1.0}), 1e-3),
                  ZeroPostselectionProbability);
}

TEST_CASE("weak matrix extraction") {
  SUBCASE("identity transitions with linear probabilities") {
    const int n = 3;
    RealVec slopes(n);
    slopes << 0.4, -0.2, 0.9;
    std::vector<ClassicalOutcome> outcomes(2);
    for (int idx = 0; idx < 2; ++idx) {
      const double sign = idx == 0 ? 1.0 : -1.0;
      outcomes[idx].value = sign;
      outcomes[idx].prob_coeffs = {RealVec::Constant(n, 0.5),
                                   0.5 * sign * slopes};
      outcomes[idx].transition_coeffs = {RealMat::Identity(n, n)};
    }
    const ClassicalInstrument inst(n, std::move(outcomes));
    const WeakMatrixEstimate est = extract_weak_matrix(inst);
    RealMat expected = slopes.asDiagonal();
    CHECK((est.matrix - expected).cwiseAbs().maxCoeff() < 1e-8);
  }

  SUBCASE("lambda-independent instrument extracts zero") {
    std::vector<ClassicalOutcome> outcomes(2);
    for (int idx = 0; idx < 2; ++idx) {
      outcomes[idx].value = idx == 0 ? 1.0 : -1.0;
      outcomes[idx].prob_coeffs = {RealVec::Constant(2, 0.5)};
      outcomes[idx].transition_coeffs = {RealMat::Identity(2, 2)};
    }
    const ClassicalInstrument inst(2, std::move(outcomes));
    const WeakMatrixEstimate est = extract_weak_matrix(inst);
    CHECK(est.matrix.cwiseAbs().maxCoeff() < 1e-10);
  }

  SUBCASE("round trip through the two-outcome model") {
    Rng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
      const RealMat a = random_weak_matrix(3, rng);
      const WeakMatrixEstimate est =
          extract_weak_matrix(build_two_outcome_model(a));
      CHECK((est.matrix - a).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("formula and finite-lambda limit agree with first-order error") {
  Rng rng(31);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 2 + trial % 3;
    const RealMat a = random_weak_matrix(n, rng);
    RealVec pv(n), qv(n);
    for (int j = 0; j < n; ++j) {
      pv(j) = rng.uniform(0.05, 1.0);
      qv(j) = rng.uniform(0.1, 1.0);
    }
    pv /= pv.sum();
    const OnticDistribution p(pv);
    const PostselectionWeights q(qv);
    const ClassicalInstrument inst = build_two_outcome_model(a);
    const double wv = classical_weak_value(a, p, q);

    const double top = std::min(1e-2, 0.5 * inst.lambda_max());
    const double dev1 =
        classical_postselected_expectation(inst, p, q, top) / top - wv;
    const double dev2 =
        classical_postselected_expectation(inst, p, q, top / 2) / (top / 2) -
        wv;
    if (std::abs(dev2) > 1e-9) {
      const double ratio = dev1 / dev2;
      CHECK(ratio > 1.6);
      CHECK(ratio < 2.4);
    } else {
      CHECK(std::abs(dev1) < 1e-8);
    }
  }
}

TEST_CASE("numerator is bilinear under convex mixtures") {
  Rng rng(37);
  const int n = 3;
  const RealMat a = random_weak_matrix(n, rng);
  for (int trial = 0; trial < 10; ++trial) {
    RealVec p1(n), p2(n), qv(n);
    for (int j = 0; j < n; ++j) {
      p1(j) = rng.uniform(0.0, 1.0);
      p2(j) = rng.uniform(0.0, 1.0);
      qv(j) = rng.uniform(0.0, 1.0);
    }
    p1 /= p1.sum();
    p2 /= p2.sum();
    const double alpha = rng.uniform();
    const RealVec mix = alpha * p1 + (1 - alpha) * p2;

    const auto numerator = [&](const RealVec& pv) { return qv.dot(a * pv); };
    CHECK(numerator(mix) ==
          doctest::Approx(alpha * numerator(p1) + (1 - alpha) * numerator(p2))
              .epsilon(1e-12));
  }
}

TEST_CASE("diagonal weak matrices never give anomalous values") {
  Rng rng(41);
  RealMat a = RealMat::Zero(3, 3);
  a(0, 0) = 0.8;
  a(1, 1) = -0.5;
  a(2, 2) = 0.1;
  const double bound = 0.8;
  for (int trial = 0; trial < 50; ++trial) {
    RealVec pv(3), qv(3);
    for (int j = 0; j < 3; ++j) {
      pv(j) = rng.uniform(0.0, 1.0);
      qv(j) = rng.uniform(0.01, 1.0);
    }
    pv /= pv.sum();
    const double wv = classical_weak_value(a, OnticDistribution(pv),
                                           PostselectionWeights(qv));
    CHECK(std::abs(wv) <= bound + 1e-12);
  }
}

TEST_CASE("disturbance classification") {
  SUBCASE("identity transitions pass both senses") {
    const ClassicalInstrument inst = build_two_outcome_model(diag2(0.5, -0.5));
    const DisturbanceClassification c = classify_disturbance(inst);
    CHECK(c.strong_ok);
    CHECK(c.weak_ok);
    CHECK(!c.witness.has_value());
  }

  SUBCASE("off-diagonal weak matrices disturb with the predicted slope") {
    RealMat a = RealMat::Zero(2, 2);
    a(0, 1) = 0.6;
    const ClassicalInstrument inst = build_two_outcome_model(a);
    const DisturbanceClassification c = classify_disturbance(inst);
    CHECK(!c.strong_ok);
    CHECK(!c.weak_ok);
    REQUIRE(c.witness.has_value());
    // First-order rate of the + outcome off-diagonal entry is 2[Ã_kj]_+.
    const ClassicalWitness w = *c.witness;
    CHECK(std::abs(std::abs(w.slope) - 1.2) < 1e-8);
  }

  SUBCASE("outcome-sum cancellation needs negative rates and is rejected") {
    // T_± = 𝟙 ± λS keeps column sums, but one sign always carries a
    // negative rate, so the validity range collapses to λ = 0.
    RealMat s = RealMat::Zero(2, 2);
    s(0, 1) = 1.0;
    s(1, 1) = -1.0;
    std::vector<ClassicalOutcome> outcomes(2);
    for (int idx = 0; idx < 2; ++idx) {
      const double sign = idx == 0 ? 1.0 : -1.0;
      outcomes[idx].value = sign;
      outcomes[idx].prob_coeffs = {RealVec::Constant(2, 0.5)};
      outcomes[idx].transition_coeffs = {RealMat::Identity(2, 2), sign * s};
    }
    const ClassicalInstrument inst(2, std::move(outcomes));
    CHECK(inst.lambda_max() == doctest::Approx(0.0));
    CHECK_THROWS_AS(classify_disturbance(inst), LambdaOutOfRange);
  }

  SUBCASE("weak implies strong on two-outcome models") {
    Rng rng(53);
    for (int trial = 0; trial < 20; ++trial) {
      const RealMat a = random_weak_matrix(2 + trial % 3, rng);
      const DisturbanceClassification c =
          classify_disturbance(build_two_outcome_model(a));
      CHECK((!c.weak_ok || c.strong_ok));
    }
  }
}

TEST_CASE("instrument construction rejects malformed series") {
  std::vector<ClassicalOutcome> outcomes(2);
  outcomes[0].value = 1.0;
  outcomes[0].prob_coeffs = {RealVec::Constant(2, 0.6)};
  outcomes[0].transition_coeffs = {RealMat::Identity(2, 2)};
  outcomes[1].value = -1.0;
  outcomes[1].prob_coeffs = {RealVec::Constant(2, 0.5)};
  outcomes[1].transition_coeffs = {RealMat::Identity(2, 2)};
  CHECK_THROWS_AS(ClassicalInstrument(2, std::move(outcomes)),
                  ValidationError);

  // λ = 0 transition must be the identity.
  std::vector<ClassicalOutcome> bad(2);
  RealMat swap = RealMat::Zero(2, 2);
  swap(0, 1) = swap(1, 0) = 1.0;
  bad[0].value = 1.0;
  bad[0].prob_coeffs = {RealVec::Constant(2, 0.5)};
  bad[0].transition_coeffs = {swap};
  bad[1].value = -1.0;
  bad[1].prob_coeffs = {RealVec::Constant(2, 0.5)};
  bad[1].transition_coeffs = {RealMat::Identity(2, 2)};
  CHECK_THROWS_AS(ClassicalInstrument(2, std::move(bad)), ValidationError);
}

TEST_CASE("contextual values are centered with the shift recorded") {
  std::vector<ClassicalOutcome> outcomes(2);
  outcomes[0].value = 2.0;
  outcomes[0].prob_coeffs = {RealVec::Constant(2, 0.25)};
  outcomes[0].transition_coeffs = {RealMat::Identity(2, 2)};
  outcomes[1].value = 1.0;
  outcomes[1].prob_coeffs = {RealVec::Constant(2, 0.75)};
  outcomes[1].transition_coeffs = {RealMat::Identity(2, 2)};
  const ClassicalInstrument inst(2, std::move(outcomes));
  CHECK(inst.contextual_shift() == doctest::Approx(1.25));
  CHECK(inst.contextual_value(0) == doctest::Approx(0.75));
  CHECK(inst.contextual_value(1) == doctest::Approx(-0.25));
  const RealVec p0 = inst.zero_coupling_probs();
  CHECK(p0(0) * inst.contextual_value(0) + p0(1) * inst.contextual_value(1) ==
        doctest::Approx(0.0));
}

TEST_CASE("exact evaluators override the series") {
  // Nonpolynomial model: P(±|s_j) = (1 ± tanh(λ a_j))/2, identity updates.
  const int n = 2;
  RealVec a(n);
  a << 0.8, -0.5;
  std::vector<ClassicalOutcome> outcomes(2);
  for (int idx = 0; idx < 2; ++idx) {
    const double sign = idx == 0 ? 1.0 : -1.0;
    outcomes[idx].value = sign;
    outcomes[idx].prob_coeffs = {RealVec::Constant(n, 0.5),
                                 0.5 * sign * a};
    outcomes[idx].transition_coeffs = {RealMat::Identity(n, n)};
  }
  const ClassicalInstrument series(n, std::move(outcomes));
  const ClassicalInstrument exact = series.with_exact(
      [a](double lambda, int state, int m) {
        const double sign = m == 0 ? 1.0 : -1.0;
        return 0.5 * (1.0 + sign * std::tanh(lambda * a(state)));
      },
      [n](double, int) { return RealMat(RealMat::Identity(n, n)); }, 0.4);

  CHECK(exact.lambda_max() == doctest::Approx(0.4));
  CHECK(exact.outcome_probability(0.3, 0, 0) ==
        doctest::Approx(0.5 * (1.0 + std::tanh(0.3 * 0.8))));
  // tanh(λa)/λ → a: extraction still sees the diagonal weak matrix.
  const WeakMatrixEstimate est = extract_weak_matrix(exact);
  CHECK((est.matrix - RealMat(a.asDiagonal())).cwiseAbs().maxCoeff() < 1e-8);

  // Inconsistent evaluators are rejected.
  CHECK_THROWS_AS(series.with_exact(
                      [](double, int, int) { return 0.7; },
                      [n](double, int) {
                        return RealMat(RealMat::Identity(n, n));
                      },
                      0.4),
                  ValidationError);
}
