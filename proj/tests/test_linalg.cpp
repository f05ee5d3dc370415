#include <doctest.h>

#include "weaklab/linalg.hpp"
#include "weaklab/random.hpp"
#include "weaklab/richardson.hpp"

using namespace weaklab;

namespace {

Mat pauli_x() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Mat pauli_z() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace

TEST_CASE("hermitian_split on Hermitian and anti-Hermitian inputs") {
  const Mat eye = Mat::Identity(3, 3);
  auto parts = hermitian_split(eye);
  CHECK(max_abs(parts.real_part - eye) < 1e-15);
  CHECK(max_abs(parts.imag_part) < 1e-15);

  const Mat o = pauli_z();
  parts = hermitian_split(Complex{0.0, 1.0} * o);
  CHECK(max_abs(parts.real_part) < 1e-15);
  CHECK(max_abs(parts.imag_part - o) < 1e-15);
}

TEST_CASE("hermitian_split of a nilpotent matrix") {
  Mat m = Mat::Zero(2, 2);
  m(0, 1) = 1.0;
  const auto parts = hermitian_split(m);
  Mat expected_r(2, 2);
  expected_r << 0, 0.5, 0.5, 0;
  // I = (M − M†)/(2i) evaluated by hand.
  Mat expected_i(2, 2);
  expected_i << 0, Complex{0.0, -0.5}, Complex{0.0, 0.5}, 0;
  CHECK(max_abs(parts.real_part - expected_r) < 1e-15);
  CHECK(max_abs(parts.imag_part - expected_i) < 1e-15);
}

TEST_CASE("hermitian_split reconstructs the input") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat m = random_complex(4, 4, rng);
    const auto parts = hermitian_split(m);
    CHECK(is_hermitian(parts.real_part, 1e-12));
    CHECK(is_hermitian(parts.imag_part, 1e-12));
    const Mat rebuilt = parts.real_part + Complex{0.0, 1.0} * parts.imag_part;
    CHECK(max_abs(rebuilt - m) < 1e-14);
  }
}

TEST_CASE("f_functional closed-form values") {
  CHECK(f_functional(3.0 * Mat::Identity(2, 2)) == doctest::Approx(0.0));
  CHECK(f_functional(-1.5 * Mat::Identity(5, 5)) == doctest::Approx(0.0));
  CHECK(f_functional(pauli_z()) == doctest::Approx(4.0));

  Mat b = Mat::Zero(3, 3);
  b(0, 0) = 1.0;
  CHECK(f_functional(b) == doctest::Approx(2.0));

  CHECK_THROWS_AS(f_functional(Complex{0, 1} * pauli_z()), NonHermitianInput);
}

TEST_CASE("f_functional shift invariance and positivity") {
  Rng rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const Mat b = random_hermitian(3, rng);
    const double f = f_functional(b);
    CHECK(f >= -1e-12);
    const double c = rng.uniform(-2.0, 2.0);
    const Mat shifted = b + c * Mat::Identity(3, 3);
    CHECK(f_functional(shifted) == doctest::Approx(f).epsilon(1e-10));
  }
}

TEST_CASE("tensor and partial trace") {
  const Mat a = Mat::Identity(2, 2);
  const Mat b = Mat::Identity(3, 3);
  CHECK(max_abs(tensor(a, b) - Mat::Identity(6, 6)) < 1e-15);
  CHECK(max_abs(partial_trace_aux(Mat::Identity(6, 6), 3) - 3.0 * a) < 1e-15);

  Rng rng(3);
  const Mat m = random_complex(2, 2, rng);
  const Mat n = random_complex(2, 2, rng);
  // tr_aux[M ⊗ N] = tr[N]·M
  CHECK(max_abs(partial_trace_aux(tensor(m, n), 2) - n.trace() * m) < 1e-13);

  const Mat joint = random_complex(4, 4, rng);
  CHECK(std::abs(partial_trace_aux(joint, 2).trace() - joint.trace()) <
        1e-12);

  CHECK_THROWS_AS(partial_trace_aux(Mat::Identity(6, 6), 4),
                  DimensionMismatch);
}

TEST_CASE("matrix_exp basics") {
  Rng rng(5);
  const Mat h = random_hermitian(3, rng);
  CHECK(max_abs(matrix_exp(h, Complex{0.0, 0.0}) - Mat::Identity(3, 3)) <
        1e-14);

  // exp(i(π/2)σ_x) = i·σ_x
  const Mat u = matrix_exp(pauli_x(), Complex{0.0, std::numbers::pi / 2});
  CHECK(max_abs(u - Complex{0.0, 1.0} * pauli_x()) < 1e-12);

  for (int trial = 0; trial < 10; ++trial) {
    const Mat g = random_hermitian(4, rng);
    const double scale = rng.uniform(-1.0, 1.0);
    const Mat v = matrix_exp(g, Complex{0.0, scale});
    CHECK(max_abs(v.adjoint() * v - Mat::Identity(4, 4)) < 1e-10);
  }

  // Non-Hermitian path agrees with the Hermitian one on a Hermitian input
  // disguised by roundoff-free non-Hermitian perturbation of zero.
  const Mat n = random_complex(3, 3, rng);
  const Mat direct = matrix_exp(n);
  // exp(N)·exp(−N) = 1 for any square N.
  CHECK(max_abs(direct * matrix_exp(n, Complex{-1.0, 0.0}) -
                Mat::Identity(3, 3)) < 1e-10);
}

TEST_CASE("pure states validate normalization") {
  Vec v(2);
  v << 1.0, 1.0;
  CHECK_THROWS_AS(PureState{v}, ValidationError);
  const PureState psi = PureState::normalized(v);
  CHECK(psi.amplitudes().norm() == doctest::Approx(1.0));
  CHECK(max_abs(psi.projector() - 0.5 * (Mat::Ones(2, 2))) < 1e-12);
}

TEST_CASE("haar sampling first moment") {
  Rng rng(101);
  const Eigen::Index d = 3;
  const Mat b = random_hermitian(d, rng);
  const int samples = 20000;
  double mean = 0.0;
  double m2 = 0.0;
  for (int i = 0; i < samples; ++i) {
    const PureState psi = haar_random_pure(d, rng);
    const double value =
        (psi.amplitudes().adjoint() * b * psi.amplitudes())(0).real();
    const double delta = value - mean;
    mean += delta / (i + 1);
    m2 += delta * (value - mean);
  }
  const double std_error = std::sqrt(m2 / (samples - 1) / samples);
  const double expected = b.trace().real() / static_cast<double>(d);
  CHECK(std::abs(mean - expected) < 5.0 * std_error);
}

TEST_CASE("haar second moment identity for d in {2,3,4}") {
  for (Eigen::Index d : {2, 3, 4}) {
    Rng rng(200 + d);
    const Mat b = random_hermitian(d, rng);
    const Mat c = random_hermitian(d, rng);
    const double dd = static_cast<double>(d);
    const double expected =
        ((b * c).trace().real() + b.trace().real() * c.trace().real()) /
        (dd * (dd + 1.0));
    const int samples = 100000;
    double mean = 0.0;
    double m2 = 0.0;
    for (int i = 0; i < samples; ++i) {
      const PureState psi = haar_random_pure(d, rng);
      const Vec& v = psi.amplitudes();
      const double value =
          (v.adjoint() * b * v)(0).real() * (v.adjoint() * c * v)(0).real();
      const double delta = value - mean;
      mean += delta / (i + 1);
      m2 += delta * (value - mean);
    }
    const double std_error = std::sqrt(m2 / (samples - 1) / samples);
    CHECK(std::abs(mean - expected) < 5.0 * std_error);
  }
}

TEST_CASE("haar sampling is deterministic per seed") {
  Rng a(42);
  Rng b(42);
  const PureState pa = haar_random_pure(4, a);
  const PureState pb = haar_random_pure(4, b);
  CHECK(max_abs(pa.amplitudes() - pb.amplitudes()) == 0.0);

  Rng c(43);
  const PureState pc = haar_random_pure(4, c);
  CHECK(max_abs(pa.amplitudes() - pc.amplitudes()) > 1e-3);

  // d = 1: the only state up to phase.
  Rng d(1);
  const PureState one = haar_random_pure(1, d);
  CHECK(std::abs(std::abs(one.amplitudes()(0)) - 1.0) < 1e-12);
}

TEST_CASE("richardson extrapolation recovers polynomial limits") {
  LambdaLadder ladder;
  const auto lambdas = ladder.values();
  CHECK(lambdas.size() == 9);
  CHECK(lambdas.front() == doctest::Approx(1e-2));

  std::vector<double> samples;
  for (double l : lambdas) {
    samples.push_back(3.5 + 2.0 * l - 7.0 * l * l);
  }
  const LimitEstimate est = richardson_limit(samples);
  CHECK(est.converged);
  CHECK(est.value == doctest::Approx(3.5).epsilon(1e-12));
  CHECK(std::abs(est.value - 3.5) <= est.error_estimate + 1e-12);

  // Diverging input (grows as the ladder descends) is flagged.
  std::vector<double> bad;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    bad.push_back(static_cast<double>(i * i));
  }
  CHECK_THROWS_AS(richardson_limit_checked(bad), ExtrapolationDiverged);
}

TEST_CASE("two point slope extracts first-order coefficients") {
  const double c1 = -0.7;
  const double c2 = 3.1;
  auto f = [&](double l) { return c1 * l + c2 * l * l; };
  const double slope = two_point_slope(f(1e-2), f(5e-3), 1e-2);
  CHECK(slope == doctest::Approx(c1).epsilon(1e-10));
}
