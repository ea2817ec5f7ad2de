#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "entforge/entanglement.hpp"
#include "entforge/quantum_core.hpp"

using namespace entforge;

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752;

Gate2x2 hadamard() {
  Gate2x2 h;
  h << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
  return h;
}

// (|00> + |11>)/sqrt(2)
StateVector bell() {
  Vector v = Vector::Zero(4);
  v[0] = kInvSqrt2;
  v[3] = kInvSqrt2;
  return StateVector::from_amplitudes(v);
}

}  // namespace

TEST(StateVector, BasisAndNorm) {
  const auto s = StateVector::basis(3, 5);
  EXPECT_EQ(s.dim(), 8u);
  EXPECT_EQ(s[5], Complex(1.0, 0.0));
  EXPECT_DOUBLE_EQ(s.norm(), 1.0);
  EXPECT_THROW(StateVector::basis(3, 8), std::out_of_range);
}

TEST(StateVector, RejectsBadAmplitudes) {
  EXPECT_THROW(StateVector::from_amplitudes(Vector::Ones(4)), std::invalid_argument);
  EXPECT_THROW(StateVector::from_amplitudes(Vector::Zero(3)), std::invalid_argument);
}

TEST(Gates, HadamardOnQubitOne) {
  const auto s = apply_one_qubit_gate(StateVector::basis(2, 0), 1, hadamard());
  EXPECT_NEAR(s[0].real(), kInvSqrt2, 1e-15);
  EXPECT_NEAR(s[2].real(), kInvSqrt2, 1e-15);
  EXPECT_NEAR(std::abs(s[1]), 0.0, 1e-15);
}

TEST(Gates, RejectsNonUnitary) {
  Gate2x2 g;
  g << 1, 1, 0, 1;
  EXPECT_THROW(apply_one_qubit_gate(StateVector(1), 0, g, true), std::invalid_argument);
  EXPECT_THROW(apply_one_qubit_gate(StateVector(2), 2, hadamard()), std::out_of_range);
}

TEST(Gates, TwoQubitPhaseIndexing) {
  // Basis index 0b010 has qubit 1 set and qubit 0 clear: b1 = 0 (q1 = 0), b2 = 1 (q2 = 1).
  const std::array<double, 4> phases{0.1, 0.2, 0.3, 0.4};
  const auto s = apply_two_qubit_phase(StateVector::basis(3, 0b010), 0, 1, phases);
  EXPECT_NEAR(std::arg(s[0b010]), 0.3, 1e-15);
  const auto t = apply_two_qubit_phase(StateVector::basis(3, 0b111), 0, 1, phases);
  EXPECT_NEAR(std::arg(t[0b111]), 0.4, 1e-15);
  EXPECT_THROW(apply_two_qubit_phase(StateVector(3), 1, 1, phases), std::invalid_argument);
}

TEST(Bipartition, CanonicalFormKeepsQubitZeroInA) {
  const Bipartition p(4, 0b1100);
  EXPECT_EQ(p.a_mask(), 0b0011u);
  EXPECT_EQ(p.b_mask(), 0b1100u);
  EXPECT_TRUE(p.balanced());
  EXPECT_EQ(Bipartition(4, 0b0011), p);
  EXPECT_THROW(Bipartition(4, 0), std::invalid_argument);
  EXPECT_THROW(Bipartition(4, 0b1111), std::invalid_argument);
}

TEST(ReducedDensity, BellStateIsMaximallyMixed) {
  const auto rho_a = reduced_density_matrix(bell(), Bipartition(2, 0b01));
  EXPECT_NEAR(rho_a(0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(rho_a(1, 1).real(), 0.5, 1e-15);
  EXPECT_NEAR(std::abs(rho_a(0, 1)), 0.0, 1e-15);
  EXPECT_NEAR(von_neumann_entropy(rho_a), 1.0, 1e-12);
}

TEST(ReducedDensity, ProductStateHasZeroEntropy) {
  const auto s = apply_one_qubit_gate(StateVector::basis(4, 0), 2, hadamard());
  for (const auto& part : enumerate_balanced_bipartitions(4)) {
    EXPECT_NEAR(von_neumann_entropy(reduced_density_matrix(s, part)), 0.0, 1e-12);
  }
}

TEST(ReducedDensity, StateAndDensityRoutesAgree) {
  const auto psi = haar_random_state(5, 3);
  const Bipartition part(5, 0b00101);
  for (const Side side : {Side::A, Side::B}) {
    const auto a = reduced_density_matrix(psi, part, side);
    const auto b = reduced_density_matrix(DensityMatrix::pure(psi), part, side);
    EXPECT_LT((a.matrix() - b.matrix()).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(PartialTranspose, BellSpectrum) {
  // Eigenvalues of the partial transpose of a Bell projector: {-1/2, 1/2, 1/2, 1/2}.
  const Matrix pt = partial_transpose(DensityMatrix::pure(bell()), Bipartition(2, 0b01));
  const auto ev = hermitian_eigenvalues(pt);
  EXPECT_NEAR(ev[0], -0.5, 1e-14);
  for (int i = 1; i < 4; ++i) EXPECT_NEAR(ev[i], 0.5, 1e-14);
  EXPECT_NEAR(trace_norm(pt), 2.0, 1e-14);
}

TEST(PartialTranspose, ElementFormula) {
  const auto rho = DensityMatrix::pure(haar_random_state(3, 9));
  const Bipartition part(3, 0b011);
  const Matrix pt = partial_transpose(rho, part);
  const std::uint64_t a = part.a_mask(), b = part.b_mask();
  for (std::uint64_t i = 0; i < 8; ++i) {
    for (std::uint64_t j = 0; j < 8; ++j) {
      const Complex expected = rho((i & a) | (j & b), (j & a) | (i & b));
      EXPECT_EQ(pt(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), expected);
    }
  }
}

TEST(Entropy, MaximallyMixedAndPure) {
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix::maximally_mixed(3)), 3.0, 1e-12);
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix::pure(haar_random_state(3, 1))), 0.0, 1e-9);
}

TEST(Entropy, CutoffAndClipping) {
  Eigen::VectorXd ev(3);
  ev << -1e-14, 0.5, 0.5 + 1e-14;
  EXPECT_NEAR(entropy_bits(ev), 1.0, 1e-12);
}

TEST(Spectral, SymmetrizesRoundingButRejectsAsymmetry) {
  Matrix m = Matrix::Identity(2, 2);
  m(0, 1) = Complex(1e-12, 0.0);
  EXPECT_NO_THROW(hermitian_eigenvalues(m));
  m(0, 1) = Complex(1e-6, 0.0);
  EXPECT_THROW(hermitian_eigenvalues(m), std::domain_error);
}

TEST(DensityMatrix, Validation) {
  Matrix m = Matrix::Identity(2, 2);
  EXPECT_THROW(DensityMatrix::from_matrix(m), std::invalid_argument);  // trace 2
  m *= 0.5;
  m(0, 1) = Complex(0.0, 0.1);
  EXPECT_THROW(DensityMatrix::from_matrix(m), std::invalid_argument);  // not Hermitian
  m(1, 0) = Complex(0.0, -0.1);
  const auto rho = DensityMatrix::from_matrix(m);
  EXPECT_TRUE(rho.check_invariants().ok());

  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 0) = 1.5;
  bad(1, 1) = -0.5;
  EXPECT_FALSE(DensityMatrix::from_matrix(bad).check_invariants().ok());
}

TEST(Fidelity, PureOverlap) {
  const auto a = haar_random_state(3, 4);
  const auto b = haar_random_state(3, 5);
  EXPECT_NEAR(fidelity(a, DensityMatrix::pure(a)), 1.0, 1e-14);
  EXPECT_NEAR(fidelity(a, DensityMatrix::pure(b)), overlap_probability(a, b), 1e-14);
  EXPECT_NEAR(fidelity(a, DensityMatrix::maximally_mixed(3)), 0.125, 1e-14);
}

TEST(Accumulator, MatchesExplicitMixture) {
  const auto a = haar_random_state(3, 11);
  const auto b = haar_random_state(3, 12);
  DensityAccumulator acc(3);
  accumulate_projector(acc, a, 0.25);
  accumulate_projector(acc, b, 0.75);
  const Matrix expected = 0.25 * DensityMatrix::pure(a).matrix() + 0.75 * DensityMatrix::pure(b).matrix();
  EXPECT_LT((acc.finish().matrix() - expected).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(acc.count(), 2u);
  EXPECT_DOUBLE_EQ(acc.total_weight(), 1.0);
}

TEST(Accumulator, MergeEqualsSequential) {
  DensityAccumulator all(2), left(2), right(2);
  for (int i = 0; i < 6; ++i) {
    const auto s = haar_random_state(2, 100 + static_cast<std::uint64_t>(i));
    all.add(s, 1.0 / 6);
    (i < 3 ? left : right).add(s, 1.0 / 6);
  }
  left.merge(right);
  EXPECT_LT((left.finish().matrix() - all.finish().matrix()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(left.merge(DensityAccumulator(3)), std::invalid_argument);
}

TEST(Bits, DepositBits) {
  EXPECT_EQ(deposit_bits(0b11, 0b1010), 0b1010u);
  EXPECT_EQ(deposit_bits(0b01, 0b1010), 0b0010u);
  EXPECT_EQ(deposit_bits(0b10, 0b1010), 0b1000u);
}
