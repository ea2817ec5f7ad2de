#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "entforge/circuit.hpp"
#include "entforge/sawtooth.hpp"

using namespace entforge;

namespace {

std::uint64_t reverse_bits(std::uint64_t x, int n) {
  std::uint64_t r = 0;
  for (int j = 0; j < n; ++j) r |= ((x >> j) & 1u) << (n - 1 - j);
  return r;
}

// Max entrywise distance after removing the global phase fixed by the largest entry.
double distance_up_to_phase(const Matrix& a, const Matrix& b) {
  Eigen::Index r = 0, c = 0;
  b.cwiseAbs().maxCoeff(&r, &c);
  const Complex phase = a(r, c) / b(r, c);
  return (a - (phase / std::abs(phase)) * b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(Circuit, HadamardGateIsExact) {
  const Gate2x2 h = nominal_matrix(Gate::hadamard(0));
  const double s = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(h(0, 0) - s), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(h(0, 1) - s), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(h(1, 0) - s), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(h(1, 1) + s), 0.0, 1e-15);
}

TEST(Circuit, RotationMatrixIsUnitary) {
  const auto r = rotation_matrix(0.7, {0.0, 0.6, 0.8});
  EXPECT_TRUE(is_unitary(r));
  EXPECT_NEAR(r.trace().real(), 2.0 * std::cos(0.35), 1e-15);
}

TEST(Circuit, QftWithoutSwapsMatchesBitReversedDft) {
  for (int n = 1; n <= 5; ++n) {
    const Matrix u = sequence_unitary(qft_without_swaps(n));
    const auto dim = static_cast<std::uint64_t>(1) << n;
    double worst = 0.0;
    for (std::uint64_t x = 0; x < dim; ++x) {
      for (std::uint64_t y = 0; y < dim; ++y) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(x * y) / static_cast<double>(dim);
        const Complex expected = std::polar(1.0 / std::sqrt(static_cast<double>(dim)), angle);
        const Complex got = u(static_cast<Eigen::Index>(reverse_bits(y, n)), static_cast<Eigen::Index>(x));
        worst = std::max(worst, std::abs(got - expected));
      }
    }
    EXPECT_LT(worst, 1e-12) << "n = " << n;
  }
}

TEST(Circuit, QuadraticPhaseMatchesDirectFormula) {
  const int n = 4;
  const double c = 0.37, offset = 8.0;
  const std::vector<int> layout{2, 0, 3, 1};
  const Matrix u = sequence_unitary(quadratic_phase(n, c, offset, layout));
  Matrix expected = Matrix::Zero(16, 16);
  for (std::uint64_t x = 0; x < 16; ++x) {
    std::uint64_t index = 0;
    for (int j = 0; j < n; ++j) index |= ((x >> j) & 1u) << layout[static_cast<std::size_t>(j)];
    const double v = static_cast<double>(x) - offset;
    expected(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = std::polar(1.0, c * v * v);
  }
  EXPECT_LT(distance_up_to_phase(u, expected), 1e-12);
  EXPECT_THROW(quadratic_phase(n, c, offset, {0, 1}), std::invalid_argument);
}

TEST(Circuit, InverseUndoesSequence) {
  GateSequence s = qft_without_swaps(3);
  s.append(quadratic_phase(3, 0.21, 4.0, {0, 1, 2}));
  const Matrix u = sequence_unitary(s);
  const Matrix v = sequence_unitary(s.inverse());
  EXPECT_LT((v * u - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Circuit, StepGateCount) {
  for (int n = 1; n <= 10; ++n) {
    const auto c = build_step_circuit(MapParams::make(n));
    EXPECT_EQ(c.gate_count(), static_cast<std::size_t>(2 * n * n + 2 * n)) << "n = " << n;
    EXPECT_EQ(reference_gate_count(n), static_cast<std::size_t>(3 * n * n + n));
  }
  EXPECT_EQ(build_step_circuit(MapParams::make(4)).gate_count(), 40u);
  EXPECT_EQ(build_step_circuit(MapParams::make(8)).gate_count(), 144u);
}

TEST(Circuit, GateFactoriesValidate) {
  EXPECT_THROW(Gate::controlled_phase(1, 1, 0.3), std::invalid_argument);
  EXPECT_THROW(Gate::rotation(0, 0.3, {0.0, 0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(nominal_matrix(Gate::controlled_phase(0, 1, 0.3)), std::invalid_argument);
}
