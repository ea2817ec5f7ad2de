#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "entforge/entanglement.hpp"
#include "entforge/sawtooth.hpp"

using namespace entforge;

namespace {

// U_{n', n} = exp(-i T n'^2 / 2) (1/N) sum_l exp(-i n' theta_l) exp(i k (theta_l - pi)^2 / 2) exp(i n theta_l),
// written straight from the map definition in the momentum basis.
Matrix brute_force_step(const MapParams& p) {
  const auto dim = p.levels();
  const double big_n = static_cast<double>(dim);
  Matrix u = Matrix::Zero(dim, dim);
  for (std::int64_t a = 0; a < dim; ++a) {
    const double na = static_cast<double>(a - dim / 2);
    for (std::int64_t b = 0; b < dim; ++b) {
      const double nb = static_cast<double>(b - dim / 2);
      Complex sum = 0.0;
      for (std::int64_t l = 0; l < dim; ++l) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(l) / big_n;
        const double phase = (nb - na) * theta + p.kick() * (theta - std::numbers::pi) * (theta - std::numbers::pi) / 2.0;
        sum += std::polar(1.0, phase);
      }
      u(a, b) = std::polar(1.0, -p.period() * na * na / 2.0) * sum / big_n;
    }
  }
  return u;
}

double distance_up_to_phase(const Matrix& a, const Matrix& b) {
  Eigen::Index r = 0, c = 0;
  b.cwiseAbs().maxCoeff(&r, &c);
  const Complex phase = a(r, c) / b(r, c);
  return (a - (phase / std::abs(phase)) * b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(Sawtooth, PhaseExamples) {
  const auto p = MapParams::make(4);
  EXPECT_NEAR(momentum_phase(1, p), -0.19634954084936207, 1e-15);  // -T/2 with T = pi/8
  EXPECT_NEAR(theta_phase(0, p), 18.849555921538759, 1e-12);       // k pi^2 / 2 with k = 1.5 N / (2 pi)
  EXPECT_NEAR(theta_phase(8, p), 0.0, 1e-15);
  EXPECT_THROW(momentum_phase(8, p), std::out_of_range);
  EXPECT_THROW(theta_phase(16, p), std::out_of_range);
}

TEST(Sawtooth, MomentumIndexMapping) {
  const auto p = MapParams::make(3);
  EXPECT_EQ(momentum_index(0, p), 4u);
  EXPECT_EQ(momentum_index(-4, p), 0u);
  EXPECT_EQ(momentum_index(3, p), 7u);
}

TEST(Sawtooth, SingleQubitUnitaryMatchesDefinition) {
  // N = 2: T = pi, k = 1.5 / pi. Frozen from the definition.
  const auto p = MapParams::make(1);
  const Matrix expected = brute_force_step(p);
  const Matrix u = exact_step_unitary(p);
  EXPECT_LT((u - expected).cwiseAbs().maxCoeff(), 1e-14);
  // U(n'=-1, n=-1) = -i (1 + exp(i 3 pi / 4)) / 2
  const Complex u00 = Complex(0.0, -1.0) * (1.0 + std::polar(1.0, 0.75 * std::numbers::pi)) / 2.0;
  EXPECT_NEAR(std::abs(u(0, 0) - u00), 0.0, 1e-14);
}

TEST(Sawtooth, ExactUnitaryMatchesDefinition) {
  for (int n = 1; n <= 5; ++n) {
    const auto p = MapParams::make(n);
    EXPECT_LT((exact_step_unitary(p) - brute_force_step(p)).cwiseAbs().maxCoeff(), 1e-12) << "n = " << n;
  }
}

TEST(Sawtooth, CircuitMatchesDefinitionUpToGlobalPhase) {
  for (int n = 1; n <= 6; ++n) {
    const auto p = MapParams::make(n);
    EXPECT_LT(distance_up_to_phase(sequence_unitary(build_step_circuit(p)), brute_force_step(p)), 1e-11)
        << "n = " << n;
  }
}

TEST(Sawtooth, CircuitTracksOracleOverManySteps) {
  for (int n = 2; n <= 8; ++n) {
    const auto p = MapParams::make(n);
    const auto psi = haar_random_state(n, 77 + static_cast<std::uint64_t>(n));
    const auto a = evolve_exact(psi, p, 30);
    const auto b = evolve_circuit(psi, build_step_circuit(p), 30);
    EXPECT_GT(overlap_probability(a, b), 1.0 - 1e-9) << "n = " << n;
  }
}

TEST(Sawtooth, EvolutionPreservesNorm) {
  const auto p = MapParams::make(6, -5.0);
  const auto psi = evolve_exact(StateVector::basis(6, 32), p, 100);
  EXPECT_NEAR(psi.norm(), 1.0, 1e-12);
}

TEST(Sawtooth, ZeroNoiseScheduleEqualsNoiseless) {
  const auto p = MapParams::make(4);
  const auto c = build_step_circuit(p);
  const auto psi = StateVector::basis(4, 8);
  const NoisySchedule zero{NoiseModel(0.0), NoiseStream(1, 2), 0};
  const auto a = evolve_circuit(psi, c, 7, zero);
  const auto b = evolve_circuit(psi, c, 7);
  EXPECT_EQ(a.amplitudes(), b.amplitudes());
}

TEST(Sawtooth, SplitEvolutionContinuesTheStream) {
  const auto p = MapParams::make(3);
  const auto c = build_step_circuit(p);
  const auto psi = StateVector::basis(3, 4);
  const NoiseStream stream(5, 9);
  const auto whole = evolve_circuit(psi, c, 4, NoisySchedule{NoiseModel(0.05), stream, 0});
  const auto half = evolve_circuit(psi, c, 2, NoisySchedule{NoiseModel(0.05), stream, 0});
  const auto rest = evolve_circuit(half, c, 2, NoisySchedule{NoiseModel(0.05), stream, 2 * c.gate_count()});
  EXPECT_LT((whole.amplitudes() - rest.amplitudes()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Sawtooth, ParameterValidation) {
  EXPECT_THROW(MapParams::make(0), std::invalid_argument);
  EXPECT_THROW(evolve_exact(StateVector(3), MapParams::make(4), 1), std::invalid_argument);
  EXPECT_THROW(evolve_circuit(StateVector(3), build_step_circuit(MapParams::make(3)), -1), std::invalid_argument);
}
