#pragma once

// Unitary gate-noise model.
//
// One-qubit rotations (Hadamards included) get their rotation axis tilted by
// two random angles; diagonal gates get an independent random phase on every
// computational basis state of the gate's subspace (2 for one-qubit phase
// gates, 4 for two-qubit phase gates). Every parameter is uniform in
// [-epsilon, +epsilon] and redrawn on every gate application.

#include <array>
#include <cstdint>
#include <span>

#include "entforge/circuit.hpp"

namespace entforge {

struct NoiseModel {
  static constexpr int kTiltParametersPerRotation = 2;
  static constexpr int kPhaseParametersPerOneQubitDiagonal = 2;
  static constexpr int kPhaseParametersPerTwoQubitDiagonal = 4;
  static constexpr int kMaxParametersPerGate = 4;

  double epsilon = 0.0;

  explicit NoiseModel(double eps);
  static int parameter_count(const Gate& gate);
};

/// Total number of noise parameters drawn per application of `sequence`.
std::size_t noise_parameter_count(const GateSequence& sequence);

/// Counter-based uniform stream keyed by (master_seed, realization_index).
/// Value k of the stream is a pure function of (key, k), so realizations
/// never share state and can be generated in any order.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t master_seed, std::uint64_t realization_index);

  std::uint64_t key() const { return key_; }
  /// 64 random bits at position `counter`.
  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform double in [0, 1).
  double uniform(std::uint64_t counter) const;
  /// Uniform double in [-epsilon, +epsilon].
  double symmetric(std::uint64_t counter, double epsilon) const;

 private:
  std::uint64_t key_;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Rotation by the gate's nominal angle about its axis tilted by
/// draw[0] (toward the local e1 direction) and draw[1] (toward e2).
///
/// Local frame around the nominal axis u: e1 = normalize(y x u), or x when
/// u is parallel to y; e2 = u x e1. The tilted axis is
///   cos(d0) cos(d1) u + sin(d0) e1 + cos(d0) sin(d1) e2,
/// a unit vector for any draws, so the result is exactly unitary.
Gate2x2 perturb_one_qubit_gate(const Gate& gate, std::span<const double> draws);

/// Diagonal of a phase gate with each entry multiplied by exp(i draws[j]).
/// One-qubit gates use entries 0..1, two-qubit gates 0..3.
std::array<Complex, 4> perturb_phase_gate(const Gate& gate, std::span<const double> draws);

/// Tilted unit axis used by perturb_one_qubit_gate.
std::array<double, 3> tilted_axis(const std::array<double, 3>& axis, double polar, double azimuthal);

/// Applies `gate` to `state` with noise parameters drawn from `stream`
/// starting at counter `ordinal * kMaxParametersPerGate`.
void apply_noisy_gate(StateVector& state, const Gate& gate, const NoiseStream& stream,
                      std::uint64_t ordinal, double epsilon);

}  // namespace entforge
