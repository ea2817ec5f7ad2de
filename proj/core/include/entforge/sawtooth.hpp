#pragma once

// Quantum sawtooth map U = exp(-i T n^2 / 2) exp(i k (theta - pi)^2 / 2) on
// N = 2^n_q levels, hbar = 1.
//
// The computational basis is the momentum basis: index m stands for
// n = m - N/2, so n runs over [-N/2, N/2). Positions are theta_l = 2 pi l / N.

#include <cstdint>
#include <optional>

#include "entforge/circuit.hpp"
#include "entforge/noise.hpp"

namespace entforge {

inline constexpr double kDefaultChaosParameter = 1.5;

struct MapParams {
  int n_qubits = 0;
  double chaos = kDefaultChaosParameter;  // K = k T

  static MapParams make(int n_qubits, double chaos = kDefaultChaosParameter);

  std::int64_t levels() const { return std::int64_t{1} << n_qubits; }  // N
  double period() const;                                                // T = 2 pi / N
  double kick() const { return chaos / period(); }                     // k = K / T
};

/// -T n^2 / 2 for momentum n in [-N/2, N/2).
double momentum_phase(std::int64_t n, const MapParams& params);
/// k (theta_l - pi)^2 / 2 for grid index l in [0, N).
double theta_phase(std::int64_t l, const MapParams& params);

/// Basis index of momentum n.
std::uint64_t momentum_index(std::int64_t n, const MapParams& params);

/// Reference gate count per map step quoted for the original decomposition,
/// 3 n_q^2 + n_q. The circuit built here reports its own count.
std::size_t reference_gate_count(int n_qubits);

/// One map step: QFT, kick phases in the (bit-reversed) position register,
/// inverse QFT, free-rotation phases in the momentum register. The QFT's
/// final bit reversal is absorbed into the qubit layout of the kick phases,
/// so no swap gates appear.
GateSequence build_step_circuit(const MapParams& params);

/// Split-operator evolution via FFT between momentum and position
/// representations. Independent of the gate decomposition.
StateVector evolve_exact(const StateVector& state, const MapParams& params, int steps);

/// Exact one-step unitary from the split-operator route (column k = image of |k>).
Matrix exact_step_unitary(const MapParams& params);

struct NoisySchedule {
  NoiseModel model;
  NoiseStream stream;
  /// Gate applications already consumed from the stream, so evolution can
  /// be split into several calls without reusing parameters.
  std::uint64_t first_ordinal = 0;
};

/// Applies `circuit` `steps` times. With noise, every gate application draws
/// fresh parameters from the schedule's stream.
StateVector evolve_circuit(const StateVector& state, const GateSequence& circuit, int steps,
                           const std::optional<NoisySchedule>& noise = std::nullopt);

}  // namespace entforge
