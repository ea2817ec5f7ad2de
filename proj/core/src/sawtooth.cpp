#include "entforge/sawtooth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace entforge {

MapParams MapParams::make(int n_qubits, double chaos) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw std::invalid_argument("map needs between 1 and " + std::to_string(kMaxQubits) + " qubits");
  }
  if (!std::isfinite(chaos)) throw std::invalid_argument("chaos parameter K must be finite");
  return MapParams{n_qubits, chaos};
}

double MapParams::period() const { return 2.0 * std::numbers::pi / static_cast<double>(levels()); }

double momentum_phase(std::int64_t n, const MapParams& params) {
  const std::int64_t half = params.levels() / 2;
  if (n < -half || n >= half) throw std::out_of_range("momentum level out of range");
  const double nd = static_cast<double>(n);
  return -params.period() * nd * nd / 2.0;
}

double theta_phase(std::int64_t l, const MapParams& params) {
  if (l < 0 || l >= params.levels()) throw std::out_of_range("position index out of range");
  const double d = 2.0 * std::numbers::pi * static_cast<double>(l) / static_cast<double>(params.levels()) -
                   std::numbers::pi;
  return params.kick() * d * d / 2.0;
}

std::uint64_t momentum_index(std::int64_t n, const MapParams& params) {
  const std::int64_t half = params.levels() / 2;
  if (n < -half || n >= half) throw std::out_of_range("momentum level out of range");
  return static_cast<std::uint64_t>(n + half);
}

std::size_t reference_gate_count(int n_qubits) {
  const auto n = static_cast<std::size_t>(n_qubits);
  return 3 * n * n + n;
}

GateSequence build_step_circuit(const MapParams& params) {
  const int n = params.n_qubits;
  const double half = static_cast<double>(params.levels()) / 2.0;
  const double grid = params.period();  // theta_l = grid * l

  std::vector<int> reversed(static_cast<std::size_t>(n));
  std::vector<int> identity(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    reversed[static_cast<std::size_t>(j)] = n - 1 - j;
    identity[static_cast<std::size_t>(j)] = j;
  }

  const GateSequence qft = qft_without_swaps(n);
  // k (theta_l - pi)^2 / 2 = (k grid^2 / 2) (l - N/2)^2, with l bit-reversed
  // on the register after the swap-free QFT.
  const GateSequence kick = quadratic_phase(n, params.kick() * grid * grid / 2.0, half, reversed);
  // -T n^2 / 2 = (-T / 2) (m - N/2)^2
  const GateSequence free = quadratic_phase(n, -params.period() / 2.0, half, identity);

  GateSequence step{n, {}};
  step.append(qft);
  step.append(kick);
  step.append(qft.inverse());
  step.append(free);
  return step;
}

namespace {

struct SplitOperator {
  explicit SplitOperator(const MapParams& params) {
    const auto dim = static_cast<std::size_t>(params.levels());
    kick.resize(dim);
    free.resize(dim);
    const std::int64_t half = params.levels() / 2;
    for (std::size_t i = 0; i < dim; ++i) {
      const auto idx = static_cast<std::int64_t>(i);
      kick[i] = std::polar(1.0, theta_phase(idx, params));
      free[i] = std::polar(1.0, momentum_phase(idx - half, params));
    }
    scale = std::sqrt(static_cast<double>(dim));
  }

  // One map step in place. `buffer` is scratch space of the same size.
  void step(std::vector<Complex>& momentum, std::vector<Complex>& buffer) {
    // Momentum -> position: psi(theta_l) = N^-1/2 sum_m exp(+2 pi i m l / N) phi_m.
    // The (-1)^l factor from the n = m - N/2 shift cancels against the way
    // back, so plain DFTs suffice.
    fft.inv(buffer, momentum);
    for (std::size_t i = 0; i < buffer.size(); ++i) buffer[i] *= kick[i] * scale;
    fft.fwd(momentum, buffer);
    for (std::size_t i = 0; i < momentum.size(); ++i) momentum[i] *= free[i] / scale;
  }

  Eigen::FFT<double> fft;
  std::vector<Complex> kick;
  std::vector<Complex> free;
  double scale = 1.0;
};

}  // namespace

StateVector evolve_exact(const StateVector& state, const MapParams& params, int steps) {
  if (steps < 0) throw std::invalid_argument("evolve_exact: negative step count");
  if (state.n_qubits() != params.n_qubits) throw std::invalid_argument("evolve_exact: size mismatch");
  if (steps == 0) return state;

  SplitOperator op(params);
  std::vector<Complex> momentum(state.data().begin(), state.data().end());
  std::vector<Complex> buffer(momentum.size());
  for (int t = 0; t < steps; ++t) op.step(momentum, buffer);

  Vector out = Eigen::Map<Vector>(momentum.data(), static_cast<Eigen::Index>(momentum.size()));
  return StateVector::from_amplitudes(std::move(out));
}

Matrix exact_step_unitary(const MapParams& params) {
  const auto dim = static_cast<Eigen::Index>(params.levels());
  Matrix u(dim, dim);
  SplitOperator op(params);
  std::vector<Complex> column(static_cast<std::size_t>(dim));
  std::vector<Complex> buffer(column.size());
  for (Eigen::Index k = 0; k < dim; ++k) {
    std::fill(column.begin(), column.end(), Complex{0.0});
    column[static_cast<std::size_t>(k)] = 1.0;
    op.step(column, buffer);
    for (Eigen::Index r = 0; r < dim; ++r) u(r, k) = column[static_cast<std::size_t>(r)];
  }
  return u;
}

StateVector evolve_circuit(const StateVector& state, const GateSequence& circuit, int steps,
                           const std::optional<NoisySchedule>& noise) {
  if (steps < 0) throw std::invalid_argument("evolve_circuit: negative step count");
  if (state.n_qubits() != circuit.n_qubits) {
    throw std::invalid_argument("evolve_circuit: circuit built for a different qubit count");
  }
  StateVector out = state;
  if (!noise || noise->model.epsilon == 0.0) {
    for (int t = 0; t < steps; ++t) {
      for (const Gate& g : circuit.gates) apply_gate(out, g);
    }
    return out;
  }
  std::uint64_t ordinal = noise->first_ordinal;
  for (int t = 0; t < steps; ++t) {
    for (const Gate& g : circuit.gates) {
      apply_noisy_gate(out, g, noise->stream, ordinal++, noise->model.epsilon);
    }
  }
  return out;
}

}  // namespace entforge
