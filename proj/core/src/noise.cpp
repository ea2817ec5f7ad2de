#include "entforge/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace entforge {

namespace {

using Vec3 = std::array<double, 3>;

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double length(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

Vec3 scaled(const Vec3& v, double s) { return {v[0] * s, v[1] * s, v[2] * s}; }

}  // namespace

NoiseModel::NoiseModel(double eps) : epsilon(eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw std::invalid_argument("noise amplitude must be >= 0");
}

int NoiseModel::parameter_count(const Gate& gate) {
  switch (gate.kind) {
    case GateKind::Rotation:
    case GateKind::Hadamard: return kTiltParametersPerRotation;
    case GateKind::Phase1: return kPhaseParametersPerOneQubitDiagonal;
    case GateKind::Phase2: return kPhaseParametersPerTwoQubitDiagonal;
  }
  return 0;
}

std::size_t noise_parameter_count(const GateSequence& sequence) {
  std::size_t total = 0;
  for (const Gate& g : sequence.gates) total += static_cast<std::size_t>(NoiseModel::parameter_count(g));
  return total;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

NoiseStream::NoiseStream(std::uint64_t master_seed, std::uint64_t realization_index)
    : key_(mix64(mix64(master_seed) ^ mix64(realization_index ^ 0x5851f42d4c957f2dULL))) {}

std::uint64_t NoiseStream::bits(std::uint64_t counter) const {
  // Two finalizer rounds decorrelate nearby (key, counter) pairs.
  return mix64(mix64(key_ + counter * 0x9e3779b97f4a7c15ULL) ^ key_);
}

double NoiseStream::uniform(std::uint64_t counter) const {
  return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

double NoiseStream::symmetric(std::uint64_t counter, double epsilon) const {
  return epsilon * (2.0 * uniform(counter) - 1.0);
}

std::array<double, 3> tilted_axis(const std::array<double, 3>& axis, double polar, double azimuthal) {
  const Vec3 u = scaled(axis, 1.0 / length(axis));
  Vec3 e1 = cross({0.0, 1.0, 0.0}, u);
  if (length(e1) < 1e-12) {
    e1 = {1.0, 0.0, 0.0};
  } else {
    e1 = scaled(e1, 1.0 / length(e1));
  }
  const Vec3 e2 = cross(u, e1);
  const double c0 = std::cos(polar), s0 = std::sin(polar);
  const double c1 = std::cos(azimuthal), s1 = std::sin(azimuthal);
  Vec3 out;
  for (std::size_t i = 0; i < 3; ++i) out[i] = c0 * c1 * u[i] + s0 * e1[i] + c0 * s1 * e2[i];
  return out;
}

Gate2x2 perturb_one_qubit_gate(const Gate& gate, std::span<const double> draws) {
  if (gate.kind != GateKind::Rotation && gate.kind != GateKind::Hadamard) {
    throw std::invalid_argument("axis-tilt noise applies to rotation-type gates only");
  }
  if (draws.size() != NoiseModel::kTiltParametersPerRotation) {
    throw std::invalid_argument("axis tilt needs exactly 2 draws");
  }
  const Vec3 axis = tilted_axis(rotation_axis(gate), draws[0], draws[1]);
  Gate2x2 u = rotation_matrix(rotation_angle(gate), axis);
  if (gate.kind == GateKind::Hadamard) u *= Complex{0.0, 1.0};
  return u;
}

std::array<Complex, 4> perturb_phase_gate(const Gate& gate, std::span<const double> draws) {
  if (!gate.diagonal()) throw std::invalid_argument("phase noise applies to diagonal gates only");
  const auto expected = static_cast<std::size_t>(NoiseModel::parameter_count(gate));
  if (draws.size() != expected) {
    throw std::invalid_argument("phase noise needs one draw per basis state of the gate");
  }
  std::array<Complex, 4> diagonal{Complex{1.0}, Complex{1.0}, Complex{1.0}, Complex{1.0}};
  for (std::size_t j = 0; j < expected; ++j) diagonal[j] = std::polar(1.0, gate.phases[j] + draws[j]);
  return diagonal;
}

void apply_noisy_gate(StateVector& state, const Gate& gate, const NoiseStream& stream,
                      std::uint64_t ordinal, double epsilon) {
  const int count = NoiseModel::parameter_count(gate);
  std::array<double, NoiseModel::kMaxParametersPerGate> draws{};
  const std::uint64_t base = ordinal * NoiseModel::kMaxParametersPerGate;
  for (int j = 0; j < count; ++j) {
    draws[static_cast<std::size_t>(j)] = stream.symmetric(base + static_cast<std::uint64_t>(j), epsilon);
  }
  const std::span<const double> used(draws.data(), static_cast<std::size_t>(count));
  switch (gate.kind) {
    case GateKind::Rotation:
    case GateKind::Hadamard:
      kernels::apply_one_qubit(state.data(), gate.qubits[0], perturb_one_qubit_gate(gate, used));
      return;
    case GateKind::Phase1: {
      const auto d = perturb_phase_gate(gate, used);
      kernels::apply_diagonal_one(state.data(), gate.qubits[0], {d[0], d[1]});
      return;
    }
    case GateKind::Phase2:
      kernels::apply_diagonal_two(state.data(), gate.qubits[0], gate.qubits[1],
                                  perturb_phase_gate(gate, used));
      return;
  }
}

}  // namespace entforge
