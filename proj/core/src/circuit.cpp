#include "entforge/circuit.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace entforge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double angle) { return std::remainder(angle, kTwoPi); }

std::array<double, 3> normalized(std::array<double, 3> v) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (!(n > 0.0)) throw std::invalid_argument("rotation axis must be nonzero");
  return {v[0] / n, v[1] / n, v[2] / n};
}

}  // namespace

std::string_view to_string(GateKind kind) {
  switch (kind) {
    case GateKind::Rotation: return "rotation";
    case GateKind::Hadamard: return "hadamard";
    case GateKind::Phase1: return "phase1";
    case GateKind::Phase2: return "phase2";
  }
  return "unknown";
}

Gate Gate::rotation(int qubit, double angle, std::array<double, 3> axis) {
  Gate g;
  g.kind = GateKind::Rotation;
  g.qubits = {qubit, -1};
  g.angle = angle;
  g.axis = normalized(axis);
  return g;
}

Gate Gate::hadamard(int qubit) {
  Gate g;
  g.kind = GateKind::Hadamard;
  g.qubits = {qubit, -1};
  return g;
}

Gate Gate::phase1(int qubit, double phase) {
  Gate g;
  g.kind = GateKind::Phase1;
  g.qubits = {qubit, -1};
  g.phases = {0.0, phase, 0.0, 0.0};
  return g;
}

Gate Gate::controlled_phase(int q1, int q2, double phase) {
  if (q1 == q2) throw std::invalid_argument("controlled phase needs distinct qubits");
  Gate g;
  g.kind = GateKind::Phase2;
  g.qubits = {q1, q2};
  g.phases = {0.0, 0.0, 0.0, phase};
  return g;
}

std::array<double, 3> rotation_axis(const Gate& gate) {
  switch (gate.kind) {
    case GateKind::Rotation: return gate.axis;
    case GateKind::Hadamard: return {std::numbers::sqrt2 / 2, 0.0, std::numbers::sqrt2 / 2};
    default: throw std::invalid_argument("not a rotation-type gate");
  }
}

double rotation_angle(const Gate& gate) {
  switch (gate.kind) {
    case GateKind::Rotation: return gate.angle;
    case GateKind::Hadamard: return std::numbers::pi;
    default: throw std::invalid_argument("not a rotation-type gate");
  }
}

Gate2x2 rotation_matrix(double angle, const std::array<double, 3>& axis) {
  const double c = std::cos(angle / 2);
  const double s = std::sin(angle / 2);
  const Complex i{0.0, 1.0};
  const auto [x, y, z] = axis;
  Gate2x2 u;
  u(0, 0) = c - i * s * z;
  u(0, 1) = -i * s * x - s * y;
  u(1, 0) = -i * s * x + s * y;
  u(1, 1) = c + i * s * z;
  return u;
}

Gate2x2 nominal_matrix(const Gate& gate) {
  switch (gate.kind) {
    case GateKind::Rotation: return rotation_matrix(gate.angle, gate.axis);
    case GateKind::Hadamard:
      return Complex{0.0, 1.0} * rotation_matrix(std::numbers::pi, rotation_axis(gate));
    case GateKind::Phase1: {
      Gate2x2 u = Gate2x2::Zero();
      u(0, 0) = std::polar(1.0, gate.phases[0]);
      u(1, 1) = std::polar(1.0, gate.phases[1]);
      return u;
    }
    case GateKind::Phase2: break;
  }
  throw std::invalid_argument("two-qubit gate has no 2x2 matrix");
}

void apply_gate(StateVector& state, const Gate& gate) {
  switch (gate.kind) {
    case GateKind::Rotation:
    case GateKind::Hadamard:
      kernels::apply_one_qubit(state.data(), gate.qubits[0], nominal_matrix(gate));
      return;
    case GateKind::Phase1:
      kernels::apply_diagonal_one(state.data(), gate.qubits[0],
                                  {std::polar(1.0, gate.phases[0]), std::polar(1.0, gate.phases[1])});
      return;
    case GateKind::Phase2:
      kernels::apply_diagonal_two(state.data(), gate.qubits[0], gate.qubits[1],
                                  {std::polar(1.0, gate.phases[0]), std::polar(1.0, gate.phases[1]),
                                   std::polar(1.0, gate.phases[2]), std::polar(1.0, gate.phases[3])});
      return;
  }
}

void GateSequence::append(const GateSequence& other) {
  if (other.n_qubits != n_qubits) throw std::invalid_argument("append: qubit count mismatch");
  gates.insert(gates.end(), other.gates.begin(), other.gates.end());
}

GateSequence GateSequence::inverse() const {
  GateSequence inv{n_qubits, {}};
  inv.gates.reserve(gates.size());
  for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
    Gate g = *it;
    switch (g.kind) {
      case GateKind::Rotation: g.angle = -g.angle; break;
      case GateKind::Hadamard: break;
      case GateKind::Phase1:
      case GateKind::Phase2:
        for (double& p : g.phases) p = -p;
        break;
    }
    inv.gates.push_back(g);
  }
  return inv;
}

GateSequence qft_without_swaps(int n_qubits) {
  GateSequence seq{n_qubits, {}};
  for (int j = n_qubits - 1; j >= 0; --j) {
    seq.gates.push_back(Gate::hadamard(j));
    for (int k = j - 1; k >= 0; --k) {
      seq.gates.push_back(Gate::controlled_phase(k, j, std::numbers::pi / double(1 << (j - k))));
    }
  }
  return seq;
}

GateSequence quadratic_phase(int n_qubits, double coefficient, double offset,
                             const std::vector<int>& layout) {
  if (static_cast<int>(layout.size()) != n_qubits) {
    throw std::invalid_argument("quadratic_phase: layout size mismatch");
  }
  // c (x - x0)^2 with x = sum_j b_j 2^j and b_j^2 = b_j:
  //   linear   c (4^j - 2 x0 2^j) b_j
  //   bilinear 2 c 2^(i+j) b_i b_j  (i < j)
  GateSequence seq{n_qubits, {}};
  for (int j = 0; j < n_qubits; ++j) {
    const double w = std::ldexp(1.0, j);
    seq.gates.push_back(Gate::phase1(layout[static_cast<std::size_t>(j)],
                                     wrap_angle(coefficient * (w * w - 2.0 * offset * w))));
  }
  for (int i = 0; i < n_qubits; ++i) {
    for (int j = i + 1; j < n_qubits; ++j) {
      seq.gates.push_back(Gate::controlled_phase(layout[static_cast<std::size_t>(i)],
                                                 layout[static_cast<std::size_t>(j)],
                                                 wrap_angle(2.0 * coefficient * std::ldexp(1.0, i + j))));
    }
  }
  return seq;
}

Matrix sequence_unitary(const GateSequence& sequence) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << sequence.n_qubits);
  Matrix u(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    StateVector column = StateVector::basis(sequence.n_qubits, static_cast<std::uint64_t>(k));
    for (const Gate& g : sequence.gates) apply_gate(column, g);
    u.col(k) = column.amplitudes();
  }
  return u;
}

}  // namespace entforge
