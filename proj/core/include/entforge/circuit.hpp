#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "entforge/quantum_core.hpp"

namespace entforge {

enum class GateKind {
  Rotation,   // exp(-i angle/2 axis.sigma)
  Hadamard,   // pi rotation about (x + z)/sqrt(2), times i so the nominal gate is exactly H
  Phase1,     // diag(exp(i phases[0]), exp(i phases[1]))
  Phase2,     // diag over (b1, b2) on (q1, q2): exp(i phases[b1 + 2 b2])
};

std::string_view to_string(GateKind kind);

struct Gate {
  GateKind kind = GateKind::Phase1;
  std::array<int, 2> qubits{0, -1};
  double angle = 0.0;                   // Rotation only
  std::array<double, 3> axis{0, 0, 1};  // Rotation only
  std::array<double, 4> phases{};       // Phase1 uses the first two

  static Gate rotation(int qubit, double angle, std::array<double, 3> axis);
  static Gate hadamard(int qubit);
  /// diag(1, exp(i phase))
  static Gate phase1(int qubit, double phase);
  /// diag(1, 1, 1, exp(i phase)) -- a controlled phase shift
  static Gate controlled_phase(int q1, int q2, double phase);

  bool diagonal() const { return kind == GateKind::Phase1 || kind == GateKind::Phase2; }
  int arity() const { return kind == GateKind::Phase2 ? 2 : 1; }
};

/// Unit rotation axis of a rotation-type gate.
std::array<double, 3> rotation_axis(const Gate& gate);
/// Rotation angle of a rotation-type gate.
double rotation_angle(const Gate& gate);

/// Exact 2x2 rotation exp(-i angle/2 axis.sigma); axis must be unit length.
Gate2x2 rotation_matrix(double angle, const std::array<double, 3>& axis);

/// Nominal (noise-free) 2x2 matrix of a one-qubit gate.
Gate2x2 nominal_matrix(const Gate& gate);

/// Applies one gate using its nominal matrix/phases.
void apply_gate(StateVector& state, const Gate& gate);

struct GateSequence {
  int n_qubits = 0;
  std::vector<Gate> gates;

  std::size_t gate_count() const { return gates.size(); }
  /// Appends `other` after this sequence.
  void append(const GateSequence& other);
  /// Inverse sequence (reversed order, conjugated gates).
  GateSequence inverse() const;
};

/// Quantum Fourier transform without the final qubit reversal:
/// |x> -> N^-1/2 sum_y exp(2 pi i x y / N) |reverse(y)>.
GateSequence qft_without_swaps(int n_qubits);

/// Gates realizing exp(i c (x - offset)^2) on the register value
/// x = sum_j b_j 2^j, dropping the constant (global) phase. Bit j of x lives
/// on physical qubit `layout[j]`.
GateSequence quadratic_phase(int n_qubits, double coefficient, double offset,
                             const std::vector<int>& layout);

/// Full 2^n x 2^n unitary of a noiseless sequence (column k = image of |k>).
Matrix sequence_unitary(const GateSequence& sequence);

}  // namespace entforge
