#pragma once

// Dense state-vector and density-matrix primitives.
//
// Qubit j is bit j of a basis-state index (qubit 0 is least significant).

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace entforge {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using Gate2x2 = Eigen::Matrix2cd;

inline constexpr double kNormTolerance = 1e-10;
inline constexpr double kHermitianTolerance = 1e-10;
inline constexpr double kTraceTolerance = 1e-10;
inline constexpr double kPsdTolerance = 1e-8;
// Asymmetry below this is rounding noise and gets symmetrized away before
// eigendecomposition; anything larger is a caller error.
inline constexpr double kSymmetrizeTolerance = 1e-9;
inline constexpr double kEigenvalueCutoff = 1e-12;

#ifdef NDEBUG
inline constexpr bool kCheckUnitarity = false;
#else
inline constexpr bool kCheckUnitarity = true;
#endif

inline constexpr int kMaxQubits = 24;

class StateVector {
 public:
  /// |0...0> on n_qubits.
  explicit StateVector(int n_qubits);

  static StateVector basis(int n_qubits, std::uint64_t index);
  /// Takes ownership of amplitudes; length must be a power of two and the
  /// norm must be 1 within kNormTolerance.
  static StateVector from_amplitudes(Vector amplitudes);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }

  const Vector& amplitudes() const { return amplitudes_; }
  Complex operator[](std::size_t i) const { return amplitudes_[static_cast<Eigen::Index>(i)]; }

  // Raw access for in-place kernels. Callers are responsible for keeping the
  // state normalized.
  std::span<Complex> data() { return {amplitudes_.data(), dim()}; }
  std::span<const Complex> data() const { return {amplitudes_.data(), dim()}; }

  double norm() const { return amplitudes_.norm(); }

 private:
  StateVector(int n_qubits, Vector amplitudes);

  int n_qubits_;
  Vector amplitudes_;
};

/// |<a|b>|^2.
double overlap_probability(const StateVector& a, const StateVector& b);

class DensityMatrix {
 public:
  /// Validates Hermiticity and unit trace. PSD is checked by
  /// check_invariants(), which needs an eigendecomposition.
  static DensityMatrix from_matrix(Matrix elements);
  static DensityMatrix pure(const StateVector& state);
  static DensityMatrix maximally_mixed(int n_qubits);
  /// Skips validation. For results that are valid by construction.
  static DensityMatrix from_matrix_unchecked(Matrix elements);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return static_cast<std::size_t>(elements_.rows()); }
  const Matrix& matrix() const { return elements_; }
  Complex operator()(std::size_t i, std::size_t j) const {
    return elements_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  double trace() const { return elements_.trace().real(); }

  struct InvariantReport {
    double hermitian_deviation = 0.0;
    double trace_deviation = 0.0;
    double min_eigenvalue = 0.0;
    bool ok() const {
      return hermitian_deviation <= kHermitianTolerance && trace_deviation <= kTraceTolerance &&
             min_eigenvalue >= -kPsdTolerance;
    }
  };
  InvariantReport check_invariants() const;

 private:
  DensityMatrix(int n_qubits, Matrix elements);

  int n_qubits_;
  Matrix elements_;
};

/// Subsystem split (A, B) stored as a bitmask of A's qubits. Canonical form
/// keeps qubit 0 in A; constructing from a mask without qubit 0 stores the
/// complement.
class Bipartition {
 public:
  Bipartition(int n_qubits, std::uint64_t a_mask);

  int n_qubits() const { return n_qubits_; }
  std::uint64_t a_mask() const { return a_mask_; }
  std::uint64_t b_mask() const { return full_mask() & ~a_mask_; }
  std::uint64_t full_mask() const { return (std::uint64_t{1} << n_qubits_) - 1; }
  int size_a() const;
  int size_b() const { return n_qubits_ - size_a(); }
  bool balanced() const { return 2 * size_a() == n_qubits_; }

  friend bool operator==(const Bipartition&, const Bipartition&) = default;

 private:
  int n_qubits_;
  std::uint64_t a_mask_;
};

enum class Side { A, B };

// --- gates -----------------------------------------------------------------

StateVector apply_one_qubit_gate(const StateVector& state, int qubit, const Gate2x2& gate,
                                 bool check_unitary = kCheckUnitarity);

/// Diagonal two-qubit gate: basis states with bits (b1, b2) on (q1, q2) pick
/// up exp(i * phases[b1 + 2 * b2]).
StateVector apply_two_qubit_phase(const StateVector& state, int q1, int q2,
                                  const std::array<double, 4>& phases);

bool is_unitary(const Gate2x2& gate, double tolerance = kNormTolerance);

namespace kernels {

void apply_one_qubit(std::span<Complex> amplitudes, int qubit, const Gate2x2& gate);
void apply_diagonal_one(std::span<Complex> amplitudes, int qubit,
                        const std::array<Complex, 2>& diagonal);
void apply_diagonal_two(std::span<Complex> amplitudes, int q1, int q2,
                        const std::array<Complex, 4>& diagonal);

}  // namespace kernels

// --- subsystems --------------------------------------------------------------

/// Scatters the low bits of `value` into the set bit positions of `mask`.
std::uint64_t deposit_bits(std::uint64_t value, std::uint64_t mask);

DensityMatrix reduced_density_matrix(const StateVector& state, const Bipartition& part,
                                     Side keep = Side::A);
DensityMatrix reduced_density_matrix(const DensityMatrix& rho, const Bipartition& part,
                                     Side keep = Side::A);

/// Transposes the B indices only. The result is Hermitian with unit trace
/// but generally not positive.
Matrix partial_transpose(const DensityMatrix& rho, const Bipartition& part);
Matrix partial_transpose(const Matrix& m, const Bipartition& part);

// --- spectral quantities ---------------------------------------------------

/// Ascending eigenvalues of a Hermitian matrix. Rounding asymmetry up to
/// kSymmetrizeTolerance is removed first; larger asymmetry throws.
Eigen::VectorXd hermitian_eigenvalues(const Matrix& m);

/// Shannon entropy in bits of a probability spectrum, with eigenvalues
/// clipped to [0, 1] and those below kEigenvalueCutoff dropped.
double entropy_bits(const Eigen::VectorXd& eigenvalues);

double von_neumann_entropy(const DensityMatrix& rho);
double trace_norm(const Matrix& m);
double fidelity(const StateVector& ideal, const DensityMatrix& rho);

/// Running sum of weighted projectors. Only the lower triangle is touched
/// until finish().
class DensityAccumulator {
 public:
  explicit DensityAccumulator(int n_qubits);

  void add(const StateVector& state, double weight);
  /// Adds another accumulator's sum. Merging in a fixed order gives
  /// reproducible results.
  void merge(const DensityAccumulator& other);

  int n_qubits() const { return n_qubits_; }
  double total_weight() const { return total_weight_; }
  std::size_t count() const { return count_; }

  /// The accumulated matrix scaled by `scale`. With scale = 1 and weights
  /// summing to one this is a valid density matrix.
  DensityMatrix finish(double scale = 1.0) const;

 private:
  int n_qubits_;
  Matrix lower_;
  double total_weight_ = 0.0;
  std::size_t count_ = 0;
};

void accumulate_projector(DensityAccumulator& acc, const StateVector& state, double weight);

}  // namespace entforge
