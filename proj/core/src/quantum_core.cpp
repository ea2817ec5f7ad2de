#include "entforge/quantum_core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace entforge {

namespace {

int log2_exact(std::size_t n) {
  if (n == 0 || !std::has_single_bit(n)) {
    throw std::invalid_argument("dimension " + std::to_string(n) + " is not a power of two");
  }
  return std::countr_zero(n);
}

void check_qubit(int qubit, int n_qubits) {
  if (qubit < 0 || qubit >= n_qubits) {
    throw std::out_of_range("qubit " + std::to_string(qubit) + " out of range for " +
                            std::to_string(n_qubits) + " qubits");
  }
}

std::vector<std::uint64_t> deposit_table(std::uint64_t mask) {
  const int bits = std::popcount(mask);
  std::vector<std::uint64_t> table(std::size_t{1} << bits);
  for (std::size_t v = 0; v < table.size(); ++v) table[v] = deposit_bits(v, mask);
  return table;
}

double max_asymmetry(const Matrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

}  // namespace

// --- StateVector -------------------------------------------------------------

StateVector::StateVector(int n_qubits) : StateVector(basis(n_qubits, 0)) {}

StateVector::StateVector(int n_qubits, Vector amplitudes)
    : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {}

StateVector StateVector::basis(int n_qubits, std::uint64_t index) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw std::invalid_argument("n_qubits must be in [1, " + std::to_string(kMaxQubits) + "]");
  }
  const auto dim = std::uint64_t{1} << n_qubits;
  if (index >= dim) throw std::out_of_range("basis index out of range");
  Vector amps = Vector::Zero(static_cast<Eigen::Index>(dim));
  amps[static_cast<Eigen::Index>(index)] = 1.0;
  return StateVector(n_qubits, std::move(amps));
}

StateVector StateVector::from_amplitudes(Vector amplitudes) {
  const int n = log2_exact(static_cast<std::size_t>(amplitudes.size()));
  if (n < 1 || n > kMaxQubits) throw std::invalid_argument("unsupported qubit count");
  const double norm = amplitudes.norm();
  if (std::abs(norm - 1.0) > kNormTolerance) {
    throw std::invalid_argument("state is not normalized (norm " + std::to_string(norm) + ")");
  }
  return StateVector(n, std::move(amplitudes));
}

double overlap_probability(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("overlap: dimension mismatch");
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

// --- DensityMatrix -----------------------------------------------------------

DensityMatrix::DensityMatrix(int n_qubits, Matrix elements)
    : n_qubits_(n_qubits), elements_(std::move(elements)) {}

DensityMatrix DensityMatrix::from_matrix(Matrix elements) {
  if (elements.rows() != elements.cols()) throw std::invalid_argument("matrix is not square");
  const int n = log2_exact(static_cast<std::size_t>(elements.rows()));
  if (max_asymmetry(elements) > kHermitianTolerance) {
    throw std::invalid_argument("density matrix is not Hermitian");
  }
  if (std::abs(elements.trace() - Complex{1.0}) > kTraceTolerance) {
    throw std::invalid_argument("density matrix trace is not 1");
  }
  return DensityMatrix(n, std::move(elements));
}

DensityMatrix DensityMatrix::from_matrix_unchecked(Matrix elements) {
  const int n = log2_exact(static_cast<std::size_t>(elements.rows()));
  return DensityMatrix(n, std::move(elements));
}

DensityMatrix DensityMatrix::pure(const StateVector& state) {
  const Vector& v = state.amplitudes();
  return DensityMatrix(state.n_qubits(), v * v.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n_qubits);
  return DensityMatrix(n_qubits, Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix::InvariantReport DensityMatrix::check_invariants() const {
  InvariantReport report;
  report.hermitian_deviation = max_asymmetry(elements_);
  report.trace_deviation = std::abs(elements_.trace() - Complex{1.0});
  if (report.hermitian_deviation <= kSymmetrizeTolerance) {
    report.min_eigenvalue = hermitian_eigenvalues(elements_).minCoeff();
  } else {
    report.min_eigenvalue = -std::numeric_limits<double>::infinity();
  }
  return report;
}

// --- Bipartition -------------------------------------------------------------

Bipartition::Bipartition(int n_qubits, std::uint64_t a_mask) : n_qubits_(n_qubits) {
  if (n_qubits < 2 || n_qubits > kMaxQubits) {
    throw std::invalid_argument("bipartition needs between 2 and " + std::to_string(kMaxQubits) +
                                " qubits");
  }
  const std::uint64_t full = full_mask();
  if ((a_mask & ~full) != 0) throw std::invalid_argument("bipartition mask has stray bits");
  if (a_mask == 0 || a_mask == full) {
    throw std::invalid_argument("bipartition subsystems must both be nonempty");
  }
  a_mask_ = (a_mask & 1u) ? a_mask : (full & ~a_mask);
}

int Bipartition::size_a() const { return std::popcount(a_mask_); }

// --- gates -------------------------------------------------------------------

bool is_unitary(const Gate2x2& gate, double tolerance) {
  return (gate.adjoint() * gate - Gate2x2::Identity()).cwiseAbs().maxCoeff() <= tolerance;
}

namespace kernels {

void apply_one_qubit(std::span<Complex> amplitudes, int qubit, const Gate2x2& gate) {
  const std::size_t stride = std::size_t{1} << qubit;
  const Complex g00 = gate(0, 0), g01 = gate(0, 1), g10 = gate(1, 0), g11 = gate(1, 1);
  for (std::size_t base = 0; base < amplitudes.size(); base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) {
      const Complex a0 = amplitudes[i];
      const Complex a1 = amplitudes[i + stride];
      amplitudes[i] = g00 * a0 + g01 * a1;
      amplitudes[i + stride] = g10 * a0 + g11 * a1;
    }
  }
}

void apply_diagonal_one(std::span<Complex> amplitudes, int qubit,
                        const std::array<Complex, 2>& diagonal) {
  const std::size_t stride = std::size_t{1} << qubit;
  for (std::size_t base = 0; base < amplitudes.size(); base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) {
      amplitudes[i] *= diagonal[0];
      amplitudes[i + stride] *= diagonal[1];
    }
  }
}

void apply_diagonal_two(std::span<Complex> amplitudes, int q1, int q2,
                        const std::array<Complex, 4>& diagonal) {
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    const std::size_t sel = ((i >> q1) & 1u) | (((i >> q2) & 1u) << 1);
    amplitudes[i] *= diagonal[sel];
  }
}

}  // namespace kernels

StateVector apply_one_qubit_gate(const StateVector& state, int qubit, const Gate2x2& gate,
                                 bool check_unitary) {
  check_qubit(qubit, state.n_qubits());
  if (check_unitary && !is_unitary(gate)) throw std::invalid_argument("gate is not unitary");
  StateVector out = state;
  kernels::apply_one_qubit(out.data(), qubit, gate);
  return out;
}

StateVector apply_two_qubit_phase(const StateVector& state, int q1, int q2,
                                  const std::array<double, 4>& phases) {
  check_qubit(q1, state.n_qubits());
  check_qubit(q2, state.n_qubits());
  if (q1 == q2) throw std::invalid_argument("two-qubit phase gate needs distinct qubits");
  std::array<Complex, 4> diagonal;
  for (std::size_t s = 0; s < 4; ++s) diagonal[s] = std::polar(1.0, phases[s]);
  StateVector out = state;
  kernels::apply_diagonal_two(out.data(), q1, q2, diagonal);
  return out;
}

// --- subsystems --------------------------------------------------------------

std::uint64_t deposit_bits(std::uint64_t value, std::uint64_t mask) {
  std::uint64_t out = 0;
  for (std::uint64_t bit = 1; mask != 0; bit <<= 1) {
    const std::uint64_t lowest = mask & (~mask + 1);
    if (value & bit) out |= lowest;
    mask &= mask - 1;
  }
  return out;
}

DensityMatrix reduced_density_matrix(const StateVector& state, const Bipartition& part,
                                     Side keep) {
  if (part.n_qubits() != state.n_qubits()) {
    throw std::invalid_argument("reduced_density_matrix: bipartition/state size mismatch");
  }
  const std::uint64_t kept = keep == Side::A ? part.a_mask() : part.b_mask();
  const std::uint64_t traced = part.full_mask() & ~kept;
  const auto kept_idx = deposit_table(kept);
  const auto traced_idx = deposit_table(traced);

  // Amplitudes reshaped as (kept x traced); rho = M M^dagger.
  Matrix m(static_cast<Eigen::Index>(kept_idx.size()), static_cast<Eigen::Index>(traced_idx.size()));
  const auto& psi = state.amplitudes();
  for (std::size_t o = 0; o < traced_idx.size(); ++o) {
    for (std::size_t k = 0; k < kept_idx.size(); ++k) {
      m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(o)) =
          psi[static_cast<Eigen::Index>(kept_idx[k] | traced_idx[o])];
    }
  }
  Matrix rho = m * m.adjoint();
  return DensityMatrix::from_matrix_unchecked(std::move(rho));
}

DensityMatrix reduced_density_matrix(const DensityMatrix& rho, const Bipartition& part,
                                     Side keep) {
  if (part.n_qubits() != rho.n_qubits()) {
    throw std::invalid_argument("reduced_density_matrix: bipartition/matrix size mismatch");
  }
  const std::uint64_t kept = keep == Side::A ? part.a_mask() : part.b_mask();
  const std::uint64_t traced = part.full_mask() & ~kept;
  const auto kept_idx = deposit_table(kept);
  const auto traced_idx = deposit_table(traced);

  const auto dk = static_cast<Eigen::Index>(kept_idx.size());
  Matrix out = Matrix::Zero(dk, dk);
  const Matrix& full = rho.matrix();
  for (Eigen::Index c = 0; c < dk; ++c) {
    for (Eigen::Index r = 0; r < dk; ++r) {
      Complex sum{0.0};
      for (const std::uint64_t o : traced_idx) {
        sum += full(static_cast<Eigen::Index>(kept_idx[static_cast<std::size_t>(r)] | o),
                    static_cast<Eigen::Index>(kept_idx[static_cast<std::size_t>(c)] | o));
      }
      out(r, c) = sum;
    }
  }
  return DensityMatrix::from_matrix_unchecked(std::move(out));
}

Matrix partial_transpose(const Matrix& m, const Bipartition& part) {
  const auto dim = static_cast<std::uint64_t>(m.rows());
  if (m.rows() != m.cols() || dim != (std::uint64_t{1} << part.n_qubits())) {
    throw std::invalid_argument("partial_transpose: dimension mismatch");
  }
  const std::uint64_t a = part.a_mask();
  const std::uint64_t b = part.b_mask();
  Matrix out(m.rows(), m.cols());
  for (std::uint64_t j = 0; j < dim; ++j) {
    for (std::uint64_t i = 0; i < dim; ++i) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          m(static_cast<Eigen::Index>((i & a) | (j & b)),
            static_cast<Eigen::Index>((j & a) | (i & b)));
    }
  }
  return out;
}

Matrix partial_transpose(const DensityMatrix& rho, const Bipartition& part) {
  if (rho.n_qubits() != part.n_qubits()) {
    throw std::invalid_argument("partial_transpose: dimension mismatch");
  }
  return partial_transpose(rho.matrix(), part);
}

// --- spectral quantities -----------------------------------------------------

Eigen::VectorXd hermitian_eigenvalues(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("eigenvalues: matrix is not square");
  if (m.size() == 0) return {};
  const double asym = max_asymmetry(m);
  if (!(asym <= kSymmetrizeTolerance)) {
    throw std::domain_error("eigenvalues: matrix is not Hermitian (asymmetry " +
                            std::to_string(asym) + ")");
  }
  const Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  return solver.eigenvalues();
}

double entropy_bits(const Eigen::VectorXd& eigenvalues) {
  double s = 0.0;
  for (const double raw : eigenvalues) {
    const double p = std::clamp(raw, 0.0, 1.0);
    if (p < kEigenvalueCutoff) continue;
    s -= p * std::log2(p);
  }
  return s;
}

double von_neumann_entropy(const DensityMatrix& rho) {
  return entropy_bits(hermitian_eigenvalues(rho.matrix()));
}

double trace_norm(const Matrix& m) { return hermitian_eigenvalues(m).cwiseAbs().sum(); }

double fidelity(const StateVector& ideal, const DensityMatrix& rho) {
  if (ideal.dim() != rho.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
  const Vector& psi = ideal.amplitudes();
  const double f = psi.dot(rho.matrix() * psi).real();
  return std::clamp(f, 0.0, 1.0);
}

// --- DensityAccumulator ------------------------------------------------------

DensityAccumulator::DensityAccumulator(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) throw std::invalid_argument("bad qubit count");
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n_qubits);
  lower_ = Matrix::Zero(dim, dim);
}

void DensityAccumulator::add(const StateVector& state, double weight) {
  if (state.n_qubits() != n_qubits_) throw std::invalid_argument("accumulate: dimension mismatch");
  if (!(weight > 0.0)) throw std::invalid_argument("accumulate: weight must be positive");
  lower_.selfadjointView<Eigen::Lower>().rankUpdate(state.amplitudes(), weight);
  total_weight_ += weight;
  ++count_;
}

void DensityAccumulator::merge(const DensityAccumulator& other) {
  if (other.n_qubits_ != n_qubits_) throw std::invalid_argument("merge: dimension mismatch");
  lower_.triangularView<Eigen::Lower>() += other.lower_;
  total_weight_ += other.total_weight_;
  count_ += other.count_;
}

DensityMatrix DensityAccumulator::finish(double scale) const {
  Matrix full = lower_.selfadjointView<Eigen::Lower>();
  if (scale != 1.0) full *= scale;
  for (Eigen::Index i = 0; i < full.rows(); ++i) full(i, i) = full(i, i).real();
  return DensityMatrix::from_matrix_unchecked(std::move(full));
}

void accumulate_projector(DensityAccumulator& acc, const StateVector& state, double weight) {
  acc.add(state, weight);
}

}  // namespace entforge
