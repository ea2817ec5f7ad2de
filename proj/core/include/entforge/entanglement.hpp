#pragma once

// Entanglement over balanced bipartitions, distillable-entanglement bounds,
// Haar-random reference states and Fano-based analytic predictions. All
// entropies are in bits.

#include <cstdint>
#include <span>
#include <vector>

#include "entforge/quantum_core.hpp"
#include "entforge/trajectories.hpp"

namespace entforge {

struct EntanglementSample {
  Bipartition bipartition;
  double value = 0.0;
};

struct EntanglementStats {
  double mean = 0.0;
  double std_dev = 0.0;       // population standard deviation
  double relative_std = 0.0;  // std_dev / mean, 0 when mean is 0
  std::size_t count = 0;
};

/// All subsets of n_q/2 qubits containing qubit 0, ordered by mask.
std::vector<Bipartition> enumerate_balanced_bipartitions(int n_qubits);

/// C(n, n/2) / 2.
std::size_t balanced_bipartition_count(int n_qubits);

/// S(rho_A) for every balanced bipartition.
std::vector<EntanglementSample> pure_spectrum(const StateVector& state, int workers = 1);

/// Average balanced entropy of a Haar-random state in the large-N limit,
/// n_q/2 - 1/(2 ln 2).
double page_value(int n_qubits);

/// Exact finite-size mean entropy of an m-level subsystem of a Haar-random
/// state on m*n levels (m <= n), in bits.
double page_exact(std::size_t m, std::size_t n);

/// Normalized vector of i.i.d. complex standard normals, seeded mt19937_64.
StateVector haar_random_state(int n_qubits, std::uint64_t seed);

struct DistillableBounds {
  double lower = 0.0;  // max(S(rho_A) - S(rho), 0)
  double upper = 0.0;  // log2 || rho^{T_B} ||_1
};

DistillableBounds distillable_bounds(const DensityMatrix& rho, const Bipartition& part);

struct MixedSpectrum {
  std::vector<Bipartition> bipartitions;
  std::vector<double> lower;
  std::vector<double> upper;
  double total_entropy = 0.0;  // S(rho)
  EntanglementStats lower_stats;
  EntanglementStats upper_stats;
};

/// Bounds over every balanced bipartition, ordered by mask.
MixedSpectrum mixed_spectrum(const DensityMatrix& rho, int workers = 1);

EntanglementStats stats(std::span<const double> values);
EntanglementStats stats(std::span<const EntanglementSample> samples);

struct Histogram {
  double origin = 0.0;
  double bin_width = 0.0;
  std::vector<std::size_t> counts;
  std::vector<double> density;  // sum(density) * bin_width == 1

  double bin_low(std::size_t i) const { return origin + bin_width * static_cast<double>(i); }
};

/// (max - min) / 25, or 0.01 when all values coincide.
double default_bin_width(std::span<const double> values);

/// Bins start at floor(min / width) * width.
Histogram histogram(std::span<const double> values, double bin_width);

double binary_entropy(double x);

/// h(F) + (1 - F) log2(4^n_q - 1).
double fano_entropy_bound(double fidelity, int n_qubits);

struct Prediction {
  double value = 0.0;
  bool in_regime = true;  // false when gamma eps^2 n_g t >= 1
};

/// x [-log2 x + 2 n_q + 1/ln 2] with x = gamma eps^2 n_g t.
Prediction predicted_entropy(double epsilon, int n_qubits, int steps, double gamma, double gate_count);

/// page_value(n_q) - 6 gamma n_q^3 eps^2 t. May be negative.
double predicted_lower_bound(double epsilon, int n_qubits, int steps, double gamma);

/// Large-n_q half-value threshold of predicted_lower_bound, 1/sqrt(24 gamma n_q^2 t).
double analytic_threshold(int n_qubits, int steps, double gamma);

/// Exact root of predicted_lower_bound(eps) = page_value / 2.
double predicted_half_crossing(int n_qubits, int steps, double gamma);

inline constexpr double kReferenceGamma = 0.28;

}  // namespace entforge
