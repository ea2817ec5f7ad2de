#pragma once

// Monte-Carlo average over noise realizations:
//   rho = (1/R) sum_r |psi_r><psi_r|,
// where trajectory r evolves the initial state through the noisy circuit
// with parameters drawn from NoiseStream(master_seed, r).

#include <cstdint>
#include <optional>
#include <vector>

#include "entforge/quantum_core.hpp"
#include "entforge/sawtooth.hpp"

namespace entforge {

enum class BoundKind { Lower, Upper };

std::string_view to_string(BoundKind kind);

inline constexpr int kDefaultBatches = 8;
inline constexpr double kDefaultRealizationMultiplier = 4.0;

/// ceil(c sqrt(N)) trajectories for the lower bound, ceil(c N) for the upper.
std::size_t recommend_realizations(int n_qubits, BoundKind kind,
                                   double multiplier = kDefaultRealizationMultiplier);

struct TrajectoryOptions {
  int workers = 1;
  /// Realizations are split into this many contiguous batches. Each batch is
  /// accumulated sequentially and batches are merged in index order, so the
  /// result does not depend on `workers`.
  int batches = kDefaultBatches;
  bool keep_batches = false;
  bool build_density = true;
};

struct TrajectoryResult {
  StateVector ideal;                       // noiseless |psi_t>
  std::optional<DensityMatrix> rho;        // absent when build_density is false
  double fidelity = 1.0;                   // <psi_t|rho|psi_t>
  std::vector<double> trajectory_fidelities;
  std::vector<DensityMatrix> batch_rhos;   // each normalized to unit trace
  std::vector<std::size_t> batch_sizes;
  std::size_t gate_count = 0;              // per map step
  std::size_t noise_parameters = 0;        // per trajectory, all steps

  /// Unit-trace average of the first `count` batches.
  DensityMatrix merge_batches(std::size_t count) const;
};

TrajectoryResult run_trajectories(const MapParams& params, int steps, double epsilon,
                                  std::size_t n_realizations, std::uint64_t master_seed,
                                  const StateVector& initial, const TrajectoryOptions& options = {});

}  // namespace entforge
