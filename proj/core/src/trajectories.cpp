#include "entforge/trajectories.hpp"

#include <cmath>
#include <stdexcept>

#include "entforge/parallel.hpp"

namespace entforge {

std::string_view to_string(BoundKind kind) { return kind == BoundKind::Lower ? "lower" : "upper"; }

std::size_t recommend_realizations(int n_qubits, BoundKind kind, double multiplier) {
  if (n_qubits < 2) throw std::invalid_argument("recommend_realizations: need n_q >= 2");
  if (!(multiplier > 0.0)) throw std::invalid_argument("recommend_realizations: multiplier must be > 0");
  const double levels = std::ldexp(1.0, n_qubits);
  const double base = kind == BoundKind::Lower ? std::sqrt(levels) : levels;
  return static_cast<std::size_t>(std::ceil(multiplier * base));
}

DensityMatrix TrajectoryResult::merge_batches(std::size_t count) const {
  if (count == 0 || count > batch_rhos.size()) throw std::out_of_range("merge_batches: bad batch count");
  Matrix sum = Matrix::Zero(batch_rhos[0].matrix().rows(), batch_rhos[0].matrix().cols());
  double total = 0.0;
  for (std::size_t b = 0; b < count; ++b) {
    const auto w = static_cast<double>(batch_sizes[b]);
    sum += w * batch_rhos[b].matrix();
    total += w;
  }
  sum /= total;
  return DensityMatrix::from_matrix_unchecked(std::move(sum));
}

TrajectoryResult run_trajectories(const MapParams& params, int steps, double epsilon,
                                  std::size_t n_realizations, std::uint64_t master_seed,
                                  const StateVector& initial, const TrajectoryOptions& options) {
  if (n_realizations == 0) throw std::invalid_argument("run_trajectories: need at least one realization");
  if (steps < 0) throw std::invalid_argument("run_trajectories: negative step count");
  if (initial.n_qubits() != params.n_qubits) {
    throw std::invalid_argument("run_trajectories: initial state size mismatch");
  }
  const NoiseModel model(epsilon);
  const GateSequence circuit = build_step_circuit(params);

  TrajectoryResult result{.ideal = evolve_circuit(initial, circuit, steps), .rho = {}, .trajectory_fidelities = {},
                          .batch_rhos = {}, .batch_sizes = {}};
  result.gate_count = circuit.gate_count();
  result.noise_parameters = noise_parameter_count(circuit) * static_cast<std::size_t>(steps);
  result.trajectory_fidelities.assign(n_realizations, 0.0);

  const std::size_t batches =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(1, options.batches)), n_realizations);
  const double weight = 1.0 / static_cast<double>(n_realizations);

  std::vector<std::optional<DensityAccumulator>> accumulators(batches);
  std::vector<std::size_t> batch_begin(batches + 1);
  for (std::size_t b = 0; b <= batches; ++b) batch_begin[b] = b * n_realizations / batches;

  parallel_for(batches, options.workers, [&](std::size_t b) {
    if (options.build_density) accumulators[b].emplace(params.n_qubits);
    for (std::size_t r = batch_begin[b]; r < batch_begin[b + 1]; ++r) {
      const NoisySchedule schedule{model, NoiseStream(master_seed, r), 0};
      const StateVector psi = evolve_circuit(initial, circuit, steps, schedule);
      result.trajectory_fidelities[r] = overlap_probability(result.ideal, psi);
      if (accumulators[b]) accumulators[b]->add(psi, weight);
    }
  });

  double fsum = 0.0;
  for (const double f : result.trajectory_fidelities) fsum += f;
  result.fidelity = fsum / static_cast<double>(n_realizations);

  if (options.build_density) {
    DensityAccumulator total(params.n_qubits);
    for (std::size_t b = 0; b < batches; ++b) {
      total.merge(*accumulators[b]);
      if (options.keep_batches) {
        const std::size_t size = batch_begin[b + 1] - batch_begin[b];
        result.batch_rhos.push_back(
            accumulators[b]->finish(static_cast<double>(n_realizations) / static_cast<double>(size)));
        result.batch_sizes.push_back(size);
      }
    }
    result.rho = total.finish();
  }
  return result;
}

}  // namespace entforge
