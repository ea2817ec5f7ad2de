#include "entforge/validation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "entforge/entanglement.hpp"
#include "entforge/experiments.hpp"
#include "entforge/sawtooth.hpp"
#include "entforge/trajectories.hpp"

namespace entforge {

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

Outcome norm_preservation(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  StateVector psi = haar_random_state(5, seed);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const int q = static_cast<int>(rng() % 5);
    const double th = angle(rng), ph = angle(rng);
    const std::array<double, 3> axis{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
    apply_gate(psi, Gate::rotation(q, angle(rng), axis));
    const int q2 = static_cast<int>((q + 1 + rng() % 4) % 5);
    apply_gate(psi, Gate::controlled_phase(q, q2, angle(rng)));
    worst = std::max(worst, std::abs(psi.norm() - 1.0));
  }
  return {worst <= kNormTolerance, "max |norm - 1| = " + fmt(worst)};
}

Outcome density_invariants(std::uint64_t seed) {
  const MapParams params = MapParams::make(4);
  const auto traj = run_trajectories(params, 10, 0.03, 32, seed, momentum_eigenstate(params, 0));
  const auto report = traj.rho->check_invariants();
  const auto reduced = reduced_density_matrix(*traj.rho, Bipartition(4, 0b0011)).check_invariants();
  std::ostringstream os;
  os << "hermitian " << report.hermitian_deviation << ", trace " << report.trace_deviation
     << ", min eigenvalue " << report.min_eigenvalue;
  return {report.ok() && reduced.ok(), os.str()};
}

Outcome entropy_symmetry(std::uint64_t seed) {
  const int n = 6;
  const StateVector psi = haar_random_state(n, seed + 1);
  double worst = 0.0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n) - 1; mask += 2) {
    const Bipartition part(n, mask);
    const double a = von_neumann_entropy(reduced_density_matrix(psi, part, Side::A));
    const double b = von_neumann_entropy(reduced_density_matrix(psi, part, Side::B));
    worst = std::max(worst, std::abs(a - b));
  }
  return {worst <= 1e-9, "max |S_A - S_B| = " + fmt(worst)};
}

Outcome transpose_involution(std::uint64_t seed) {
  const MapParams params = MapParams::make(4);
  const auto traj = run_trajectories(params, 5, 0.05, 16, seed, momentum_eigenstate(params, 0));
  double worst = 0.0, trace_err = 0.0;
  for (const auto& part : enumerate_balanced_bipartitions(4)) {
    const Matrix pt = partial_transpose(*traj.rho, part);
    worst = std::max(worst, (partial_transpose(pt, part) - traj.rho->matrix()).cwiseAbs().maxCoeff());
    trace_err = std::max(trace_err, std::abs(pt.trace() - traj.rho->matrix().trace()));
  }
  return {worst == 0.0 && trace_err <= 1e-12,
          "max |PT(PT(rho)) - rho| = " + fmt(worst) + ", trace change " + fmt(trace_err)};
}

Outcome bound_ordering(std::uint64_t seed, int workers) {
  const MapParams params = MapParams::make(4);
  const StateVector initial = momentum_eigenstate(params, 0);
  double worst = -1.0;
  bool pure_ok = true;
  for (const double eps : {0.0, 0.01, 0.05, 0.2}) {
    const auto traj = run_trajectories(params, 8, eps, 16, seed, initial);
    const auto spec = mixed_spectrum(*traj.rho, workers);
    for (std::size_t i = 0; i < spec.lower.size(); ++i) {
      worst = std::max(worst, spec.lower[i] - spec.upper[i]);
    }
  }
  // Pure states: the lower bound equals the subsystem entropy.
  const StateVector psi = haar_random_state(4, seed + 2);
  for (const auto& part : enumerate_balanced_bipartitions(4)) {
    const auto b = distillable_bounds(DensityMatrix::pure(psi), part);
    const double s = von_neumann_entropy(reduced_density_matrix(psi, part));
    pure_ok = pure_ok && std::abs(b.lower - s) <= 1e-9 && b.upper >= b.lower - 1e-9;
  }
  return {worst <= 1e-9 && pure_ok, "max (E_m - E_M) = " + fmt(worst)};
}

Outcome fano_inequality(std::uint64_t seed) {
  double worst = -1e300;
  for (const int n : {2, 4}) {
    const MapParams params = MapParams::make(n);
    for (const double eps : {0.01, 0.05, 0.1}) {
      const auto traj = run_trajectories(params, 10, eps, 24, seed, momentum_eigenstate(params, 0));
      const double s = von_neumann_entropy(*traj.rho);
      const double f = std::clamp(traj.fidelity, 0.0, 1.0);
      worst = std::max(worst, s - fano_entropy_bound(f, n));
    }
  }
  return {worst <= 1e-9, "max (S - Fano bound) = " + fmt(worst)};
}

Outcome bipartition_counts() {
  for (int n = 2; n <= 12; n += 2) {
    const auto parts = enumerate_balanced_bipartitions(n);
    if (parts.size() != balanced_bipartition_count(n)) return {false, "mismatch at n_q = " + std::to_string(n)};
    for (const auto& p : parts) {
      if (!p.balanced() || (p.a_mask() & 1) == 0) return {false, "non-canonical mask at n_q = " + std::to_string(n)};
    }
  }
  return {true, "n_q = 2..12"};
}

Outcome determinism(std::uint64_t seed) {
  const MapParams params = MapParams::make(4);
  const StateVector initial = momentum_eigenstate(params, 0);
  TrajectoryOptions one, many;
  many.workers = 3;
  const auto a = run_trajectories(params, 6, 0.04, 20, seed, initial, one);
  const auto b = run_trajectories(params, 6, 0.04, 20, seed, initial, one);
  const auto c = run_trajectories(params, 6, 0.04, 20, seed, initial, many);
  const auto d = run_trajectories(params, 6, 0.04, 20, seed + 1, initial, one);
  const bool same = a.rho->matrix() == b.rho->matrix() && a.rho->matrix() == c.rho->matrix() &&
                    a.trajectory_fidelities == c.trajectory_fidelities;
  const bool differs = a.rho->matrix() != d.rho->matrix();
  return {same && differs, same ? (differs ? "bit-identical across runs and worker counts" : "seed has no effect")
                                : "results differ between identical runs"};
}

Outcome oracle_equivalence(std::uint64_t seed) {
  double worst = 0.0;
  for (int n = 2; n <= 6; ++n) {
    const MapParams params = MapParams::make(n);
    const StateVector psi = haar_random_state(n, seed + 10 + static_cast<std::uint64_t>(n));
    const double o = overlap_probability(evolve_exact(psi, params, 10),
                                         evolve_circuit(psi, build_step_circuit(params), 10));
    worst = std::max(worst, 1.0 - o);
  }
  return {worst <= 1e-9, "max (1 - overlap) = " + fmt(worst)};
}

Outcome initial_state_independence() {
  // Chaos makes the choice of momentum eigenstate irrelevant at late times.
  const MapParams params = MapParams::make(8);
  const double a = stats(pure_spectrum(evolve_exact(momentum_eigenstate(params, 0), params, 30))).mean;
  const double b = stats(pure_spectrum(evolve_exact(momentum_eigenstate(params, 17), params, 30))).mean;
  return {std::abs(a - b) <= 0.15, "n_q = 8, t = 30: " + fmt(a) + " vs " + fmt(b)};
}

}  // namespace

std::vector<CheckResult> run_property_suite(std::uint64_t seed, int workers) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"norm preservation", [&] { return norm_preservation(seed); }},
      {"density-matrix invariants", [&] { return density_invariants(seed); }},
      {"pure-state entropy symmetry", [&] { return entropy_symmetry(seed); }},
      {"partial-transpose involution", [&] { return transpose_involution(seed); }},
      {"bound ordering", [&] { return bound_ordering(seed, workers); }},
      {"fano inequality", [&] { return fano_inequality(seed); }},
      {"bipartition counts", [] { return bipartition_counts(); }},
      {"determinism", [&] { return determinism(seed); }},
      {"oracle equivalence", [&] { return oracle_equivalence(seed); }},
      {"initial-state independence", [] { return initial_state_independence(); }},
  };
  std::vector<CheckResult> out;
  for (const auto& [name, run] : checks) {
    try {
      const Outcome o = run();
      out.push_back({name, o.passed, o.detail});
    } catch (const std::exception& e) {
      out.push_back({name, false, std::string("exception: ") + e.what()});
    }
  }
  return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
}

}  // namespace entforge
