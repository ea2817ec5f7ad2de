#include "entforge/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <stdexcept>

#include "entforge/noise.hpp"

namespace entforge {

namespace {

void require_even_sizes(std::span<const int> qubits, int minimum) {
  for (const int n : qubits) {
    if (n % 2 != 0) throw std::invalid_argument("balanced bipartitions require even n_q");
    if (n < minimum) {
      throw std::invalid_argument("n_q must be at least " + std::to_string(minimum));
    }
  }
}

void require_mixed_size(const ExperimentConfig& config, int n_qubits) {
  const int limit = config.allow_large_mixed ? kMaxLargeMixedQubits : kMaxMixedQubits;
  if (n_qubits > limit) {
    throw std::invalid_argument("density-matrix runs are limited to n_q <= " + std::to_string(limit) +
                                (config.allow_large_mixed ? "" : " (n_q = 10 needs allow_large_mixed)"));
  }
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Standard error of the mean of batch estimates.
double batch_stderr(std::span<const double> batch_means) {
  const std::size_t b = batch_means.size();
  if (b < 2) return 0.0;
  const double m = mean_of(batch_means);
  double sq = 0.0;
  for (const double x : batch_means) sq += (x - m) * (x - m);
  return std::sqrt(sq / static_cast<double>(b - 1) / static_cast<double>(b));
}

double relative_drift(double half, double full, double reference) {
  const double scale = std::abs(reference) > 0.0 ? std::abs(reference) : 1.0;
  return std::abs(half - full) / scale;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (qubit_range.empty()) throw std::invalid_argument("qubit_range is empty");
  for (const int n : qubit_range) {
    if (n < 1 || n > kMaxQubits) throw std::invalid_argument("n_q out of range: " + std::to_string(n));
  }
  if (steps < 0) throw std::invalid_argument("steps must be nonnegative");
  for (const int t : step_list) {
    if (t < 0) throw std::invalid_argument("steps must be nonnegative");
  }
  for (std::size_t i = 0; i < epsilon_grid.size(); ++i) {
    if (!(epsilon_grid[i] >= 0.0) || !std::isfinite(epsilon_grid[i])) {
      throw std::invalid_argument("epsilon grid entries must be finite and nonnegative");
    }
    if (i > 0 && !(epsilon_grid[i] > epsilon_grid[i - 1])) {
      throw std::invalid_argument("epsilon grid must be strictly increasing");
    }
  }
  if (realizations && *realizations == 0) throw std::invalid_argument("realizations must be positive");
  if (!(realization_multiplier > 0.0)) throw std::invalid_argument("realization multiplier must be positive");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (haar_samples < 1) throw std::invalid_argument("haar_samples must be >= 1");
  if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0)) {
    throw std::invalid_argument("threshold fraction must lie in (0, 1)");
  }
}

std::vector<int> ExperimentConfig::resolved_steps() const {
  return step_list.empty() ? std::vector<int>{steps} : step_list;
}

StateVector momentum_eigenstate(const MapParams& params, std::int64_t momentum) {
  return StateVector::basis(params.n_qubits, momentum_index(momentum, params));
}

// --- generation --------------------------------------------------------------

ConvergenceFit fit_convergence(std::span<const double> mean_entropy, double asymptote) {
  const std::size_t count = mean_entropy.size();
  if (count < 4) throw std::invalid_argument("fit_convergence: need at least 4 time points");
  const std::size_t t_max = count - 1;

  double sq = 0.0;
  std::size_t late = 0;
  for (std::size_t t = t_max / 2; t <= t_max; ++t, ++late) {
    const double g = asymptote - mean_entropy[t];
    sq += g * g;
  }
  ConvergenceFit out;
  out.floor = std::sqrt(sq / static_cast<double>(late));

  std::size_t end = 1;
  while (end < count && std::abs(asymptote - mean_entropy[end]) > out.floor) ++end;
  end = std::clamp<std::size_t>(end, 3, count);

  std::vector<Point> points;
  for (std::size_t t = 0; t < end; ++t) {
    const double g = std::abs(asymptote - mean_entropy[t]);
    if (g > 0.0) points.emplace_back(static_cast<double>(t), g);
  }
  out.window = end;
  out.fit = fit_exponential(points);
  out.tau = out.fit.exponent_or_rate > 0.0 ? 1.0 / out.fit.exponent_or_rate
                                           : std::numeric_limits<double>::infinity();
  return out;
}

GenerationResult run_generation(const ExperimentConfig& config) {
  config.validate();
  require_even_sizes(config.qubit_range, 2);
  GenerationResult result;
  for (const int n : config.qubit_range) {
    const MapParams params = MapParams::make(n, config.chaos);
    GenerationSeries series;
    series.n_qubits = n;
    series.page = page_value(n);
    StateVector psi = momentum_eigenstate(params, config.initial_momentum);
    for (int t = 0; t <= config.steps; ++t) {
      if (t > 0) psi = evolve_exact(psi, params, 1);
      series.mean_entropy.push_back(stats(pure_spectrum(psi, config.workers)).mean);
    }
    if (series.mean_entropy.size() >= 4) series.convergence = fit_convergence(series.mean_entropy, series.page);
    result.series.push_back(std::move(series));
  }
  if (result.series.size() >= 3 && config.steps >= 3) {
    std::vector<Point> pts;
    for (const auto& s : result.series) pts.emplace_back(s.n_qubits, s.convergence.tau);
    result.tau_linear_fit = fit_linear(pts);
  }
  return result;
}

// --- spectrum ------------------------------------------------------------------

SpectrumResult run_spectrum(const ExperimentConfig& config) {
  config.validate();
  require_even_sizes(config.qubit_range, 4);
  if (config.qubit_range.size() < 3) throw std::invalid_argument("spectrum fit needs at least 3 qubit sizes");

  SpectrumResult result;
  std::vector<Point> saw_pts, haar_pts;
  for (const int n : config.qubit_range) {
    const MapParams params = MapParams::make(n, config.chaos);
    const StateVector psi = evolve_exact(momentum_eigenstate(params, config.initial_momentum), params, config.steps);

    SpectrumEntry saw;
    saw.n_qubits = n;
    saw.family = "sawtooth";
    saw.samples = pure_spectrum(psi, config.workers);
    saw.stats = stats(saw.samples);
    for (const auto& s : saw.samples) saw.pooled_values.push_back(s.value);
    saw.histogram = histogram(saw.pooled_values, default_bin_width(saw.pooled_values));
    saw_pts.emplace_back(n, saw.stats.relative_std);

    SpectrumEntry haar;
    haar.n_qubits = n;
    haar.family = "haar";
    haar.stats.count = static_cast<std::size_t>(config.haar_samples);
    const std::uint64_t base = mix64(config.master_seed);
    for (int i = 0; i < config.haar_samples; ++i) {
      const std::uint64_t seed = base + 1000 * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(i);
      const auto samples = pure_spectrum(haar_random_state(n, seed), config.workers);
      const EntanglementStats s = stats(samples);
      haar.stats.mean += s.mean;
      haar.stats.std_dev += s.std_dev;
      haar.stats.relative_std += s.relative_std;
      for (const auto& x : samples) haar.pooled_values.push_back(x.value);
    }
    const double k = config.haar_samples;
    haar.stats.mean /= k;
    haar.stats.std_dev /= k;
    haar.stats.relative_std /= k;
    haar.histogram = histogram(haar.pooled_values, default_bin_width(haar.pooled_values));
    haar_pts.emplace_back(n, haar.stats.relative_std);

    result.sawtooth.push_back(std::move(saw));
    result.haar.push_back(std::move(haar));
  }
  result.sawtooth_fit = fit_exponential(saw_pts);
  result.haar_fit = fit_exponential(haar_pts);
  return result;
}

// --- noise sweep -------------------------------------------------------------

std::vector<const SweepPoint*> NoiseSweepResult::series(int n_qubits) const {
  std::vector<const SweepPoint*> out;
  for (const auto& p : points) {
    if (p.n_qubits == n_qubits) out.push_back(&p);
  }
  return out;
}

bool NoiseSweepResult::all_converged() const {
  return std::all_of(points.begin(), points.end(), [](const SweepPoint& p) { return p.converged; });
}

SweepPoint baseline_point(const MapParams& params, int steps, const StateVector& initial, int workers) {
  const StateVector psi = evolve_circuit(initial, build_step_circuit(params), steps);
  const MixedSpectrum spec = mixed_spectrum(DensityMatrix::pure(psi), workers);
  SweepPoint p;
  p.n_qubits = params.n_qubits;
  p.steps = steps;
  p.lower = spec.lower_stats;
  p.upper = spec.upper_stats;
  p.lower_values = spec.lower;
  p.upper_values = spec.upper;
  p.total_entropy = spec.total_entropy;
  p.fano_bound = fano_entropy_bound(1.0, params.n_qubits);
  return p;
}

SweepPoint sweep_point(const MapParams& params, int steps, double epsilon, std::size_t realizations,
                       std::uint64_t master_seed, const StateVector& initial, const SweepPoint& baseline,
                       int workers) {
  TrajectoryOptions opts;
  opts.workers = workers;
  opts.keep_batches = true;
  const TrajectoryResult traj =
      run_trajectories(params, steps, epsilon, realizations, master_seed, initial, opts);
  const MixedSpectrum spec = mixed_spectrum(*traj.rho, workers);

  SweepPoint p;
  p.n_qubits = params.n_qubits;
  p.steps = steps;
  p.epsilon = epsilon;
  p.realizations = realizations;
  p.lower = spec.lower_stats;
  p.upper = spec.upper_stats;
  p.lower_values = spec.lower;
  p.upper_values = spec.upper;
  p.fidelity = std::clamp(traj.fidelity, 0.0, 1.0);
  p.total_entropy = spec.total_entropy;
  p.fano_bound = fano_entropy_bound(p.fidelity, params.n_qubits);
  p.invariants_ok = traj.rho->check_invariants().ok() && p.total_entropy <= p.fano_bound + 1e-9;

  const std::size_t batches = traj.batch_rhos.size();
  if (batches >= 2) {
    std::vector<double> lower_means, upper_means;
    for (const auto& rho : traj.batch_rhos) {
      const MixedSpectrum b = mixed_spectrum(rho, workers);
      lower_means.push_back(b.lower_stats.mean);
      upper_means.push_back(b.upper_stats.mean);
    }
    p.lower_stderr = batch_stderr(lower_means);
    p.upper_stderr = batch_stderr(upper_means);

    const MixedSpectrum half = mixed_spectrum(traj.merge_batches(batches / 2), workers);
    p.lower_drift = relative_drift(half.lower_stats.mean, p.lower.mean, baseline.lower.mean);
    p.upper_drift = relative_drift(half.upper_stats.mean, p.upper.mean, baseline.upper.mean);
    p.converged = p.lower_drift <= kDriftTolerance && p.upper_drift <= kDriftTolerance;
  }
  return p;
}

std::size_t resolve_realizations(const ExperimentConfig& config, int n_qubits, BoundKind kind) {
  return config.realizations ? *config.realizations
                             : recommend_realizations(n_qubits, kind, config.realization_multiplier);
}

NoiseSweepResult run_noise_sweep(const ExperimentConfig& config, int steps) {
  config.validate();
  require_even_sizes(config.qubit_range, 2);
  for (const int n : config.qubit_range) require_mixed_size(config, n);

  NoiseSweepResult result;
  result.steps = steps;
  for (const int n : config.qubit_range) {
    const MapParams params = MapParams::make(n, config.chaos);
    const StateVector initial = momentum_eigenstate(params, config.initial_momentum);
    const SweepPoint baseline = baseline_point(params, steps, initial, config.workers);
    result.points.push_back(baseline);
    // Both bounds come from the same rho, so the larger (upper-bound) budget applies.
    const std::size_t r = resolve_realizations(config, n, BoundKind::Upper);
    for (const double eps : config.epsilon_grid) {
      if (eps == 0.0) continue;
      result.points.push_back(
          sweep_point(params, steps, eps, r, config.master_seed, initial, baseline, config.workers));
    }
  }
  return result;
}

// --- thresholds --------------------------------------------------------------

std::optional<double> interpolate_threshold(std::span<const double> epsilons, std::span<const double> values,
                                            double target) {
  if (epsilons.size() != values.size()) throw std::invalid_argument("interpolate_threshold: size mismatch");
  for (std::size_t i = 0; i + 1 < epsilons.size(); ++i) {
    const double e0 = epsilons[i], e1 = epsilons[i + 1];
    const double v0 = values[i], v1 = values[i + 1];
    if (!(e0 > 0.0) || !(e1 > e0)) continue;
    if (v0 >= target && v1 < target) {
      const double s = (v0 - target) / (v0 - v1);
      return std::exp(std::log(e0) + s * (std::log(e1) - std::log(e0)));
    }
  }
  return std::nullopt;
}

ThresholdResult find_threshold(const ExperimentConfig& config, const NoiseSweepResult& sweep, BoundKind kind) {
  ThresholdResult result;
  std::vector<int> sizes;
  for (const auto& p : sweep.points) {
    if (std::find(sizes.begin(), sizes.end(), p.n_qubits) == sizes.end()) sizes.push_back(p.n_qubits);
  }
  std::vector<Point> pts;
  for (const int n : sizes) {
    const auto series = sweep.series(n);
    const SweepPoint* base = nullptr;
    std::vector<double> eps, vals;
    for (const SweepPoint* p : series) {
      if (p->epsilon == 0.0) {
        base = p;
      } else {
        eps.push_back(p->epsilon);
        vals.push_back(p->mean(kind));
      }
    }
    if (base == nullptr) throw std::invalid_argument("find_threshold: sweep lacks the eps = 0 point");

    ThresholdEntry entry;
    entry.n_qubits = n;
    entry.steps = sweep.steps;
    entry.kind = kind;
    entry.target = config.threshold_fraction * base->mean(kind);
    entry.epsilon = interpolate_threshold(eps, vals, entry.target);
    entry.method = entry.epsilon ? "interpolated" : "no-bracket";

    if (entry.epsilon && config.refine) {
      const MapParams params = MapParams::make(n, config.chaos);
      const StateVector initial = momentum_eigenstate(params, config.initial_momentum);
      const SweepPoint extra =
          sweep_point(params, sweep.steps, *entry.epsilon, resolve_realizations(config, n, BoundKind::Upper),
                      config.master_seed, initial, *base, config.workers);
      const auto at = std::lower_bound(eps.begin(), eps.end(), *entry.epsilon);
      const auto idx = at - eps.begin();
      if (at == eps.end() || *at != *entry.epsilon) {
        eps.insert(at, *entry.epsilon);
        vals.insert(vals.begin() + idx, extra.mean(kind));
      }
      if (const auto refined = interpolate_threshold(eps, vals, entry.target)) {
        entry.epsilon = refined;
        entry.method = "refined";
      }
    }
    if (entry.epsilon) pts.emplace_back(n, *entry.epsilon);
    result.entries.push_back(entry);
  }
  if (pts.size() >= 3) result.fit = fit_power_law(pts);
  return result;
}

// --- gamma calibration -------------------------------------------------------

GammaCalibration calibrate_gamma(const ExperimentConfig& config) {
  config.validate();
  if (config.epsilon_grid.empty()) throw std::invalid_argument("calibrate_gamma: empty epsilon grid");
  GammaCalibration out;
  std::vector<Point> ref_pts, act_pts;
  TrajectoryOptions opts;
  opts.workers = config.workers;
  opts.build_density = false;
  for (const int n : config.qubit_range) {
    const MapParams params = MapParams::make(n, config.chaos);
    const StateVector initial = momentum_eigenstate(params, config.initial_momentum);
    const double n_ref = static_cast<double>(reference_gate_count(n));
    const double n_act = static_cast<double>(build_step_circuit(params).gate_count());
    const std::size_t r = resolve_realizations(config, n, BoundKind::Upper);
    for (const int t : config.resolved_steps()) {
      for (const double eps : config.epsilon_grid) {
        GammaPoint g;
        g.n_qubits = n;
        g.steps = t;
        g.epsilon = eps;
        if (eps > 0.0) {
          g.fidelity = run_trajectories(params, t, eps, r, config.master_seed, initial, opts).fidelity;
        }
        if (!(g.fidelity > 0.0)) throw std::domain_error("regime violation: fidelity vanished");
        g.neg_log_fidelity = -std::log(std::min(g.fidelity, 1.0));
        g.x_reference = eps * eps * n_ref * t;
        g.x_actual = eps * eps * n_act * t;
        ref_pts.emplace_back(g.x_reference, g.neg_log_fidelity);
        act_pts.emplace_back(g.x_actual, g.neg_log_fidelity);
        out.points.push_back(g);
      }
    }
  }
  out.reference_fit = fit_linear(ref_pts);
  out.actual_fit = fit_linear(act_pts);
  for (const auto& g : out.points) {
    if (out.gamma_reference() * g.x_reference > kPerturbativeLimit) {
      throw std::domain_error("regime violation: gamma eps^2 n_g t exceeds 0.5 at n_q = " +
                              std::to_string(g.n_qubits) + ", t = " + std::to_string(g.steps) +
                              ", eps = " + std::to_string(g.epsilon));
    }
  }
  return out;
}

}  // namespace entforge
