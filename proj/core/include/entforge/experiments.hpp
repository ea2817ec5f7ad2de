#pragma once

// Figure-reproduction campaigns: entanglement generation, spectrum widths,
// noise sweeps of the distillable-entanglement bounds, half-value thresholds
// and fidelity-decay calibration.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entforge/entanglement.hpp"
#include "entforge/fit.hpp"
#include "entforge/sawtooth.hpp"
#include "entforge/trajectories.hpp"

namespace entforge {

inline constexpr int kDefaultSteps = 30;
inline constexpr int kDefaultHaarSamples = 50;
inline constexpr int kMaxMixedQubits = 8;
inline constexpr int kMaxLargeMixedQubits = 10;
inline constexpr double kDriftTolerance = 0.02;
inline constexpr double kPerturbativeLimit = 0.5;

struct ExperimentConfig {
  double chaos = kDefaultChaosParameter;
  int steps = kDefaultSteps;            // t, or t_max for generation
  std::vector<int> step_list;           // extra t values for threshold / calibration
  std::vector<double> epsilon_grid;
  std::optional<std::size_t> realizations;  // unset: recommend_realizations
  double realization_multiplier = kDefaultRealizationMultiplier;
  std::uint64_t master_seed = 0;
  std::vector<int> qubit_range;
  int workers = 1;
  int haar_samples = kDefaultHaarSamples;
  double threshold_fraction = 0.5;
  bool refine = false;
  bool allow_large_mixed = false;       // permits n_q = 10 in density-matrix runs
  std::int64_t initial_momentum = 0;
  std::string output_path;

  /// Throws std::invalid_argument on a malformed grid or qubit list.
  void validate() const;
  /// step_list if set, otherwise {steps}.
  std::vector<int> resolved_steps() const;
};

StateVector momentum_eigenstate(const MapParams& params, std::int64_t momentum);

// --- generation --------------------------------------------------------------

struct ConvergenceFit {
  double tau = 0.0;    // steps
  FitResult fit;       // exponential fit of |gap(t)|
  double floor = 0.0;  // late-time RMS of gap(t)
  std::size_t window = 0;
};

/// Fits |asymptote - E(t)| ~ exp(-t / tau) over the transient: points from
/// t = 0 up to (excluding) the first t at which |gap| reaches the late-time
/// fluctuation level, the RMS of gap over the second half of the series.
/// The window never has fewer than 3 points.
ConvergenceFit fit_convergence(std::span<const double> mean_entropy, double asymptote);

struct GenerationSeries {
  int n_qubits = 0;
  double page = 0.0;
  std::vector<double> mean_entropy;  // index t = 0..t_max
  ConvergenceFit convergence;
};

struct GenerationResult {
  std::vector<GenerationSeries> series;
  std::optional<FitResult> tau_linear_fit;  // tau vs n_q, when >= 3 sizes
};

GenerationResult run_generation(const ExperimentConfig& config);

// --- spectrum ------------------------------------------------------------------

struct SpectrumEntry {
  int n_qubits = 0;
  std::string family;                  // "sawtooth" or "haar"
  EntanglementStats stats;             // haar: averaged over samples
  std::vector<EntanglementSample> samples;  // sawtooth only
  std::vector<double> pooled_values;   // every sample value in this family
  Histogram histogram;
};

struct SpectrumResult {
  std::vector<SpectrumEntry> sawtooth;
  std::vector<SpectrumEntry> haar;
  FitResult sawtooth_fit;  // relative_std vs n_q, exponential
  FitResult haar_fit;
};

SpectrumResult run_spectrum(const ExperimentConfig& config);

// --- noise sweep -------------------------------------------------------------

struct SweepPoint {
  int n_qubits = 0;
  int steps = 0;
  double epsilon = 0.0;
  std::size_t realizations = 0;
  EntanglementStats lower;
  EntanglementStats upper;
  double lower_stderr = 0.0;  // batch means
  double upper_stderr = 0.0;
  std::vector<double> lower_values;  // per balanced bipartition
  std::vector<double> upper_values;
  double fidelity = 1.0;
  double total_entropy = 0.0;
  double fano_bound = 0.0;
  double lower_drift = 0.0;  // half vs full realization set, relative to eps = 0
  double upper_drift = 0.0;
  bool converged = true;
  bool invariants_ok = true;  // Hermitian, unit trace, PSD, Fano inequality

  double mean(BoundKind kind) const { return kind == BoundKind::Lower ? lower.mean : upper.mean; }
  double stderr_of(BoundKind kind) const {
    return kind == BoundKind::Lower ? lower_stderr : upper_stderr;
  }
};

struct NoiseSweepResult {
  int steps = 0;
  std::vector<SweepPoint> points;  // per n_q: eps = 0 first, then the grid

  std::vector<const SweepPoint*> series(int n_qubits) const;
  bool all_converged() const;
};

/// Noise-free reference (eps = 0) point from the pure state.
SweepPoint baseline_point(const MapParams& params, int steps, const StateVector& initial, int workers);

/// Monte-Carlo point. `baseline` supplies the eps = 0 means for the drift check.
SweepPoint sweep_point(const MapParams& params, int steps, double epsilon, std::size_t realizations,
                       std::uint64_t master_seed, const StateVector& initial, const SweepPoint& baseline,
                       int workers);

std::size_t resolve_realizations(const ExperimentConfig& config, int n_qubits, BoundKind kind);

NoiseSweepResult run_noise_sweep(const ExperimentConfig& config, int steps);

// --- thresholds --------------------------------------------------------------

/// Crossing of `target` between the first bracketing pair of positive grid
/// points, interpolated linearly in (ln eps, value). Returns nullopt when no
/// pair brackets the target.
std::optional<double> interpolate_threshold(std::span<const double> epsilons,
                                            std::span<const double> values, double target);

struct ThresholdEntry {
  int n_qubits = 0;
  int steps = 0;
  BoundKind kind = BoundKind::Lower;
  double target = 0.0;
  std::optional<double> epsilon;
  std::string method;  // "interpolated", "refined" or "no-bracket"
};

struct ThresholdResult {
  std::vector<ThresholdEntry> entries;
  std::optional<FitResult> fit;  // eps_threshold = a n_q^b
};

ThresholdResult find_threshold(const ExperimentConfig& config, const NoiseSweepResult& sweep,
                               BoundKind kind);

// --- gamma calibration -------------------------------------------------------

struct GammaPoint {
  int n_qubits = 0;
  int steps = 0;
  double epsilon = 0.0;
  double fidelity = 1.0;
  double neg_log_fidelity = 0.0;
  double x_reference = 0.0;  // eps^2 (3 n_q^2 + n_q) t
  double x_actual = 0.0;     // eps^2 (gate count of the built circuit) t
};

struct GammaCalibration {
  std::vector<GammaPoint> points;
  FitResult reference_fit;  // slope = gamma under the 3 n_q^2 + n_q convention
  FitResult actual_fit;     // slope = gamma under the actual gate count
  double gamma_reference() const { return reference_fit.exponent_or_rate; }
  double gamma_actual() const { return actual_fit.exponent_or_rate; }
};

/// Regression of -ln F on eps^2 n_g t pooled over the qubit range, step list
/// and epsilon grid. Throws std::domain_error if a point leaves the
/// perturbative regime (gamma eps^2 n_g t > 0.5).
GammaCalibration calibrate_gamma(const ExperimentConfig& config);

}  // namespace entforge
