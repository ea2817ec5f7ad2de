#include "entforge/entanglement.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "entforge/parallel.hpp"

namespace entforge {

namespace {

void require_even(int n_qubits) {
  if (n_qubits < 2 || n_qubits % 2 != 0) {
    throw std::invalid_argument("balanced bipartitions require even n_q");
  }
}

}  // namespace

std::vector<Bipartition> enumerate_balanced_bipartitions(int n_qubits) {
  require_even(n_qubits);
  if (n_qubits > kMaxQubits) throw std::invalid_argument("too many qubits");
  const int half = n_qubits / 2;
  std::vector<Bipartition> out;
  const std::uint64_t limit = std::uint64_t{1} << n_qubits;
  for (std::uint64_t mask = 1; mask < limit; mask += 2) {
    if (std::popcount(mask) == half) out.emplace_back(n_qubits, mask);
  }
  return out;
}

std::size_t balanced_bipartition_count(int n_qubits) {
  require_even(n_qubits);
  std::size_t c = 1;
  const auto n = static_cast<std::size_t>(n_qubits);
  for (std::size_t k = 1; k <= n / 2; ++k) c = c * (n - n / 2 + k) / k;
  return c / 2;
}

std::vector<EntanglementSample> pure_spectrum(const StateVector& state, int workers) {
  const auto parts = enumerate_balanced_bipartitions(state.n_qubits());
  std::vector<EntanglementSample> out;
  out.reserve(parts.size());
  for (const auto& p : parts) out.push_back({p, 0.0});
  parallel_for(parts.size(), workers, [&](std::size_t i) {
    out[i].value = von_neumann_entropy(reduced_density_matrix(state, parts[i]));
  });
  return out;
}

double page_value(int n_qubits) {
  if (n_qubits < 2) throw std::invalid_argument("page_value: need n_q >= 2");
  return n_qubits / 2.0 - 1.0 / (2.0 * std::numbers::ln2);
}

double page_exact(std::size_t m, std::size_t n) {
  if (m == 0 || n == 0) throw std::invalid_argument("page_exact: dimensions must be positive");
  if (m > n) std::swap(m, n);
  double s = 0.0;
  for (std::size_t k = n + 1; k <= m * n; ++k) s += 1.0 / static_cast<double>(k);
  s -= static_cast<double>(m - 1) / (2.0 * static_cast<double>(n));
  return s / std::numbers::ln2;
}

StateVector haar_random_state(int n_qubits, std::uint64_t seed) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) throw std::invalid_argument("haar_random_state: bad n_q");
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector amps(static_cast<Eigen::Index>(std::size_t{1} << n_qubits));
  for (auto& a : amps) {
    const double re = normal(engine);
    const double im = normal(engine);
    a = Complex{re, im};
  }
  amps.normalize();
  return StateVector::from_amplitudes(std::move(amps));
}

namespace {

DistillableBounds bounds_with_entropy(const DensityMatrix& rho, const Bipartition& part,
                                      double total_entropy) {
  const double reduced = von_neumann_entropy(reduced_density_matrix(rho, part));
  const double negativity = std::log2(trace_norm(partial_transpose(rho, part)));
  return {std::max(reduced - total_entropy, 0.0), negativity};
}

}  // namespace

DistillableBounds distillable_bounds(const DensityMatrix& rho, const Bipartition& part) {
  if (rho.n_qubits() != part.n_qubits()) throw std::invalid_argument("distillable_bounds: size mismatch");
  return bounds_with_entropy(rho, part, von_neumann_entropy(rho));
}

MixedSpectrum mixed_spectrum(const DensityMatrix& rho, int workers) {
  MixedSpectrum out;
  out.bipartitions = enumerate_balanced_bipartitions(rho.n_qubits());
  out.total_entropy = von_neumann_entropy(rho);
  out.lower.resize(out.bipartitions.size());
  out.upper.resize(out.bipartitions.size());
  parallel_for(out.bipartitions.size(), workers, [&](std::size_t i) {
    const auto b = bounds_with_entropy(rho, out.bipartitions[i], out.total_entropy);
    out.lower[i] = b.lower;
    out.upper[i] = b.upper;
  });
  out.lower_stats = stats(out.lower);
  out.upper_stats = stats(out.upper);
  return out;
}

EntanglementStats stats(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("stats: empty sample list");
  EntanglementStats s;
  s.count = values.size();
  double sum = 0.0;
  for (const double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.count);
  double sq = 0.0;
  for (const double v : values) sq += (v - s.mean) * (v - s.mean);
  s.std_dev = std::sqrt(sq / static_cast<double>(s.count));
  s.relative_std = s.mean > 0.0 ? s.std_dev / s.mean : 0.0;
  return s;
}

EntanglementStats stats(std::span<const EntanglementSample> samples) {
  std::vector<double> values;
  values.reserve(samples.size());
  for (const auto& s : samples) values.push_back(s.value);
  return stats(values);
}

double default_bin_width(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("default_bin_width: empty input");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double range = *hi - *lo;
  return range > 0.0 ? range / 25.0 : 0.01;
}

Histogram histogram(std::span<const double> values, double bin_width) {
  if (values.empty()) throw std::invalid_argument("histogram: empty input");
  if (!(bin_width > 0.0)) throw std::invalid_argument("histogram: bin width must be positive");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  Histogram h;
  h.bin_width = bin_width;
  h.origin = std::floor(*lo / bin_width) * bin_width;
  const auto bins = static_cast<std::size_t>(std::floor((*hi - h.origin) / bin_width)) + 1;
  h.counts.assign(bins, 0);
  for (const double v : values) {
    auto idx = static_cast<std::size_t>(std::floor((v - h.origin) / bin_width));
    h.counts[std::min(idx, bins - 1)] += 1;
  }
  h.density.resize(bins);
  const double norm = static_cast<double>(values.size()) * bin_width;
  for (std::size_t i = 0; i < bins; ++i) h.density[i] = static_cast<double>(h.counts[i]) / norm;
  return h;
}

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("binary_entropy: argument outside [0, 1]");
  double h = 0.0;
  if (x > 0.0) h -= x * std::log2(x);
  if (x < 1.0) h -= (1.0 - x) * std::log2(1.0 - x);
  return h;
}

double fano_entropy_bound(double fidelity, int n_qubits) {
  if (!(fidelity >= 0.0 && fidelity <= 1.0)) throw std::domain_error("fano_entropy_bound: F outside [0, 1]");
  if (n_qubits < 1) throw std::invalid_argument("fano_entropy_bound: need n_q >= 1");
  // log2(4^n - 1) = 2n + log2(1 - 4^-n)
  const double log_dim = 2.0 * n_qubits + std::log2(1.0 - std::ldexp(1.0, -2 * n_qubits));
  return binary_entropy(fidelity) + (1.0 - fidelity) * log_dim;
}

Prediction predicted_entropy(double epsilon, int n_qubits, int steps, double gamma, double gate_count) {
  const double x = gamma * epsilon * epsilon * gate_count * steps;
  if (x <= 0.0) return {0.0, true};
  const double value = x * (-std::log2(x) + 2.0 * n_qubits + 1.0 / std::numbers::ln2);
  return {value, x < 1.0};
}

double predicted_lower_bound(double epsilon, int n_qubits, int steps, double gamma) {
  if (epsilon < 0.0 || steps < 0 || gamma < 0.0) throw std::invalid_argument("predicted_lower_bound: negative input");
  const double n = n_qubits;
  return page_value(n_qubits) - 6.0 * gamma * n * n * n * epsilon * epsilon * steps;
}

double analytic_threshold(int n_qubits, int steps, double gamma) {
  if (n_qubits < 1 || steps < 1 || !(gamma > 0.0)) throw std::invalid_argument("analytic_threshold: bad input");
  const double n = n_qubits;
  return 1.0 / std::sqrt(24.0 * gamma * n * n * steps);
}

double predicted_half_crossing(int n_qubits, int steps, double gamma) {
  if (n_qubits < 2 || steps < 1 || !(gamma > 0.0)) throw std::invalid_argument("predicted_half_crossing: bad input");
  const double n = n_qubits;
  return std::sqrt(page_value(n_qubits) / (12.0 * gamma * n * n * n * steps));
}

}  // namespace entforge
