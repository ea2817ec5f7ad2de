#pragma once

#include <span>
#include <utility>
#include <vector>

namespace entforge {

struct FitResult {
  double exponent_or_rate = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
  std::size_t point_count = 0;
};

using Point = std::pair<double, double>;

/// Ordinary least squares y = slope x + intercept. exponent_or_rate holds the
/// slope and prefactor the intercept.
FitResult fit_linear(std::span<const Point> points);

/// y = prefactor * x^exponent, fitted on (ln x, ln y).
FitResult fit_power_law(std::span<const Point> points);

/// y = prefactor * exp(-rate x), fitted on (x, ln y). Decay gives rate > 0.
FitResult fit_exponential(std::span<const Point> points);

}  // namespace entforge
