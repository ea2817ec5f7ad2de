#include "entforge/fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace entforge {

namespace {

constexpr std::size_t kMinPoints = 3;

void require_points(std::span<const Point> points) {
  if (points.size() < kMinPoints) throw std::invalid_argument("fit needs at least 3 points");
  for (const auto& [x, y] : points) {
    if (!std::isfinite(x) || !std::isfinite(y)) throw std::invalid_argument("fit: non-finite point");
  }
}

}  // namespace

FitResult fit_linear(std::span<const Point> points) {
  require_points(points);
  const auto n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : points) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit: all x values coincide");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0.0;
  for (const auto& [x, y] : points) {
    const double r = y - (slope * x + intercept);
    ss_res += r * r;
  }
  // A constant response is fitted exactly by a flat line.
  const double r2 = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return {slope, intercept, r2, points.size()};
}

FitResult fit_power_law(std::span<const Point> points) {
  require_points(points);
  std::vector<Point> logs;
  logs.reserve(points.size());
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) throw std::invalid_argument("power-law fit needs positive x and y");
    logs.emplace_back(std::log(x), std::log(y));
  }
  FitResult f = fit_linear(logs);
  f.prefactor = std::exp(f.prefactor);
  return f;
}

FitResult fit_exponential(std::span<const Point> points) {
  require_points(points);
  std::vector<Point> logs;
  logs.reserve(points.size());
  for (const auto& [x, y] : points) {
    if (!(y > 0.0)) throw std::invalid_argument("exponential fit needs positive y");
    logs.emplace_back(x, std::log(y));
  }
  FitResult f = fit_linear(logs);
  f.exponent_or_rate = -f.exponent_or_rate;
  f.prefactor = std::exp(f.prefactor);
  return f;
}

}  // namespace entforge
