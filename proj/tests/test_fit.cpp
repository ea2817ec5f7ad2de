#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "entforge/fit.hpp"

using namespace entforge;

TEST(Fit, ExactPowerLaw) {
  std::vector<Point> pts;
  for (const double x : {1.0, 2.0, 4.0, 8.0}) pts.emplace_back(x, 2.0 / x);
  const auto f = fit_power_law(pts);
  EXPECT_NEAR(f.exponent_or_rate, -1.0, 1e-12);
  EXPECT_NEAR(f.prefactor, 2.0, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_EQ(f.point_count, 4u);
}

TEST(Fit, ConstantData) {
  const std::vector<Point> pts{{1.0, 3.0}, {2.0, 3.0}, {5.0, 3.0}};
  EXPECT_NEAR(fit_power_law(pts).exponent_or_rate, 0.0, 1e-15);
  EXPECT_NEAR(fit_exponential(pts).exponent_or_rate, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(fit_linear(pts).r_squared, 1.0);
}

TEST(Fit, NoisyPowerLaw) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<Point> pts;
  for (int x = 4; x <= 12; ++x) pts.emplace_back(x, std::pow(x, -0.9) * (1.0 + noise(rng)));
  EXPECT_NEAR(fit_power_law(pts).exponent_or_rate, -0.9, 0.05);
}

TEST(Fit, ExactExponential) {
  std::vector<Point> pts;
  for (int x = 0; x < 6; ++x) pts.emplace_back(x, std::exp(-x / 2.0));
  const auto f = fit_exponential(pts);
  EXPECT_NEAR(f.exponent_or_rate, 0.5, 1e-12);
  EXPECT_NEAR(f.prefactor, 1.0, 1e-12);
}

TEST(Fit, NoisyExponential) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 0.02);
  std::vector<Point> pts;
  for (int x = 4; x <= 12; x += 2) pts.emplace_back(x, 3.0 * std::exp(-0.48 * x) * (1.0 + noise(rng)));
  EXPECT_NEAR(fit_exponential(pts).exponent_or_rate, 0.48, 0.03);
}

TEST(Fit, LinearRecoversLine) {
  const std::vector<Point> pts{{0.0, 1.0}, {1.0, 3.0}, {2.0, 5.0}, {3.0, 7.0}};
  const auto f = fit_linear(pts);
  EXPECT_NEAR(f.exponent_or_rate, 2.0, 1e-14);
  EXPECT_NEAR(f.prefactor, 1.0, 1e-14);
}

TEST(Fit, Errors) {
  const std::vector<Point> two{{1.0, 1.0}, {2.0, 2.0}};
  EXPECT_THROW(fit_linear(two), std::invalid_argument);
  const std::vector<Point> neg{{1.0, 1.0}, {2.0, -2.0}, {3.0, 1.0}};
  EXPECT_THROW(fit_power_law(neg), std::invalid_argument);
  EXPECT_THROW(fit_exponential(neg), std::invalid_argument);
  const std::vector<Point> zero_x{{0.0, 1.0}, {2.0, 2.0}, {3.0, 1.0}};
  EXPECT_THROW(fit_power_law(zero_x), std::invalid_argument);
  const std::vector<Point> same_x{{1.0, 1.0}, {1.0, 2.0}, {1.0, 3.0}};
  EXPECT_THROW(fit_linear(same_x), std::invalid_argument);
}
