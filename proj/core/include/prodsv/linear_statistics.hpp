#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "prodsv/numerics.hpp"
#include "prodsv/rng.hpp"

namespace prodsv {

/// Test functions on the complex plane.
///   radial_bump:   f(z) = exp(-1 / (1 - s^2)) for |s| < 1, else 0,
///                  s = (2|z| - 1) / (1 - 2 tau0); supported in tau0 < |z| < 1 - tau0.
///   coordinate_x:  f(x + iy) = x (not compactly supported; unit checks only).
///   zero:          f = 0.
struct TestFunction {
  enum class Kind { radial_bump, coordinate_x, zero };

  Kind kind = Kind::radial_bump;
  double tau0 = 0.2;

  static TestFunction radial_bump(double tau0);
  static TestFunction coordinate_x();
  static TestFunction zero();

  double operator()(Complex z) const;
  std::string name() const;
  void validate() const;
};

struct VarianceOptions {
  /// Radial cells of the polar midpoint grid (angular cells = 2x).
  std::size_t grid_resolution = 400;
  /// Equispaced samples on the unit circle for the Fourier coefficients.
  std::size_t fourier_modes = 256;
  /// Require f = 0 on the grid outside tau0 < |z| < 1 - tau0.
  bool check_support = true;
};

struct PredictedVariance {
  double dirichlet = 0.0;   // (1/4pi) int_{|z|<1} |grad f|^2
  double circle = 0.0;      // (1/2) sum_k |k| |f_k|^2
  double total() const { return dirichlet + circle; }
};

/// Limiting variance of the centered linear statistic. Throws
/// std::invalid_argument naming the offending point when the support check
/// fails.
PredictedVariance predicted_variance(const TestFunction& f, const VarianceOptions& opts = {});

/// Unbiased sample variance (0 for fewer than two values).
double sample_variance(const std::vector<double>& v);

struct BootstrapInterval {
  double lo = 0.0;
  double hi = 0.0;
  double standard_error = 0.0;
};

/// Percentile bootstrap (2.5%, 97.5%) of the sample variance.
BootstrapInterval bootstrap_variance(const std::vector<double>& v, std::size_t resamples, SeedStream stream);

/// Standard normal quantile.
double normal_quantile(double p);

/// max_i |x_(i) - Phi^{-1}((i + 1/2) / R)| after standardizing by the
/// sample mean and standard deviation.
double qq_deviation(const std::vector<double>& v);

}  // namespace prodsv
