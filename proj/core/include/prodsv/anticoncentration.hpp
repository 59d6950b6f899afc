#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "prodsv/ensembles.hpp"
#include "prodsv/linearization.hpp"
#include "prodsv/rng.hpp"

namespace prodsv {

struct ConcentrationEstimate {
  double radius = 0.0;
  double probability = 0.0;
  std::size_t samples = 0;
  /// sqrt(p (1 - p) / samples) at the reported probability.
  double standard_error = 0.0;
  /// Grid cell width used by the small-ball search (0 when not applicable).
  double grid_cell = 0.0;
};

/// Empirical P(c <= |x~| <= 1/c) for the symmetrized law x~ = x - x'.
ConcentrationEstimate window_probability(const EntryDistribution& d, double c, std::size_t samples,
                                         SeedStream stream);

/// Exact counterpart of window_probability for finitely supported laws.
double exact_window_probability(const EntryDistribution& d, double c);

/// Estimate of sup_w P(|S - w| <= t) from samples of S: the largest fraction
/// of samples within distance t of a center from two interleaved grids of
/// spacing t (cell centers and cell corners).
ConcentrationEstimate levy_concentration(const std::vector<Complex>& samples, double t);

/// Draws one factor chain per trial.
using ChainSampler = std::function<FactorChain(const SeedStream&)>;

ChainSampler ensemble_sampler(const EnsembleSpec& spec);

struct ImageAnticoncentration {
  ConcentrationEstimate estimate;
  double threshold = 0.0;  // c sqrt(n)
  /// Quantiles of ||Y(z) u - w|| / sqrt(n) at levels {0.01, 0.05, 0.1, 0.25, 0.5}.
  std::vector<double> quantile_levels;
  std::vector<double> quantiles;
};

/// Empirical P(||Y(z) u - w||_2 <= c sqrt(n)) over independent chains.
ImageAnticoncentration image_anticoncentration(const ChainSampler& sampler, Complex z, const BlockVector& u,
                                               const BlockVector& w, double c, std::size_t trials,
                                               SeedStream stream);

/// Empirical P(||(X_1/z) ... (X_{M-1}/z) e_n|| >= (c sqrt(n) / |z|)^{M-1}).
/// Throws std::invalid_argument for single-factor chains.
ConcentrationEstimate chain_image_norm_event(const ChainSampler& sampler, Complex z, double c,
                                             std::size_t trials, SeedStream stream);

}  // namespace prodsv
