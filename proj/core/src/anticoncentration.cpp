#include "prodsv/anticoncentration.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace prodsv {

namespace {

double bernoulli_se(double p, std::size_t n) {
  return n == 0 ? 0.0 : std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

ConcentrationEstimate from_count(std::size_t hits, std::size_t n, double radius) {
  ConcentrationEstimate e;
  e.radius = radius;
  e.samples = n;
  e.probability = n == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(n);
  e.standard_error = bernoulli_se(e.probability, n);
  return e;
}

bool in_window(double r, double c) { return r >= c && r <= 1.0 / c; }

double quantile(std::vector<double> v, double level) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = level * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

ConcentrationEstimate window_probability(const EntryDistribution& d, double c, std::size_t samples,
                                         SeedStream stream) {
  if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("window_probability: c must lie in (0, 1]");
  if (samples == 0) throw std::invalid_argument("window_probability: samples must be positive");
  const EntryDistribution sym = symmetrize(d);
  std::size_t hits = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    if (in_window(std::abs(sym.sample(stream)), c)) ++hits;
  }
  return from_count(hits, samples, c);
}

double exact_window_probability(const EntryDistribution& d, double c) {
  if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("exact_window_probability: c must lie in (0, 1]");
  const EntryDistribution sym = symmetrize(d);
  if (!sym.atoms()) throw std::invalid_argument("exact_window_probability: law is not finitely supported");
  double p = 0.0;
  for (const Atom& a : *sym.atoms()) {
    if (in_window(std::abs(a.value), c)) p += a.probability;
  }
  return p;
}

ConcentrationEstimate levy_concentration(const std::vector<Complex>& samples, double t) {
  if (samples.empty()) throw std::invalid_argument("levy_concentration: no samples");
  if (!(t > 0.0)) throw std::invalid_argument("levy_concentration: radius must be positive");

  // Bucket by cell; a ball of radius t around any grid node or cell center
  // only touches the 3x3 block of cells around it.
  std::map<std::pair<long, long>, std::vector<Complex>> cells;
  for (const Complex& s : samples) {
    cells[{static_cast<long>(std::floor(s.real() / t)), static_cast<long>(std::floor(s.imag() / t))}].push_back(s);
  }
  auto count_near = [&](Complex center, long ci, long cj) {
    std::size_t hits = 0;
    for (long di = -1; di <= 1; ++di) {
      for (long dj = -1; dj <= 1; ++dj) {
        auto it = cells.find({ci + di, cj + dj});
        if (it == cells.end()) continue;
        for (const Complex& s : it->second) {
          if (std::abs(s - center) <= t) ++hits;
        }
      }
    }
    return hits;
  };

  std::size_t best = 0;
  for (const auto& [cell, members] : cells) {
    const auto [ci, cj] = cell;
    const double x0 = static_cast<double>(ci) * t;
    const double y0 = static_cast<double>(cj) * t;
    best = std::max(best, count_near({x0 + 0.5 * t, y0 + 0.5 * t}, ci, cj));
    // corners of this cell (shared corners are simply revisited)
    for (int dx = 0; dx <= 1; ++dx) {
      for (int dy = 0; dy <= 1; ++dy) {
        const Complex corner(x0 + dx * t, y0 + dy * t);
        best = std::max(best, count_near(corner, ci + dx, cj + dy));
      }
    }
  }
  ConcentrationEstimate e = from_count(best, samples.size(), t);
  e.grid_cell = t;
  return e;
}

ChainSampler ensemble_sampler(const EnsembleSpec& spec) {
  return [spec](const SeedStream& s) { return sample_chain(spec, s); };
}

ImageAnticoncentration image_anticoncentration(const ChainSampler& sampler, Complex z, const BlockVector& u,
                                               const BlockVector& w, double c, std::size_t trials,
                                               SeedStream stream) {
  if (trials == 0) throw std::invalid_argument("image_anticoncentration: trials must be positive");
  if (std::abs(u.norm() - 1.0) > 1e-10) throw std::invalid_argument("image_anticoncentration: u must be a unit vector");
  ImageAnticoncentration out;
  out.quantile_levels = {0.01, 0.05, 0.1, 0.25, 0.5};
  std::vector<double> ratios;
  ratios.reserve(trials);
  std::size_t hits = 0;
  double sqrt_n = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const FactorChain chain = sampler(stream.substream(t));
    if (chain.length() != u.blocks() || chain.dimension() != u.block_size()) {
      throw std::invalid_argument("image_anticoncentration: u does not match the sampled chain shape");
    }
    sqrt_n = std::sqrt(static_cast<double>(chain.dimension()));
    const TranslatedLinearization lin(chain, z);
    BlockVector r = lin.apply(u);
    r.data() -= w.data();
    const double nrm = r.norm();
    if (nrm <= c * sqrt_n) ++hits;
    ratios.push_back(nrm / sqrt_n);
  }
  out.threshold = c * sqrt_n;
  out.estimate = from_count(hits, trials, c);
  for (double level : out.quantile_levels) out.quantiles.push_back(quantile(ratios, level));
  return out;
}

ConcentrationEstimate chain_image_norm_event(const ChainSampler& sampler, Complex z, double c,
                                             std::size_t trials, SeedStream stream) {
  if (trials == 0) throw std::invalid_argument("chain_image_norm_event: trials must be positive");
  if (z == Complex(0.0, 0.0)) throw std::invalid_argument("chain_image_norm_event: z must be nonzero");
  std::size_t hits = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const FactorChain chain = sampler(stream.substream(t));
    const std::size_t m = chain.length();
    if (m < 2) throw std::invalid_argument("chain_image_norm_event: event needs M >= 2");
    const auto n = static_cast<Eigen::Index>(chain.dimension());
    // y = (X_1/z) ... (X_{M-1}/z) e_n, applied right to left.
    ComplexVector y = ComplexVector::Zero(n);
    y(n - 1) = 1.0;
    for (std::size_t j = m - 1; j-- > 0;) y = (chain.factor(j) * y) / z;
    const double threshold = std::pow(c * std::sqrt(static_cast<double>(n)) / std::abs(z), static_cast<double>(m - 1));
    if (y.norm() >= threshold) ++hits;
  }
  return from_count(hits, trials, c);
}

}  // namespace prodsv
