#include "prodsv/linear_statistics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "prodsv/experiments.hpp"
#include "prodsv/spectra.hpp"

namespace prodsv {

TestFunction TestFunction::radial_bump(double tau0) {
  TestFunction f;
  f.kind = Kind::radial_bump;
  f.tau0 = tau0;
  f.validate();
  return f;
}

TestFunction TestFunction::coordinate_x() {
  TestFunction f;
  f.kind = Kind::coordinate_x;
  return f;
}

TestFunction TestFunction::zero() {
  TestFunction f;
  f.kind = Kind::zero;
  return f;
}

double TestFunction::operator()(Complex z) const {
  switch (kind) {
    case Kind::radial_bump: {
      const double s = (2.0 * std::abs(z) - 1.0) / (1.0 - 2.0 * tau0);
      const double q = 1.0 - s * s;
      return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
    }
    case Kind::coordinate_x: return z.real();
    case Kind::zero: return 0.0;
  }
  return 0.0;
}

std::string TestFunction::name() const {
  switch (kind) {
    case Kind::radial_bump: return "radial_bump";
    case Kind::coordinate_x: return "coordinate_x";
    case Kind::zero: return "zero";
  }
  return "unknown";
}

void TestFunction::validate() const {
  if (kind == Kind::radial_bump && !(tau0 > 0.0 && tau0 < 0.5)) {
    throw std::invalid_argument("test_function.tau0: must lie in (0, 1/2)");
  }
}

PredictedVariance predicted_variance(const TestFunction& f, const VarianceOptions& opts) {
  f.validate();
  if (opts.grid_resolution < 4 || opts.fourier_modes < 4) {
    throw std::invalid_argument("predicted_variance: grid_resolution and fourier_modes must be at least 4");
  }
  const double tau0 = f.tau0;
  auto check_point = [&](Complex z) {
    if (!opts.check_support) return;
    const double r = std::abs(z);
    if ((r <= tau0 || r >= 1.0 - tau0) && f(z) != 0.0) {
      std::ostringstream os;
      os.precision(17);
      os << "predicted_variance: " << f.name() << " is nonzero outside the bulk at z = (" << z.real() << ", "
         << z.imag() << "), f = " << f(z);
      throw std::invalid_argument(os.str());
    }
  };

  PredictedVariance out;
  const std::size_t R = opts.grid_resolution;
  const std::size_t T = 2 * R;
  const double h = 1.0 / static_cast<double>(R);
  const double k = 2.0 * std::numbers::pi / static_cast<double>(T);
  double dirichlet = 0.0;
  for (std::size_t i = 0; i < R; ++i) {
    const double r = (static_cast<double>(i) + 0.5) * h;
    for (std::size_t j = 0; j < T; ++j) {
      const double th = (static_cast<double>(j) + 0.5) * k;
      check_point(std::polar(r, th));
      const double fr = (f(std::polar(r + 0.5 * h, th)) - f(std::polar(r - 0.5 * h, th))) / h;
      const double ft = (f(std::polar(r, th + 0.5 * k)) - f(std::polar(r, th - 0.5 * k))) / k;
      dirichlet += (fr * fr + ft * ft / (r * r)) * r;
    }
  }
  out.dirichlet = dirichlet * h * k / (4.0 * std::numbers::pi);

  const std::size_t K = opts.fourier_modes;
  std::vector<double> samples(K);
  for (std::size_t j = 0; j < K; ++j) {
    const Complex z = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(K));
    check_point(z);
    samples[j] = f(z);
  }
  const long half = static_cast<long>(K / 2);
  double circle = 0.0;
  for (long m = 1; m < half; ++m) {
    Complex c(0.0, 0.0);
    for (std::size_t j = 0; j < K; ++j) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(m) * static_cast<double>(j) / static_cast<double>(K);
      c += samples[j] * std::polar(1.0, ang);
    }
    c /= static_cast<double>(K);
    // f real: |f_{-m}| = |f_m|
    circle += 2.0 * static_cast<double>(m) * std::norm(c);
  }
  out.circle = 0.5 * circle;
  return out;
}

double sample_variance(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

BootstrapInterval bootstrap_variance(const std::vector<double>& v, std::size_t resamples, SeedStream stream) {
  BootstrapInterval out;
  if (v.size() < 2 || resamples == 0) return out;
  std::vector<double> stats(resamples);
  std::vector<double> draw(v.size());
  for (std::size_t b = 0; b < resamples; ++b) {
    for (double& x : draw) x = v[stream.below(v.size())];
    stats[b] = sample_variance(draw);
  }
  out.standard_error = std::sqrt(sample_variance(stats));
  std::sort(stats.begin(), stats.end());
  auto at = [&](double level) {
    const double pos = level * static_cast<double>(stats.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, stats.size() - 1);
    return stats[lo] + (pos - static_cast<double>(lo)) * (stats[hi] - stats[lo]);
  };
  out.lo = at(0.025);
  out.hi = at(0.975);
  return out;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p must lie in (0, 1)");
  double lo = -40.0;
  double hi = 40.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(-mid / std::numbers::sqrt2) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double qq_deviation(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double sd = std::sqrt(sample_variance(v));
  if (sd == 0.0) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  std::vector<double> z(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) z[i] = (v[i] - mean) / sd;
  std::sort(z.begin(), z.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double q = normal_quantile((static_cast<double>(i) + 0.5) / static_cast<double>(z.size()));
    worst = std::max(worst, std::abs(z[i] - q));
  }
  return worst;
}

std::vector<LinearStatisticRun> run_linear_statistic(const ExperimentConfig& cfg, const TestFunction& f,
                                                     const ChainFactory& chains) {
  cfg.validate();
  f.validate();
  const ChainFactory factory = chains ? chains : default_chain_factory(cfg);
  const double predicted = predicted_variance(f, cfg.variance).total();
  const SeedStream master(cfg.seed);
  const SeedStream bootstrap_root(mix64(cfg.seed ^ 0xb0075742a9ULL));

  std::vector<LinearStatisticRun> runs;
  for (std::size_t g = 0; g < cfg.n_grid.size(); ++g) {
    LinearStatisticRun run;
    run.f = f;
    run.n = cfg.n_grid[g];
    run.m = cfg.factors;
    run.replicas = cfg.trials;
    run.predicted_variance = predicted;
    run.raw.assign(cfg.trials, std::numeric_limits<double>::quiet_NaN());
    run_trials(cfg.trials, resolve_workers(cfg.workers), [&](std::size_t t) {
      try {
        const SeedStream s = master.substream(g * cfg.trials + t);
        const ComplexVector ev = scaled_product_eigenvalues(factory(run.n, s.substream(0)));
        double sum = 0.0;
        for (Eigen::Index i = 0; i < ev.size(); ++i) sum += f(ev(i));
        run.raw[t] = sum;
      } catch (const std::exception&) {
        run.raw[t] = std::numeric_limits<double>::quiet_NaN();
      }
    });
    std::vector<double> kept;
    for (double x : run.raw) {
      if (std::isnan(x)) {
        ++run.excluded;
      } else {
        kept.push_back(x);
      }
    }
    for (double x : kept) run.mean += x;
    if (!kept.empty()) run.mean /= static_cast<double>(kept.size());
    for (double x : kept) run.values.push_back(x - run.mean);
    run.empirical_variance = sample_variance(run.values);
    run.variance_ci = bootstrap_variance(run.values, cfg.bootstrap_resamples, bootstrap_root.substream(g));
    run.qq_deviation = qq_deviation(run.values);
    run.failure_budget_exceeded =
        static_cast<double>(run.excluded) > cfg.failure_budget * static_cast<double>(run.replicas);
    runs.push_back(std::move(run));
  }
  return runs;
}

double RadialHistogram::fraction_within(double r) const {
  if (radii.empty()) return 0.0;
  const auto it = std::upper_bound(radii.begin(), radii.end(), r);
  return static_cast<double>(it - radii.begin()) / static_cast<double>(radii.size());
}

std::vector<RadialHistogram> circular_law_histogram(const ExperimentConfig& cfg, const ChainFactory& chains) {
  cfg.validate();
  const ChainFactory factory = chains ? chains : default_chain_factory(cfg);
  const SeedStream master(cfg.seed);
  std::vector<RadialHistogram> out;
  for (std::size_t g = 0; g < cfg.n_grid.size(); ++g) {
    RadialHistogram h;
    h.n = cfg.n_grid[g];
    std::vector<std::vector<double>> per_trial(cfg.trials);
    std::vector<std::exception_ptr> errors(cfg.trials);
    run_trials(cfg.trials, resolve_workers(cfg.workers), [&](std::size_t t) {
      try {
        const SeedStream s = master.substream(g * cfg.trials + t);
        const ComplexVector ev = scaled_product_eigenvalues(factory(h.n, s.substream(0)));
        for (Eigen::Index i = 0; i < ev.size(); ++i) per_trial[t].push_back(std::abs(ev(i)));
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    for (const auto& v : per_trial) h.radii.insert(h.radii.end(), v.begin(), v.end());
    std::sort(h.radii.begin(), h.radii.end());
    h.total = h.radii.size();
    h.edges.resize(cfg.bins + 1);
    for (std::size_t b = 0; b <= cfg.bins; ++b) {
      h.edges[b] = cfg.r_max * static_cast<double>(b) / static_cast<double>(cfg.bins);
    }
    h.counts.assign(cfg.bins, 0);
    for (double r : h.radii) {
      if (r > cfg.r_max) {
        ++h.overflow;
        continue;
      }
      auto b = static_cast<std::size_t>(r / cfg.r_max * static_cast<double>(cfg.bins));
      h.counts[std::min(b, cfg.bins - 1)]++;
    }
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace prodsv
