#include "prodsv/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "prodsv/geometry.hpp"
#include "prodsv/spectra.hpp"

namespace prodsv {

namespace {

constexpr double kWilsonZ = 1.959963984540054;

double quantile_of(std::vector<double> v, double level) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double pos = level * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::string seed_path(std::uint64_t seed, std::size_t trial) {
  return std::to_string(seed) + "/" + std::to_string(trial);
}

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct Slot {
  std::size_t grid_index;
  std::size_t n;
  std::size_t trial;
};

std::vector<Slot> slots_for(const ExperimentConfig& cfg) {
  std::vector<Slot> slots;
  for (std::size_t g = 0; g < cfg.n_grid.size(); ++g) {
    for (std::size_t t = 0; t < cfg.trials; ++t) slots.push_back({g, cfg.n_grid[g], g * cfg.trials + t});
  }
  return slots;
}

/// Runs `body` for every (n, trial) slot in parallel and returns the records
/// in trial order. Numerical failures become excluded records.
template <typename Body>
std::vector<TrialRecord> drive(const ExperimentConfig& cfg, const ChainFactory& chains, Body body) {
  const std::vector<Slot> slots = slots_for(cfg);
  std::vector<TrialRecord> records(slots.size());
  const SeedStream master(cfg.seed);
  run_trials(slots.size(), resolve_workers(cfg.workers), [&](std::size_t i) {
    const Slot& s = slots[i];
    TrialRecord& r = records[i];
    r.trial = s.trial;
    r.seed_path = seed_path(cfg.seed, s.trial);
    r.n = s.n;
    r.m = cfg.factors;
    const auto start = Clock::now();
    const SeedStream trial_stream = master.substream(s.trial);
    try {
      r.z = sample_z(cfg.z_rule, s.n, cfg.factors, cfg.A, trial_stream.substream(1));
      r.out_of_regime = !in_regime(r.z, s.n);
      const FactorChain chain = chains(s.n, trial_stream.substream(0));
      if (chain.length() != cfg.factors || chain.dimension() != s.n) {
        throw std::invalid_argument("chain factory returned a chain of the wrong shape");
      }
      body(r, TranslatedLinearization(chain, r.z));
    } catch (const std::exception& e) {
      r.excluded = true;
      r.error = e.what();
    }
    if (cfg.record_timing) r.wall_ms = elapsed_ms(start);
  });
  return records;
}

void mark_budget(ResultSet& rs, const ExperimentConfig& cfg) {
  for (const GridSummary& s : rs.summaries) {
    if (static_cast<double>(s.excluded) > cfg.failure_budget * static_cast<double>(s.trials)) {
      rs.failure_budget_exceeded = true;
    }
  }
}

}  // namespace

std::string to_string(ZRule::Kind k) {
  switch (k) {
    case ZRule::Kind::annulus: return "annulus";
    case ZRule::Kind::sqrt_n: return "sqrt_n";
    case ZRule::Kind::fixed: return "fixed";
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  if (n_grid.empty()) throw std::invalid_argument("n_grid: must be nonempty");
  for (std::size_t n : n_grid) {
    if (n == 0) throw std::invalid_argument("n_grid: sizes must be positive");
  }
  if (factors == 0) throw std::invalid_argument("M: must be at least 1");
  if (!(A > 0.0 && A < 1.0)) throw std::invalid_argument("A: must lie in (0, 1)");
  if (!(epsilon0 > 0.0)) throw std::invalid_argument("epsilon0: must be positive");
  if (!(sparse_epsilon > 0.0)) throw std::invalid_argument("sparse_epsilon: must be positive");
  if (trials == 0) throw std::invalid_argument("trials: must be at least 1");
  if (distributions.empty() || (distributions.size() != 1 && distributions.size() != factors)) {
    throw std::invalid_argument("distribution: give one name or one per factor");
  }
  if (z_rule.kind == ZRule::Kind::fixed && !(z_rule.modulus >= 0.0 && std::isfinite(z_rule.modulus))) {
    throw std::invalid_argument("z_rule.abs: must be a finite non-negative number");
  }
  if (z_rule.argument && !std::isfinite(*z_rule.argument)) throw std::invalid_argument("z_rule.arg: must be finite");
  if (!(tol > 0.0)) throw std::invalid_argument("tol: must be positive");
  if (!(failure_budget >= 0.0 && failure_budget <= 1.0)) {
    throw std::invalid_argument("failure_budget: must lie in [0, 1]");
  }
  if (bins == 0) throw std::invalid_argument("bins: must be positive");
  if (!(r_max > 0.0)) throw std::invalid_argument("r_max: must be positive");
  if (variance.grid_resolution < 4) throw std::invalid_argument("grid_resolution: must be at least 4");
  if (variance.fourier_modes < 4) throw std::invalid_argument("fourier_modes: must be at least 4");
  test_function.validate();
}

ChainFactory default_chain_factory(const ExperimentConfig& cfg) {
  std::vector<EntryDistribution> laws;
  for (const auto& name : cfg.distributions) laws.push_back(distribution_by_name(name));
  const std::size_t factors = cfg.factors;
  return [laws, factors](std::size_t n, const SeedStream& stream) {
    EnsembleSpec spec;
    spec.n = n;
    spec.factors = factors;
    spec.distribution = laws.front();
    if (laws.size() > 1) {
      for (std::size_t k = 0; k < laws.size(); ++k) spec.factor_overrides.emplace(k, laws[k]);
    }
    spec.validate();
    return sample_chain(spec, stream);
  };
}

Complex sample_z(const ZRule& rule, std::size_t n, std::size_t factors, double A, SeedStream stream) {
  const double dn = static_cast<double>(n);
  double modulus = 0.0;
  switch (rule.kind) {
    case ZRule::Kind::annulus: {
      const double half_width = A / (1000.0 * static_cast<double>(factors));
      const double lo = (0.5 - half_width) * std::log(dn);
      const double hi = (0.5 + half_width) * std::log(dn);
      modulus = std::exp(lo + (hi - lo) * stream.uniform01());
      break;
    }
    case ZRule::Kind::sqrt_n: modulus = std::sqrt(dn); break;
    case ZRule::Kind::fixed: modulus = rule.modulus; break;
  }
  const double u = stream.uniform01();
  const double arg = rule.argument ? *rule.argument : 2.0 * std::numbers::pi * u;
  return std::polar(modulus, arg);
}

bool in_regime(Complex z, std::size_t n) {
  const double dn = static_cast<double>(n);
  const double r = std::abs(z);
  return r >= std::pow(dn, 0.4) && r <= std::pow(dn, 0.6);
}

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials) {
  if (trials == 0) return {0.0, 1.0};
  const double nt = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / nt;
  const double z2 = kWilsonZ * kWilsonZ;
  const double denom = 1.0 + z2 / nt;
  const double center = (p + z2 / (2.0 * nt)) / denom;
  const double half = kWilsonZ * std::sqrt(p * (1.0 - p) / nt + z2 / (4.0 * nt * nt)) / denom;
  return {successes == 0 ? 0.0 : std::max(0.0, center - half), successes == trials ? 1.0 : std::min(1.0, center + half)};
}

std::size_t resolve_workers(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PRODSV_WORKERS")) {
    std::size_t v = 0;
    const char* end = env + std::char_traits<char>::length(env);
    const auto [ptr, ec] = std::from_chars(env, end, v);
    if (ec == std::errc() && ptr == end && v > 0) return v;
  }
  return 1;
}

void run_trials(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

ResultSet run_sv_tail_sweep(const ExperimentConfig& cfg, const ChainFactory& chains) {
  cfg.validate();
  const ChainFactory factory = chains ? chains : default_chain_factory(cfg);
  const std::size_t check_n = *std::min_element(cfg.n_grid.begin(), cfg.n_grid.end());

  ResultSet rs;
  rs.experiment = "sweep";
  rs.records = drive(cfg, factory, [&](TrialRecord& r, const TranslatedLinearization& lin) {
    ShiftInvertOptions opts;
    bool dense_fallback = r.z == Complex(0.0, 0.0);
    if (!dense_fallback) {
      try {
        const SmallestSingularValue s = smallest_singular_value(lin, SvdMethod::shift_invert, cfg.tol, opts);
        r.sigma_min = s.value;
        r.sigma_method = to_string(SvdMethod::shift_invert);
        r.iterations = s.iterations;
        r.gap_limited = s.gap_limited;
      } catch (const SingularCoreError&) {
        dense_fallback = true;
      }
    }
    if (dense_fallback) {
      r.sigma_min = smallest_singular_value(lin, SvdMethod::dense).value;
      r.sigma_method = "dense-fallback";
    }
    if (cfg.dense_check && r.n == check_n) {
      r.dense_sigma_min = dense_fallback ? r.sigma_min : smallest_singular_value(lin, SvdMethod::dense).value;
    }
    if (cfg.row_distances) {
      const RowDistanceSummary d = row_distances(materialize(lin));
      r.dist_min = d.min;
      r.dist_argmin = d.argmin;
    }
  });

  for (std::size_t g = 0; g < cfg.n_grid.size(); ++g) {
    GridSummary s;
    s.n = cfg.n_grid[g];
    s.trials = cfg.trials;
    s.threshold = std::pow(static_cast<double>(s.n), -0.5 - cfg.A);
    std::vector<double> scaled;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      const TrialRecord& r = rs.records[g * cfg.trials + t];
      if (r.excluded) {
        ++s.excluded;
        continue;
      }
      if (r.sigma_min <= s.threshold) ++s.exceedances;
      scaled.push_back(r.sigma_min * std::sqrt(static_cast<double>(s.n)));
      if (r.dense_sigma_min) {
        ++s.dense_checked;
        if (std::abs(r.sigma_min - *r.dense_sigma_min) <= 1e-6 * std::max(*r.dense_sigma_min, 1e-300) ||
            r.sigma_min == *r.dense_sigma_min) {
          ++s.dense_agree;
        }
      }
      if (r.dist_min && r.sigma_min > *r.dist_min * (1.0 + 1e-8) + 1e-14) ++s.distance_violations;
    }
    const std::size_t kept = s.trials - s.excluded;
    s.p_hat = kept ? static_cast<double>(s.exceedances) / static_cast<double>(kept) : 0.0;
    s.ci = wilson_interval(s.exceedances, kept);
    s.sigma_sqrt_n_q10 = quantile_of(scaled, 0.1);
    s.sigma_sqrt_n_median = quantile_of(scaled, 0.5);
    s.sigma_sqrt_n_q90 = quantile_of(scaled, 0.9);
    rs.summaries.push_back(s);
  }
  for (std::size_t g = 1; g < rs.summaries.size(); ++g) {
    if (rs.summaries[g].ci.lo > rs.summaries[g - 1].ci.hi) rs.trend_non_increasing = false;
  }
  mark_budget(rs, cfg);
  return rs;
}

ResultSet run_null_mass_experiment(const ExperimentConfig& cfg, const ChainFactory& chains) {
  cfg.validate();
  const ChainFactory factory = chains ? chains : default_chain_factory(cfg);

  ResultSet rs;
  rs.experiment = "nullmass";
  rs.records = drive(cfg, factory, [&](TrialRecord& r, const TranslatedLinearization& lin) {
    const std::size_t last = lin.size() - 1;
    const NullVector nv = null_vector(lin, last);
    r.mass_profile.resize(lin.blocks());
    const RealVector mp = mass_profile(nv.u);
    for (std::size_t j = 0; j < lin.blocks(); ++j) r.mass_profile[j] = mp(static_cast<Eigen::Index>(j));
    r.null_residual = nv.relative_residual;
    r.degenerate = nv.degenerate;
    r.max_system_residual = system_residuals(nv.u, lin, last).maxCoeff();

    const SphereParams p = SphereParams::log_scaled(r.n, cfg.sparse_epsilon);
    r.a = p.a;
    r.b = p.b;
    const double head = nv.u.block(0).norm();
    if (head > 0.0) {
      const ComplexVector u1 = nv.u.block(0) / head;
      r.incompressible = classify(u1, p, 1e-10).incompressible();
    } else {
      r.incompressible = false;
    }

    if (r.z != Complex(0.0, 0.0)) {
      try {
        const SmallestSingularValue s = smallest_singular_value(lin, SvdMethod::shift_invert, cfg.tol);
        r.sigma_min = s.value;
        r.sigma_method = to_string(SvdMethod::shift_invert);
        r.iterations = s.iterations;
        r.gap_limited = s.gap_limited;
      } catch (const SingularCoreError&) {
        r.sigma_method.clear();
      }
    }
    if (r.sigma_method.empty()) {
      r.sigma_min = smallest_singular_value(lin, SvdMethod::dense).value;
      r.sigma_method = "dense-fallback";
    }
    if (cfg.row_distances) {
      const RowDistanceSummary d = row_distances(materialize(lin));
      r.dist_min = d.min;
      r.dist_argmin = d.argmin;
    }
  });

  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t g = 0; g < cfg.n_grid.size(); ++g) {
    GridSummary s;
    s.n = cfg.n_grid[g];
    s.trials = cfg.trials;
    s.mass_threshold = std::pow(static_cast<double>(s.n), -cfg.epsilon0);
    std::vector<double> mins;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      const TrialRecord& r = rs.records[g * cfg.trials + t];
      if (r.out_of_regime) ++s.out_of_regime;
      if (r.excluded) {
        ++s.excluded;
        continue;
      }
      const double mn = std::min(r.mass_profile.front(), r.mass_profile.back());
      mins.push_back(mn);
      const bool mass_ok = mn >= s.mass_threshold;
      const bool incomp = r.incompressible.value_or(false);
      if (mass_ok) ++s.mass_pass;
      if (incomp) ++s.incompressible;
      if (mass_ok && incomp) ++s.both_pass;
      if (mn > 0.0) {
        xs.push_back(std::log(static_cast<double>(s.n)));
        ys.push_back(std::log(mn));
      }
    }
    s.min_mass_median = quantile_of(mins, 0.5);
    rs.summaries.push_back(s);
  }

  const bool distinct = !xs.empty() && std::any_of(xs.begin(), xs.end(), [&](double x) { return x != xs.front(); });
  if (distinct) {
    const double k = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= k;
    my /= k;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    rs.mass_slope = fit;
  }
  mark_budget(rs, cfg);
  return rs;
}

}  // namespace prodsv
