#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "prodsv/ensembles.hpp"
#include "prodsv/linear_statistics.hpp"
#include "prodsv/linearization.hpp"
#include "prodsv/rng.hpp"

namespace prodsv {

/// How the spectral parameter z is drawn per trial.
///   annulus:  |z| log-uniform in [n^{1/2 - A/(1000 M)}, n^{1/2 + A/(1000 M)}]
///   sqrt_n:   |z| = sqrt(n)
///   fixed:    |z| = modulus
/// The argument is `argument` when set, otherwise uniform on [0, 2 pi).
struct ZRule {
  enum class Kind { annulus, sqrt_n, fixed };
  Kind kind = Kind::annulus;
  double modulus = 0.0;
  std::optional<double> argument;
};

std::string to_string(ZRule::Kind k);

struct ExperimentConfig {
  std::vector<std::size_t> n_grid{50};
  std::size_t factors = 1;
  double A = 0.2;
  /// Mass threshold exponent: a trial passes when min(||u_1||, ||u_M||) >= n^{-epsilon0}.
  double epsilon0 = 0.1;
  /// b = n^{-sparse_epsilon} in the incompressibility check (a = 1 / log n).
  double sparse_epsilon = 0.25;
  ZRule z_rule;
  /// One name for every factor, or one per factor.
  std::vector<std::string> distributions{"ginibre"};
  std::size_t trials = 100;
  std::uint64_t seed = 1;

  /// Cross-check shift-invert sigma_1 against the dense SVD at min(n_grid).
  bool dense_check = true;
  bool row_distances = true;
  double tol = 1e-10;
  /// Fraction of excluded trials per n above which the run fails.
  double failure_budget = 0.05;
  /// Store per-trial wall time in records (breaks byte-identical reruns).
  bool record_timing = false;
  /// 0: PRODSV_WORKERS from the environment, else 1.
  std::size_t workers = 0;

  // linear statistics
  TestFunction test_function;
  VarianceOptions variance;
  std::size_t bootstrap_resamples = 1000;

  // radial histogram
  std::size_t bins = 30;
  double r_max = 1.5;

  /// Throws std::invalid_argument with the offending field name.
  void validate() const;
};

/// Chain sampler for a given n; the default draws from the configured laws.
using ChainFactory = std::function<FactorChain(std::size_t n, const SeedStream&)>;

ChainFactory default_chain_factory(const ExperimentConfig& cfg);

Complex sample_z(const ZRule& rule, std::size_t n, std::size_t factors, double A, SeedStream stream);

/// |z| within [n^0.4, n^0.6].
bool in_regime(Complex z, std::size_t n);

struct WilsonInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// 95% Wilson score interval.
WilsonInterval wilson_interval(std::size_t successes, std::size_t trials);

std::size_t resolve_workers(std::size_t requested);

/// Calls fn(i) for i in [0, count) on `workers` threads. fn must not throw.
void run_trials(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

struct TrialRecord {
  std::size_t trial = 0;
  std::string seed_path;
  std::size_t n = 0;
  std::size_t m = 0;
  Complex z;
  bool excluded = false;
  std::string error;
  bool out_of_regime = false;

  double sigma_min = 0.0;
  std::string sigma_method;
  std::size_t iterations = 0;
  bool gap_limited = false;
  std::optional<double> dense_sigma_min;

  std::optional<double> dist_min;
  std::optional<std::size_t> dist_argmin;

  std::vector<double> mass_profile;
  std::optional<bool> incompressible;
  std::optional<double> a;
  std::optional<double> b;
  std::optional<double> null_residual;
  std::optional<double> max_system_residual;
  bool degenerate = false;

  std::optional<double> wall_ms;
};

struct GridSummary {
  std::size_t n = 0;
  std::size_t trials = 0;
  std::size_t excluded = 0;

  // tail sweep
  double threshold = 0.0;  // n^{-1/2-A}
  std::size_t exceedances = 0;
  double p_hat = 0.0;
  WilsonInterval ci;
  double sigma_sqrt_n_q10 = 0.0;
  double sigma_sqrt_n_median = 0.0;
  double sigma_sqrt_n_q90 = 0.0;
  std::size_t dense_checked = 0;
  std::size_t dense_agree = 0;
  std::size_t distance_violations = 0;

  // null mass
  double mass_threshold = 0.0;  // n^{-epsilon0}
  std::size_t mass_pass = 0;
  std::size_t incompressible = 0;
  std::size_t both_pass = 0;
  double min_mass_median = 0.0;
  std::size_t out_of_regime = 0;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
};

struct ResultSet {
  std::string experiment;
  std::vector<TrialRecord> records;
  std::vector<GridSummary> summaries;
  bool failure_budget_exceeded = false;
  /// wilson_lo(n_{i+1}) <= wilson_hi(n_i) for consecutive grid sizes.
  bool trend_non_increasing = true;
  /// log(min block mass) against log n over all retained trials.
  std::optional<SlopeFit> mass_slope;
};

/// Shift-invert sigma_1 of Y(z) per trial (dense when z = 0 or the core is
/// singular), with dense spot checks at min(n_grid), row distances and the
/// exceedance rate of n^{-1/2-A} per n.
ResultSet run_sv_tail_sweep(const ExperimentConfig& cfg, const ChainFactory& chains = {});

/// Null vector of Y(z) with the last row removed: block mass profile,
/// incompressibility of u_1 / ||u_1|| at (1 / log n, n^{-sparse_epsilon}),
/// system residuals, and the log-log slope of the minimal end-block mass.
ResultSet run_null_mass_experiment(const ExperimentConfig& cfg, const ChainFactory& chains = {});

struct LinearStatisticRun {
  TestFunction f;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t replicas = 0;
  std::size_t excluded = 0;
  std::vector<double> raw;     // sum_j f(lambda_j) per replica (NaN when excluded)
  std::vector<double> values;  // centered by the across-replica mean, retained replicas only
  double mean = 0.0;
  double predicted_variance = 0.0;
  double empirical_variance = 0.0;
  BootstrapInterval variance_ci;
  double qq_deviation = 0.0;
  bool failure_budget_exceeded = false;
};

/// One run per n in the grid; cfg.trials is the replica count.
std::vector<LinearStatisticRun> run_linear_statistic(const ExperimentConfig& cfg, const TestFunction& f,
                                                     const ChainFactory& chains = {});

struct RadialHistogram {
  std::size_t n = 0;
  std::vector<double> edges;  // bins + 1 values from 0 to r_max
  std::vector<std::size_t> counts;
  std::size_t overflow = 0;   // |lambda| > r_max
  std::size_t total = 0;

  /// Fraction of eigenvalues with |lambda| <= r (exact count, not binned).
  double fraction_within(double r) const;
  std::vector<double> radii;  // sorted moduli
};

/// Radial counts of eigenvalues of n^{-M/2} X_1 ... X_M over cfg.trials
/// replicas, one histogram per n.
std::vector<RadialHistogram> circular_law_histogram(const ExperimentConfig& cfg, const ChainFactory& chains = {});

}  // namespace prodsv
