#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <set>

#include "oracles.hpp"
#include "prodsv/experiments.hpp"

using namespace prodsv;

namespace {

ExperimentConfig small_sweep() {
  ExperimentConfig cfg;
  cfg.n_grid = {10, 20};
  cfg.factors = 2;
  cfg.trials = 12;
  cfg.seed = 99;
  return cfg;
}

/// Normal-approximation oracle for the two-sided 95% Wilson bounds: roots of
/// (p - phat)^2 = z^2 p (1 - p) / n, found by bisection.
std::pair<double, double> wilson_roots(double k, double n) {
  const double z = 1.959963984540054;
  const double ph = k / n;
  auto g = [&](double p) { return (p - ph) * (p - ph) - z * z * p * (1 - p) / n; };
  auto root = [&](double lo, double hi) {
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if ((g(lo) > 0) == (g(mid) > 0)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };
  return {ph == 0 ? 0.0 : root(0.0, ph), ph == 1 ? 1.0 : root(ph, 1.0)};
}

}  // namespace

TEST(ExperimentConfig, ValidationNamesField) {
  auto expect_field = [](ExperimentConfig cfg, const std::string& field) {
    try {
      cfg.validate();
      FAIL() << "expected rejection for " << field;
    } catch (const std::invalid_argument& e) {
      EXPECT_EQ(std::string(e.what()).rfind(field + ":", 0), 0u) << e.what();
    }
  };
  ExperimentConfig ok;
  EXPECT_NO_THROW(ok.validate());
  ExperimentConfig c = ok;
  c.A = 2.0;
  expect_field(c, "A");
  c = ok;
  c.A = 0.0;
  expect_field(c, "A");
  c = ok;
  c.trials = 0;
  expect_field(c, "trials");
  c = ok;
  c.n_grid.clear();
  expect_field(c, "n_grid");
  c = ok;
  c.factors = 0;
  expect_field(c, "M");
  c = ok;
  c.factors = 3;
  c.distributions = {"ginibre", "rademacher"};
  expect_field(c, "distribution");
  c = ok;
  c.test_function.tau0 = 0.7;
  expect_field(c, "test_function.tau0");
}

TEST(SampleZ, AnnulusBoundsAndDeterminism) {
  const std::size_t n = 200;
  for (std::size_t m : {1u, 2u, 4u}) {
    const double hw = 0.2 / (1000.0 * double(m));
    for (std::uint64_t s = 0; s < 200; ++s) {
      const Complex z = sample_z(ZRule{}, n, m, 0.2, SeedStream(s));
      EXPECT_GE(std::abs(z), std::pow(double(n), 0.5 - hw) * (1 - 1e-15));
      EXPECT_LE(std::abs(z), std::pow(double(n), 0.5 + hw) * (1 + 1e-15));
      EXPECT_TRUE(in_regime(z, n));
      EXPECT_EQ(z, sample_z(ZRule{}, n, m, 0.2, SeedStream(s)));
    }
  }
}

TEST(SampleZ, SqrtNAndFixed) {
  ZRule r;
  r.kind = ZRule::Kind::sqrt_n;
  r.argument = 0.0;
  EXPECT_NEAR(std::abs(sample_z(r, 49, 1, 0.2, SeedStream(1)) - Complex(7.0, 0.0)), 0.0, 1e-14);
  r.kind = ZRule::Kind::fixed;
  r.modulus = 2.5;
  r.argument = std::numbers::pi / 2;
  EXPECT_NEAR(std::abs(sample_z(r, 49, 1, 0.2, SeedStream(1)) - Complex(0.0, 2.5)), 0.0, 1e-14);
}

TEST(InRegime, Boundaries) {
  EXPECT_TRUE(in_regime(std::sqrt(100.0), 100));
  EXPECT_FALSE(in_regime(100.0 * 100.0, 100));
  EXPECT_FALSE(in_regime(1.0, 100));
}

TEST(Wilson, MatchesQuadraticRoots) {
  for (auto [k, n] : std::vector<std::pair<int, int>>{{0, 10}, {1, 10}, {5, 10}, {10, 10}, {3, 500}, {250, 500}}) {
    const WilsonInterval w = wilson_interval(k, n);
    const auto [lo, hi] = wilson_roots(k, n);
    EXPECT_NEAR(w.lo, lo, 1e-10) << k << "/" << n;
    EXPECT_NEAR(w.hi, hi, 1e-10) << k << "/" << n;
  }
  EXPECT_EQ(wilson_interval(0, 10).lo, 0.0);
  EXPECT_EQ(wilson_interval(10, 10).hi, 1.0);
}

TEST(Workers, ResolutionOrder) {
  EXPECT_EQ(resolve_workers(3), 3u);
  ::setenv("PRODSV_WORKERS", "5", 1);
  EXPECT_EQ(resolve_workers(0), 5u);
  EXPECT_EQ(resolve_workers(2), 2u);
  ::setenv("PRODSV_WORKERS", "garbage", 1);
  EXPECT_EQ(resolve_workers(0), 1u);
  ::unsetenv("PRODSV_WORKERS");
  EXPECT_EQ(resolve_workers(0), 1u);
}

TEST(RunTrials, VisitsEveryIndexOnce) {
  for (std::size_t w : {1u, 2u, 7u}) {
    std::vector<int> hits(100, 0);
    run_trials(100, w, [&](std::size_t i) { ++hits[i]; });
    for (int h : hits) EXPECT_EQ(h, 1);
  }
}

TEST(Sweep, RecordsAreCompleteAndConsistent) {
  const ExperimentConfig cfg = small_sweep();
  const ResultSet rs = run_sv_tail_sweep(cfg);
  ASSERT_EQ(rs.records.size(), 24u);
  ASSERT_EQ(rs.summaries.size(), 2u);
  std::set<std::string> paths;
  for (std::size_t i = 0; i < rs.records.size(); ++i) {
    const TrialRecord& r = rs.records[i];
    EXPECT_EQ(r.trial, i);
    EXPECT_EQ(r.m, 2u);
    EXPECT_EQ(r.n, i < 12 ? 10u : 20u);
    EXPECT_FALSE(r.excluded) << r.error;
    EXPECT_GE(r.sigma_min, 0.0);
    EXPECT_EQ(r.sigma_method, "shift-invert");
    ASSERT_TRUE(r.dist_min);
    EXPECT_LE(r.sigma_min, *r.dist_min * (1 + 1e-8) + 1e-14);
    EXPECT_FALSE(r.wall_ms);
    EXPECT_FALSE(r.out_of_regime);
    paths.insert(r.seed_path);
    // dense checks only at the smallest n
    EXPECT_EQ(r.dense_sigma_min.has_value(), r.n == 10u);
  }
  EXPECT_EQ(paths.size(), 24u);
  EXPECT_EQ(rs.records[5].seed_path, "99/5");
  const GridSummary& s = rs.summaries[0];
  EXPECT_EQ(s.dense_checked, 12u);
  EXPECT_EQ(s.dense_agree, 12u);
  EXPECT_EQ(s.distance_violations, 0u);
  EXPECT_NEAR(s.threshold, std::pow(10.0, -0.7), 1e-15);
  EXPECT_LE(s.sigma_sqrt_n_q10, s.sigma_sqrt_n_median);
  EXPECT_LE(s.sigma_sqrt_n_median, s.sigma_sqrt_n_q90);
  EXPECT_FALSE(rs.failure_budget_exceeded);
}

TEST(Sweep, RecordReproducibleFromSeedAndIndex) {
  ExperimentConfig cfg = small_sweep();
  const ResultSet full = run_sv_tail_sweep(cfg);
  // the same trial index in a larger run gives the same record
  cfg.trials = 20;
  const ResultSet bigger = run_sv_tail_sweep(cfg);
  EXPECT_EQ(full.records[3].z, bigger.records[3].z);
  EXPECT_EQ(full.records[3].sigma_min, bigger.records[3].sigma_min);
  // and it matches a direct recomputation
  const SeedStream trial = SeedStream(cfg.seed).substream(3);
  const Complex z = sample_z(cfg.z_rule, 10, 2, cfg.A, trial.substream(1));
  EXPECT_EQ(z, full.records[3].z);
  const FactorChain chain = default_chain_factory(cfg)(10, trial.substream(0));
  const double dense = oracle::jacobi_singular_values(oracle::cyclic_matrix(chain.factors(), z)).back();
  EXPECT_NEAR(full.records[3].sigma_min / dense, 1.0, 1e-6);
}

TEST(Sweep, WorkerCountDoesNotChangeResults) {
  ExperimentConfig cfg = small_sweep();
  cfg.workers = 1;
  const ResultSet a = run_sv_tail_sweep(cfg);
  cfg.workers = 4;
  const ResultSet b = run_sv_tail_sweep(cfg);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].sigma_min, b.records[i].sigma_min);
    EXPECT_EQ(a.records[i].dist_min, b.records[i].dist_min);
  }
}

TEST(Sweep, SingularNegativeControl) {
  ExperimentConfig cfg;
  cfg.n_grid = {5};
  cfg.factors = 1;
  cfg.trials = 6;
  cfg.z_rule.kind = ZRule::Kind::fixed;
  cfg.z_rule.modulus = 0.0;
  const ResultSet rs = run_sv_tail_sweep(cfg, [](std::size_t n, const SeedStream&) {
    return FactorChain({ComplexMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))});
  });
  EXPECT_EQ(rs.summaries[0].p_hat, 1.0);
  EXPECT_EQ(rs.summaries[0].exceedances, 6u);
  for (const auto& r : rs.records) {
    EXPECT_EQ(r.sigma_method, "dense-fallback");
    EXPECT_TRUE(r.out_of_regime);
  }
}

TEST(Sweep, SingularCoreFallsBackToDense) {
  // X = I with z = 1: the core is exactly zero but Y(z) is still a matrix with sigma_1 = 0
  ExperimentConfig cfg;
  cfg.n_grid = {3};
  cfg.trials = 2;
  cfg.z_rule.kind = ZRule::Kind::fixed;
  cfg.z_rule.modulus = 1.0;
  cfg.z_rule.argument = 0.0;
  const ResultSet rs = run_sv_tail_sweep(cfg, [](std::size_t n, const SeedStream&) { return FactorChain::identity(n, 1); });
  for (const auto& r : rs.records) {
    EXPECT_FALSE(r.excluded);
    EXPECT_EQ(r.sigma_method, "dense-fallback");
    EXPECT_NEAR(r.sigma_min, 0.0, 1e-15);
  }
}

TEST(Sweep, FailureBudget) {
  ExperimentConfig cfg;
  cfg.n_grid = {6};
  cfg.trials = 20;
  int calls = 0;
  const ResultSet rs = run_sv_tail_sweep(cfg, [&](std::size_t n, const SeedStream& s) {
    ++calls;
    SeedStream t = s;
    if (t.below(5) == 0) throw NumericalError("synthetic");
    EnsembleSpec spec;
    spec.n = n;
    return sample_chain(spec, s);
  });
  EXPECT_EQ(calls, 20);
  EXPECT_GT(rs.summaries[0].excluded, 1u);
  EXPECT_TRUE(rs.failure_budget_exceeded);
  for (const auto& r : rs.records) {
    if (r.excluded) {
      EXPECT_EQ(r.error, "synthetic");
    }
  }
  cfg.failure_budget = 1.0;
  EXPECT_FALSE(run_sv_tail_sweep(cfg, [&](std::size_t n, const SeedStream& s) {
                 SeedStream t = s;
                 if (t.below(5) == 0) throw NumericalError("synthetic");
                 EnsembleSpec spec;
                 spec.n = n;
                 return sample_chain(spec, s);
               }).failure_budget_exceeded);
}

TEST(Sweep, TrendFlagDetectsIncrease) {
  // sigma_min = 0 only at the larger n: the exceedance rate jumps from 0 to 1
  ExperimentConfig cfg;
  cfg.n_grid = {4, 8};
  cfg.trials = 30;
  cfg.z_rule.kind = ZRule::Kind::fixed;
  cfg.z_rule.modulus = 1.0;
  cfg.z_rule.argument = 0.0;
  const ResultSet rs = run_sv_tail_sweep(cfg, [](std::size_t n, const SeedStream&) {
    ComplexMatrix x = ComplexMatrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    if (n == 4) x *= 5.0;
    return FactorChain({x});
  });
  EXPECT_EQ(rs.summaries[0].exceedances, 0u);
  EXPECT_EQ(rs.summaries[1].exceedances, 30u);
  EXPECT_FALSE(rs.trend_non_increasing);
}

TEST(Sweep, BothFactorCountsRecordM) {
  for (std::size_t m : {1u, 2u}) {
    ExperimentConfig cfg;
    cfg.n_grid = {8};
    cfg.factors = m;
    cfg.trials = 3;
    for (const auto& r : run_sv_tail_sweep(cfg).records) EXPECT_EQ(r.m, m);
  }
}

TEST(Sweep, TimingOnlyWhenRequested) {
  ExperimentConfig cfg;
  cfg.n_grid = {6};
  cfg.trials = 2;
  cfg.record_timing = true;
  for (const auto& r : run_sv_tail_sweep(cfg).records) {
    ASSERT_TRUE(r.wall_ms);
    EXPECT_GE(*r.wall_ms, 0.0);
  }
}

TEST(NullMass, ProfilesAndResiduals) {
  ExperimentConfig cfg;
  cfg.n_grid = {20, 40};
  cfg.factors = 2;
  cfg.trials = 8;
  cfg.z_rule.kind = ZRule::Kind::sqrt_n;
  const ResultSet rs = run_null_mass_experiment(cfg);
  ASSERT_EQ(rs.records.size(), 16u);
  for (const auto& r : rs.records) {
    ASSERT_FALSE(r.excluded) << r.error;
    ASSERT_EQ(r.mass_profile.size(), 2u);
    EXPECT_NEAR(r.mass_profile[0] * r.mass_profile[0] + r.mass_profile[1] * r.mass_profile[1], 1.0, 1e-8);
    ASSERT_TRUE(r.null_residual && r.max_system_residual && r.incompressible && r.a && r.b);
    EXPECT_LE(*r.null_residual, 1e-9);
    EXPECT_LE(*r.max_system_residual, 1e-8);
    EXPECT_NEAR(*r.a, 1.0 / std::log(double(r.n)), 1e-15);
    EXPECT_NEAR(*r.b, std::pow(double(r.n), -0.25), 1e-15);
    EXPECT_LE(r.sigma_min, *r.dist_min * (1 + 1e-8) + 1e-14);
  }
  ASSERT_TRUE(rs.mass_slope);
  EXPECT_TRUE(std::isfinite(rs.mass_slope->slope));
  const GridSummary& s = rs.summaries[1];
  EXPECT_NEAR(s.mass_threshold, std::pow(40.0, -0.1), 1e-15);
  EXPECT_LE(s.both_pass, std::min(s.mass_pass, s.incompressible));
}

TEST(NullMass, SingleFactorProfileIsOne) {
  ExperimentConfig cfg;
  cfg.n_grid = {12};
  cfg.trials = 4;
  for (const auto& r : run_null_mass_experiment(cfg).records) {
    ASSERT_EQ(r.mass_profile.size(), 1u);
    EXPECT_NEAR(r.mass_profile[0], 1.0, 1e-12);
  }
}

TEST(NullMass, OutOfRegimeFlagged) {
  ExperimentConfig cfg;
  cfg.n_grid = {10};
  cfg.factors = 2;
  cfg.trials = 3;
  cfg.z_rule.kind = ZRule::Kind::fixed;
  cfg.z_rule.modulus = 100.0;  // n^2
  const ResultSet rs = run_null_mass_experiment(cfg);
  EXPECT_EQ(rs.summaries[0].out_of_regime, 3u);
  for (const auto& r : rs.records) {
    EXPECT_TRUE(r.out_of_regime);
    EXPECT_FALSE(r.excluded);
  }
}
