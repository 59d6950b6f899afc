// Acceptance runner: `prodsv_acceptance [N ...]` checks the listed criteria
// (all when none are given) and prints one PASS/FAIL line for each.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "oracles.hpp"
#include "prodsv/ensembles.hpp"
#include "prodsv/experiments.hpp"
#include "prodsv/geometry.hpp"
#include "prodsv/io.hpp"
#include "prodsv/linear_statistics.hpp"
#include "prodsv/linearization.hpp"
#include "prodsv/spectra.hpp"

#ifdef PRODSV_HAVE_CLI
#include "prodsv_cli/cli.hpp"
#endif

using namespace prodsv;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::vector<oracle::Mat> random_factors(oracle::Rand& rng, std::size_t n, std::size_t m) {
  std::vector<oracle::Mat> f;
  for (std::size_t k = 0; k < m; ++k) f.push_back(rng.matrix(Eigen::Index(n), Eigen::Index(n)));
  return f;
}

Complex regime_z(oracle::Rand& rng, std::size_t n) {
  const double r = std::pow(double(n), rng.uniform(0.4, 0.6));
  return std::polar(r, rng.uniform(0.0, 2.0 * M_PI));
}

double relative(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).norm() / b.norm(); }

// ---------------------------------------------------------------------------

Outcome c1() {
  oracle::Rand rng(101);
  double worst = 0.0;
  std::size_t failures = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t m = 1 + t % 4;
    const std::size_t n = 2 + rng.index(29);
    const auto f = random_factors(rng, n, m);
    const Complex z = regime_z(rng, n);
    const oracle::Mat inv = oracle::gauss_jordan_inverse(oracle::cyclic_matrix(f, z));
    const oracle::Mat ref = inv.topLeftCorner(Eigen::Index(n), Eigen::Index(n));
    try {
      const double e = relative(top_left_inverse_block(FactorChain(f), z), ref);
      worst = std::max(worst, e);
      failures += !(e <= 1e-9);
    } catch (const std::exception&) {
      ++failures;
    }
  }
  return {failures == 0, "200 instances, max relative error " + fmt(worst) + ", failures " + std::to_string(failures)};
}

Outcome c2() {
  oracle::Rand rng(202);
  double worst_lib = 0.0, worst_oracle = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t m = 1 + rng.index(4);
    const std::size_t n = 2 + rng.index(60 / m - 1);
    auto f = random_factors(rng, n, m);
    for (auto& x : f) x /= std::sqrt(double(n));
    const MultiplicityReport rep = verify_multiplicity(FactorChain(f));
    worst_lib = std::max(worst_lib, rep.max_pairing_distance);

    // independent: eigenvalues of the naive product against those of Y^M
    oracle::Mat prod = f[0];
    for (std::size_t k = 1; k < m; ++k) prod = oracle::naive_multiply(prod, f[k]);
    const oracle::Mat y = oracle::cyclic_matrix(f, 0.0);
    oracle::Mat ym = y;
    for (std::size_t k = 1; k < m; ++k) ym = oracle::naive_multiply(ym, y);
    Eigen::ComplexEigenSolver<oracle::Mat> ep(prod, false), ey(ym, false);
    std::vector<oracle::C> small(ep.eigenvalues().data(), ep.eigenvalues().data() + n);
    std::vector<oracle::C> big(ey.eigenvalues().data(), ey.eigenvalues().data() + n * m);
    worst_oracle = std::max(worst_oracle, oracle::multiset_distance(small, big, m));
  }
  return {worst_lib <= 1e-7 && worst_oracle <= 1e-7,
          "50 instances, max pairing distance " + fmt(worst_lib) + " (library), " + fmt(worst_oracle) + " (oracle)"};
}

Outcome c3() {
  oracle::Rand rng(303);
  double worst_res = 0.0, worst_dense = 0.0, worst_sigma = 0.0, worst_ops = 0.0, worst_setup = 0.0;
  std::size_t failures = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t m = 1 + t % 4;
    const std::size_t n = 2 + rng.index(300 / m - 1);
    const auto f = random_factors(rng, n, m);
    const Complex z = regime_z(rng, n);
    const TranslatedLinearization lin{FactorChain(f), z};
    const oracle::Mat y = oracle::cyclic_matrix(f, z);
    const oracle::Vec w = rng.vector(y.rows());
    try {
      const StructuredSolver solver(lin);
      OperationCounter ops;
      const BlockVector u = solver.solve(BlockVector(w, m), &ops);
      const double res = (y * u.data() - w).norm() / w.norm();
      const double dn = (u.data() - oracle::gauss_solve(y, w)).norm() / u.data().norm();
      const double nn = double(n) * double(n);
      worst_res = std::max(worst_res, res);
      worst_dense = std::max(worst_dense, dn);
      worst_ops = std::max(worst_ops, double(ops.multiply_adds) / (double(m) * nn));
      worst_setup = std::max(worst_setup, double(solver.setup_multiply_adds()) / (double(m) * nn * double(n)));

      double ref;
      if (y.rows() <= 120) {
        ref = oracle::jacobi_singular_values(y).back();
      } else {
        ref = Eigen::BDCSVD<oracle::Mat>(y).singularValues().minCoeff();
      }
      const double s = smallest_singular_value(lin, SvdMethod::shift_invert).value;
      worst_sigma = std::max(worst_sigma, std::abs(s - ref) / ref);
      failures += !(res <= 1e-9 && dn <= 1e-9 && std::abs(s - ref) <= 1e-6 * ref);
    } catch (const std::exception&) {
      ++failures;
    }
  }
  // per-solve cost bounded by a constant times M n^2 and setup by M n^3
  const bool counters = worst_ops <= 6.0 && worst_setup <= 1.0;
  return {failures == 0 && counters,
          "200 instances, max residual " + fmt(worst_res) + ", max dense difference " + fmt(worst_dense) +
              ", max sigma relative error " + fmt(worst_sigma) + ", solve ops/(M n^2) <= " + fmt(worst_ops) +
              ", setup ops/(M n^3) <= " + fmt(worst_setup) + ", failures " + std::to_string(failures)};
}

Outcome c4() {
  oracle::Rand rng(404);
  std::size_t holds = 0;
  double tightest = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t m = 1 + rng.index(4);
    const std::size_t n = 2 + rng.index(120 / m - 1);
    const auto f = random_factors(rng, n, m);
    const TranslatedLinearization lin{FactorChain(f), regime_z(rng, n)};
    const double sigma = smallest_singular_value(lin, SvdMethod::dense).value;
    const RowDistanceSummary d = row_distances(materialize(lin));
    holds += sigma <= d.min * (1 + 1e-8) + 1e-14;
    tightest = std::max(tightest, sigma / d.min);
  }
  return {holds == 100, std::to_string(holds) + "/100 trials with sigma_1 <= min dist_k, max ratio " + fmt(tightest)};
}

Outcome c5() {
  oracle::Rand rng(505);
  double worst_orth = 0.0, worst_sys = 0.0, worst_indep = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t m = 2 + t % 2;
    const std::size_t n = 2 + rng.index(99);
    const auto f = random_factors(rng, n, m);
    const TranslatedLinearization lin{FactorChain(f), regime_z(rng, n)};
    const std::size_t removed = n * m - 1;
    const NullVector nv = null_vector(lin, removed);
    worst_orth = std::max(worst_orth, nv.relative_residual);
    worst_sys = std::max(worst_sys, system_residuals(nv.u, lin, removed).maxCoeff());
    oracle::Mat y = oracle::cyclic_matrix(f, lin.shift());
    const oracle::Mat r = y.topRows(y.rows() - 1);
    worst_indep = std::max(worst_indep, (r * nv.u.data()).norm() / r.norm());
  }
  return {worst_orth <= 1e-9 && worst_indep <= 1e-9 && worst_sys <= 1e-8,
          "100 trials, max orthogonality residual " + fmt(worst_orth) + " (independent " + fmt(worst_indep) +
              "), max system residual " + fmt(worst_sys)};
}

Outcome c6() {
  oracle::Rand rng(606);
  double worst = 0.0;
  std::size_t mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t d = 1 + rng.index(8);
    oracle::Vec v = rng.unit_vector(Eigen::Index(d));
    if (t % 5 == 0) {
      // near-sparse vectors put the distance close to b
      for (Eigen::Index i = 1; i < v.size(); ++i) v(i) *= 0.05;
      v.normalize();
    }
    SphereParams p;
    p.dimension = d;
    p.a = rng.uniform(0.05, 0.95);
    p.b = rng.uniform(0.01, 0.6);
    const double brute = oracle::brute_dist_to_sparse(v, p.sparse_size());
    const double lib = dist_to_sparse(v, p.a);
    worst = std::max(worst, std::abs(lib - brute));
    const SphereClassification c = classify(v, p);
    mismatches += c.incompressible() != (brute > p.b);
  }
  return {worst <= 1e-12 && mismatches == 0,
          "1000 vectors, max |dist - brute force| " + fmt(worst) + ", partition mismatches " + std::to_string(mismatches)};
}

Outcome c7() {
  const EntryDistribution d = gaussian_matching_discrete();
  std::vector<std::pair<oracle::C, double>> atoms;
  for (const Atom& a : *d.atoms()) atoms.emplace_back(a.value, a.probability);
  double worst = 0.0;
  std::size_t orders = 0;
  for (int a = 0; a <= 4; ++a) {
    for (int b = 0; a + b <= 4; ++b) {
      if (a + b == 0) continue;
      ++orders;
      worst = std::max(worst, std::abs(oracle::atomic_moment(atoms, a, b) - oracle::complex_gaussian_moment(a, b)));
    }
  }
  const MomentReport rep = verify_moments(d, 1000000, 4.0, SeedStream(707));
  double worst_sigmas = 0.0;
  for (const MomentCheck& c : rep.checks) worst_sigmas = std::max(worst_sigmas, c.deviation_sigmas);
  return {orders == 14 && worst <= 1e-12 && rep.all_pass,
          std::to_string(orders) + " exact moments, max deviation " + fmt(worst) + "; 1e6 samples, max " +
              fmt(worst_sigmas) + " standard errors"};
}

/// Median windows for sigma_1 sqrt(n), frozen from pilot runs (seeds 777 and
/// 778): pilot medians 3.22 / 3.79 / 4.57 (M = 1) and 1.94 / 2.19 / 2.56
/// (M = 2) at n = 50 / 100 / 200, widened by 15%.
struct MedianWindow {
  double lo;
  double hi;
};
constexpr MedianWindow kMedianWindow[2] = {{2.80, 5.26}, {1.68, 2.94}};

Outcome c8() {
  bool ok = true;
  std::string detail;
  for (std::size_t m : {1u, 2u}) {
    ExperimentConfig cfg;
    cfg.n_grid = {50, 100, 200};
    cfg.factors = m;
    cfg.A = 0.2;
    cfg.trials = 500;
    cfg.seed = 20261017 + m;
    const ResultSet rs = run_sv_tail_sweep(cfg);
    const MedianWindow w = kMedianWindow[m - 1];
    bool in_window = true;
    std::string meds, rates;
    std::size_t violations = 0, excluded = 0, agree = 0, checked = 0;
    for (const GridSummary& s : rs.summaries) {
      in_window = in_window && s.sigma_sqrt_n_median >= w.lo && s.sigma_sqrt_n_median <= w.hi;
      meds += (meds.empty() ? "" : "/") + fmt(s.sigma_sqrt_n_median);
      rates += (rates.empty() ? "" : "/") + fmt(s.p_hat);
      violations += s.distance_violations;
      excluded += s.excluded;
      agree += s.dense_agree;
      checked += s.dense_checked;
    }
    const bool m_ok = rs.trend_non_increasing && in_window && !rs.failure_budget_exceeded && violations == 0 &&
                      agree == checked;
    ok = ok && m_ok;
    detail += "M=" + std::to_string(m) + ": p_hat " + rates + (rs.trend_non_increasing ? " non-increasing" : " increasing") +
              ", median sigma*sqrt(n) " + meds + " in [" + fmt(w.lo) + ", " + fmt(w.hi) + "]" +
              (in_window ? "" : " (outside)") + ", dense agreement " + std::to_string(agree) + "/" +
              std::to_string(checked) + ", excluded " + std::to_string(excluded) + "; ";
  }
  return {ok, detail};
}

Outcome c9() {
  ExperimentConfig cfg;
  cfg.n_grid = {200};
  cfg.factors = 2;
  cfg.trials = 200;
  cfg.z_rule.kind = ZRule::Kind::sqrt_n;
  cfg.seed = 20261017;
  const ResultSet rs = run_null_mass_experiment(cfg);
  const GridSummary& s = rs.summaries.front();
  const double rate = double(s.both_pass) / double(s.trials);
  return {rate >= 0.9 && !rs.failure_budget_exceeded,
          "mass >= n^-0.1: " + std::to_string(s.mass_pass) + "/200, incompressible: " + std::to_string(s.incompressible) +
              "/200, both: " + std::to_string(s.both_pass) + "/200 (" + fmt(100 * rate) + "%), excluded " +
              std::to_string(s.excluded)};
}

Outcome c10() {
  ExperimentConfig cfg;
  cfg.n_grid = {256};
  cfg.factors = 1;
  cfg.trials = 200;
  cfg.seed = 20261017;
  const TestFunction f = TestFunction::radial_bump(0.2);
  const LinearStatisticRun g = run_linear_statistic(cfg, f).front();
  cfg.distributions = {"gauss-match-discrete"};
  cfg.seed = 20261018;
  const LinearStatisticRun d = run_linear_statistic(cfg, f).front();
  const double ratio = g.empirical_variance / g.predicted_variance;
  const double se = std::hypot(g.variance_ci.standard_error, d.variance_ci.standard_error);
  const double gap = std::abs(g.empirical_variance - d.empirical_variance);
  const bool ok = std::abs(ratio - 1.0) <= 0.3 && gap <= 3.0 * se && g.excluded == 0 && d.excluded == 0;
  return {ok, "predicted " + fmt(g.predicted_variance) + ", ginibre " + fmt(g.empirical_variance) + " (ratio " +
                  fmt(ratio) + "), gauss-match-discrete " + fmt(d.empirical_variance) + ", |difference| " + fmt(gap) +
                  " vs 3 sigma " + fmt(3.0 * se)};
}

Outcome c11() {
  const TestFunction f = TestFunction::radial_bump(0.2);
  VarianceOptions base;
  const double v0 = predicted_variance(f, base).total();
  VarianceOptions grid = base;
  grid.grid_resolution *= 2;
  VarianceOptions modes = base;
  modes.fourier_modes *= 2;
  const double dg = std::abs(predicted_variance(f, grid).total() / v0 - 1.0);
  const double dm = std::abs(predicted_variance(f, modes).total() / v0 - 1.0);
  VarianceOptions lin = base;
  lin.check_support = false;
  const double x = predicted_variance(TestFunction::coordinate_x(), lin).total();
  return {dg <= 5e-3 && dm <= 5e-3 && std::abs(x - 0.5) <= 1e-3,
          "bump " + fmt(v0) + ", grid doubling change " + fmt(dg) + ", mode doubling change " + fmt(dm) +
              ", f = x total " + fmt(x)};
}

Outcome c12() {
#ifdef PRODSV_HAVE_CLI
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "prodsv_acceptance_c12";
  fs::remove_all(root);
  fs::create_directories(root / "first");
  fs::create_directories(root / "second");
  {
    std::ofstream(root / "config.json") << R"({"n_grid": [20, 30], "M": 2, "trials": 12, "seed": 4242,
      "z_rule": {"kind": "sqrt_n"}, "bootstrap_resamples": 50})";
  }
  std::ostringstream sink;
  std::string detail;
  bool ok = true;
  for (const std::string cmd : {"sweep", "nullmass", "linstat", "histogram"}) {
    const int a = cli::run({cmd, "--config", (root / "config.json").string(), "--out", (root / "first").string(),
                            "--workers", "1"},
                           sink, sink);
    const int b = cli::run({cmd, "--manifest", (root / "first" / (cmd + "_manifest.json")).string(), "--out",
                            (root / "second").string(), "--workers", "3"},
                           sink, sink);
    const bool same = a == 0 && b == 0 &&
                      read_text(root / "first" / (cmd + ".jsonl")) == read_text(root / "second" / (cmd + ".jsonl"));
    ok = ok && same;
    detail += cmd + (same ? " identical" : " differs") + "; ";
  }
  return {ok, detail + "workers 1 vs 3"};
#else
  return {false, "command-line front end not built"};
#endif
}

struct Criterion {
  Outcome (*run)();
  double budget_seconds;
};

const Criterion kCriteria[12] = {{c1, 30},  {c2, 30},   {c3, 120},  {c4, 60},   {c5, 60},   {c6, 30},
                                 {c7, 30},  {c8, 1200}, {c9, 600},  {c10, 3600}, {c11, 60}, {c12, 600}};

bool run_one(int id) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = kCriteria[id - 1].run();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double budget = kCriteria[id - 1].budget_seconds;
  const bool pass = o.pass && secs <= budget;
  std::printf("criterion %d: %s %s [%.1f s of %.0f s]\n", id, pass ? "PASS" : "FAIL", o.detail.c_str(), secs, budget);
  std::fflush(stdout);
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty()) {
    for (int i = 1; i <= 12; ++i) ids.push_back(i);
  }
  bool all = true;
  for (int id : ids) {
    if (id < 1 || id > 12) {
      std::fprintf(stderr, "unknown criterion %d\n", id);
      return 2;
    }
    all = run_one(id) && all;
  }
  return all ? 0 : 1;
}
