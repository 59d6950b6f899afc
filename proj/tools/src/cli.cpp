#include "prodsv_cli/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "prodsv/ensembles.hpp"
#include "prodsv/experiments.hpp"
#include "prodsv/geometry.hpp"
#include "prodsv/io.hpp"
#include "prodsv/linearization.hpp"
#include "prodsv/spectra.hpp"

#ifndef PRODSV_VERSION
#define PRODSV_VERSION "unknown"
#endif

namespace prodsv::cli {

namespace fs = std::filesystem;

namespace {

struct SampleArgs {
  std::size_t n = 0;
  std::size_t m = 0;
  std::string dist = "ginibre";
  std::uint64_t seed = 0;
  std::string out = ".";
  std::string prefix = "factor";
};

struct SvminArgs {
  std::size_t n = 0;
  std::size_t m = 0;
  std::string dist = "ginibre";
  double z_abs = 0.0;
  double z_arg = 0.0;
  std::string method = "shift-invert";
  std::uint64_t seed = 0;
  double tol = 1e-10;
  double agreement_rtol = 1e-6;
  bool identity = false;
  std::vector<std::string> factor_files;
};

struct ExperimentArgs {
  std::string config;
  std::string manifest;
  std::string out = ".";
  std::optional<std::size_t> workers;
  std::optional<std::uint64_t> seed;
};

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(15) << v;
  return os.str();
}

EnsembleSpec spec_for(std::size_t n, std::size_t m, const std::string& dist) {
  EnsembleSpec spec;
  spec.n = n;
  spec.factors = m;
  spec.distribution = distribution_by_name(dist);
  spec.validate();
  return spec;
}

int cmd_sample(const SampleArgs& a, std::ostream& out) {
  const EnsembleSpec spec = spec_for(a.n, a.m, a.dist);
  fs::create_directories(a.out);
  const SeedStream master(a.seed);
  for (std::size_t k = 0; k < a.m; ++k) {
    const fs::path p = fs::path(a.out) / (a.prefix + "_" + std::to_string(k + 1) + ".csv");
    write_matrix_csv(p, sample_factor(spec, k, master));
    out << p.string() << "\n";
  }
  return kSuccess;
}

FactorChain svmin_chain(const SvminArgs& a) {
  if (!a.factor_files.empty()) {
    std::vector<ComplexMatrix> fs;
    for (const auto& f : a.factor_files) fs.push_back(read_matrix_csv(f));
    return FactorChain(std::move(fs));
  }
  if (a.n == 0 || a.m == 0) throw ConfigError("--n/--m", "required unless --factor files are given");
  if (a.identity) return FactorChain::identity(a.n, a.m);
  return sample_chain(spec_for(a.n, a.m, a.dist), SeedStream(a.seed));
}

int cmd_svmin(const SvminArgs& a, std::ostream& out, std::ostream& err) {
  const FactorChain chain = svmin_chain(a);
  const Complex z = std::polar(a.z_abs, a.z_arg);
  const std::size_t n = chain.dimension();
  if (!in_regime(z, n)) {
    err << "warning: |z| = " << num(a.z_abs) << " lies outside [n^0.4, n^0.6] = [" << num(std::pow(double(n), 0.4))
        << ", " << num(std::pow(double(n), 0.6)) << "]\n";
  }
  const TranslatedLinearization lin(chain, z);
  out << "n " << n << "\nm " << chain.length() << "\nz " << num(z.real()) << " " << num(z.imag()) << "\n";

  std::optional<double> dense;
  std::optional<double> shift;
  if (a.method == "dense" || a.method == "both") {
    dense = smallest_singular_value(lin, SvdMethod::dense).value;
    out << "sigma_min[dense] " << num(*dense) << "\n";
  }
  if (a.method == "shift-invert" || a.method == "both") {
    const SmallestSingularValue s = smallest_singular_value(lin, SvdMethod::shift_invert, a.tol);
    shift = s.value;
    out << "sigma_min[shift-invert] " << num(s.value) << "\n";
    out << "iterations " << s.iterations << (s.gap_limited ? " (gap limited)" : "") << "\n";
  }
  if (dense && shift) {
    const double rel = std::abs(*dense - *shift) / std::max(*dense, 1e-300);
    out << "relative_difference " << num(rel) << "\n";
    out << "agreement " << (rel <= a.agreement_rtol ? "yes" : "no") << " (rtol " << num(a.agreement_rtol) << ")\n";
  }
  if (lin.size() <= kDefaultDenseCap) {
    const RowDistanceSummary d = row_distances(materialize(lin));
    out << "dist_min " << num(d.min) << " (row " << d.argmin << ")\n";
  }
  return kSuccess;
}

struct Outputs {
  fs::path jsonl;
  fs::path summary;
  fs::path manifest;
};

Outputs outputs_for(const std::string& dir, const std::string& command) {
  const fs::path d(dir);
  return {d / (command + ".jsonl"), d / (command + "_summary.csv"), d / (command + "_manifest.json")};
}

ExperimentConfig load_experiment(const ExperimentArgs& a, const std::string& command) {
  if (a.config.empty() == a.manifest.empty()) {
    throw ConfigError("--config/--manifest", "give exactly one of --config or --manifest");
  }
  ExperimentConfig cfg;
  if (!a.manifest.empty()) {
    const RunManifest m = read_manifest(a.manifest);
    if (m.command != command) {
      throw ConfigError("$.command", "manifest was written by '" + m.command + "', not '" + command + "'");
    }
    cfg = parse_config(m.config_json);
  } else {
    cfg = load_config(a.config);
  }
  if (a.seed) cfg.seed = *a.seed;
  if (a.workers) cfg.workers = *a.workers;
  return cfg;
}

int cmd_experiment(const std::string& command, const ExperimentArgs& a, const std::vector<std::string>& argv,
                   std::ostream& out) {
  const ExperimentConfig cfg = load_experiment(a, command);
  const auto t0 = std::chrono::steady_clock::now();
  RunManifest manifest;
  manifest.command = command;
  manifest.config_json = config_to_json(cfg);
  manifest.seed = cfg.seed;
  manifest.started = utc_timestamp();
  manifest.arguments = argv;
  manifest.version = PRODSV_VERSION;
  manifest.workers = resolve_workers(cfg.workers);

  std::string jsonl;
  std::string summary;
  bool over_budget = false;
  if (command == "sweep" || command == "nullmass") {
    const ResultSet rs = command == "sweep" ? run_sv_tail_sweep(cfg) : run_null_mass_experiment(cfg);
    jsonl = records_to_jsonl(rs.records);
    summary = summary_to_csv(rs);
    over_budget = rs.failure_budget_exceeded;
    for (const GridSummary& s : rs.summaries) {
      out << "n=" << s.n << " trials=" << s.trials << " excluded=" << s.excluded;
      if (command == "sweep") {
        out << " p_hat=" << num(s.p_hat) << " ci=[" << num(s.ci.lo) << ", " << num(s.ci.hi) << "]"
            << " median(sigma*sqrt(n))=" << num(s.sigma_sqrt_n_median);
      } else {
        out << " mass_pass=" << s.mass_pass << " incompressible=" << s.incompressible
            << " out_of_regime=" << s.out_of_regime;
      }
      out << "\n";
    }
    if (command == "sweep") out << "trend_non_increasing " << (rs.trend_non_increasing ? "yes" : "no") << "\n";
    if (rs.mass_slope) out << "mass_slope " << num(rs.mass_slope->slope) << "\n";
  } else if (command == "linstat") {
    const auto runs = run_linear_statistic(cfg, cfg.test_function);
    jsonl = linear_statistic_to_jsonl(runs, cfg.seed);
    summary = linear_statistic_summary_csv(runs);
    for (const auto& r : runs) {
      over_budget = over_budget || r.failure_budget_exceeded;
      out << "n=" << r.n << " variance=" << num(r.empirical_variance) << " ci=[" << num(r.variance_ci.lo) << ", "
          << num(r.variance_ci.hi) << "] predicted=" << num(r.predicted_variance) << "\n";
    }
  } else {
    const auto hs = circular_law_histogram(cfg);
    jsonl = histogram_to_jsonl(hs);
    summary = histogram_to_csv(hs);
    for (const auto& h : hs) {
      out << "n=" << h.n << " eigenvalues=" << h.total << " within_1.1=" << num(h.fraction_within(1.1)) << "\n";
    }
  }

  fs::create_directories(a.out);
  const Outputs paths = outputs_for(a.out, command);
  write_text_atomic(paths.jsonl, jsonl);
  write_text_atomic(paths.summary, summary);
  manifest.outputs = {paths.jsonl.string(), paths.summary.string()};
  manifest.finished = utc_timestamp();
  manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(paths.manifest, manifest);
  out << "wrote " << paths.jsonl.string() << "\n";
  if (over_budget) {
    out << "failure budget exceeded\n";
    return kBudgetExceeded;
  }
  return kSuccess;
}

void add_experiment_options(CLI::App* sub, ExperimentArgs& a) {
  sub->add_option("--config", a.config, "Experiment config (JSON)");
  sub->add_option("--manifest", a.manifest, "Rerun from a previous run manifest");
  sub->add_option("--out", a.out, "Output directory")->capture_default_str();
  sub->add_option("--workers", a.workers, "Worker threads (overrides PRODSV_WORKERS)")->check(CLI::PositiveNumber);
  sub->add_option("--seed", a.seed, "Override the config seed");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Products of random matrices: linearization, smallest singular values and Monte Carlo drivers",
               "prodsv"};
  app.require_subcommand(1);
  app.set_version_flag("--version", PRODSV_VERSION);

  const std::vector<std::string> names = distribution_names();
  auto dist_check = CLI::IsMember(names);

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Sample a factor chain and write each factor as CSV");
  sample->add_option("--n", sa.n, "Matrix size")->required()->check(CLI::PositiveNumber);
  sample->add_option("--m", sa.m, "Number of factors")->required()->check(CLI::PositiveNumber);
  sample->add_option("--dist", sa.dist, "Entry distribution")->check(dist_check)->capture_default_str();
  sample->add_option("--seed", sa.seed, "Master seed")->capture_default_str();
  sample->add_option("--out", sa.out, "Output directory")->capture_default_str();
  sample->add_option("--prefix", sa.prefix, "File name prefix")->capture_default_str();

  SvminArgs va;
  auto* svmin = app.add_subcommand("svmin", "Smallest singular value of Y(z) for one sampled chain");
  svmin->add_option("--n", va.n, "Matrix size")->check(CLI::PositiveNumber);
  svmin->add_option("--m", va.m, "Number of factors")->check(CLI::PositiveNumber);
  svmin->add_option("--dist", va.dist, "Entry distribution")->check(dist_check)->capture_default_str();
  svmin->add_option("--z-abs", va.z_abs, "|z|")->required()->check(CLI::NonNegativeNumber);
  svmin->add_option("--z-arg", va.z_arg, "arg z (radians)")->capture_default_str();
  svmin->add_option("--method", va.method, "dense, shift-invert or both")
      ->check(CLI::IsMember({"dense", "shift-invert", "both"}))
      ->capture_default_str();
  svmin->add_option("--seed", va.seed, "Master seed")->capture_default_str();
  svmin->add_option("--tol", va.tol, "Shift-invert relative tolerance")->capture_default_str();
  svmin->add_option("--rtol", va.agreement_rtol, "Agreement tolerance for --method both")->capture_default_str();
  svmin->add_flag("--identity", va.identity, "Use identity factors instead of sampling");
  svmin->add_option("--factor", va.factor_files, "Factor CSV files in order X_1 ... X_M (overrides --n/--m)")
      ->check(CLI::ExistingFile);

  ExperimentArgs ea;
  const std::vector<std::pair<std::string, std::string>> experiments = {
      {"sweep", "Tail-bound sweep of the smallest singular value"},
      {"nullmass", "Null-vector block mass and incompressibility"},
      {"linstat", "Linear eigenvalue statistic variance"},
      {"histogram", "Radial eigenvalue histogram of the scaled product"}};
  std::vector<CLI::App*> experiment_cmds;
  for (const auto& [name, help] : experiments) {
    auto* sub = app.add_subcommand(name, help);
    add_experiment_options(sub, ea);
    experiment_cmds.push_back(sub);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (*sample) return cmd_sample(sa, out);
    if (*svmin) return cmd_svmin(va, out, err);
    for (auto* sub : experiment_cmds) {
      if (*sub) return cmd_experiment(sub->get_name(), ea, args, out);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}

int main_entry(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace prodsv::cli
