#include "prodsv/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "prodsv/ensembles.hpp"

namespace prodsv {

using nlohmann::json;

namespace {

std::string format_double(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

json optional_number(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ---- config parsing -------------------------------------------------------

std::string child(const std::string& path, const std::string& key) { return path + "." + key; }

std::size_t as_count(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::size_t>();
  if (j.is_number_integer() && j.get<long long>() >= 0) return static_cast<std::size_t>(j.get<long long>());
  throw ConfigError(path, "expected a non-negative integer");
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) throw ConfigError(child(path, it.key()), "unknown field");
  }
}

std::string check_distribution(const std::string& name, const std::string& path) {
  try {
    distribution_by_name(name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
  return name;
}

ZRule parse_z_rule(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  reject_unknown(j, {"kind", "abs", "arg"}, path);
  ZRule r;
  if (!j.contains("kind")) throw ConfigError(child(path, "kind"), "missing");
  const std::string kind = as_string(j.at("kind"), child(path, "kind"));
  if (kind == "annulus") {
    r.kind = ZRule::Kind::annulus;
  } else if (kind == "sqrt_n") {
    r.kind = ZRule::Kind::sqrt_n;
  } else if (kind == "fixed") {
    r.kind = ZRule::Kind::fixed;
    if (!j.contains("abs")) throw ConfigError(child(path, "abs"), "required for kind \"fixed\"");
  } else {
    throw ConfigError(child(path, "kind"), "expected one of annulus, sqrt_n, fixed");
  }
  if (j.contains("abs")) {
    if (r.kind != ZRule::Kind::fixed) throw ConfigError(child(path, "abs"), "only allowed for kind \"fixed\"");
    r.modulus = as_number(j.at("abs"), child(path, "abs"));
  }
  if (j.contains("arg") && !j.at("arg").is_null()) r.argument = as_number(j.at("arg"), child(path, "arg"));
  return r;
}

TestFunction parse_test_function(const json& j, const std::string& path) {
  TestFunction f;
  std::string kind;
  if (j.is_string()) {
    kind = j.get<std::string>();
  } else if (j.is_object()) {
    reject_unknown(j, {"kind", "tau0"}, path);
    if (!j.contains("kind")) throw ConfigError(child(path, "kind"), "missing");
    kind = as_string(j.at("kind"), child(path, "kind"));
    if (j.contains("tau0")) f.tau0 = as_number(j.at("tau0"), child(path, "tau0"));
  } else {
    throw ConfigError(path, "expected a name or an object");
  }
  if (kind == "radial_bump") {
    f.kind = TestFunction::Kind::radial_bump;
  } else if (kind == "coordinate_x") {
    f.kind = TestFunction::Kind::coordinate_x;
  } else if (kind == "zero") {
    f.kind = TestFunction::Kind::zero;
  } else {
    throw ConfigError(path, "expected one of radial_bump, coordinate_x, zero");
  }
  return f;
}

// validate() messages start with the field name.
[[noreturn]] void rethrow_validation(const std::invalid_argument& e) {
  const std::string msg = e.what();
  const auto colon = msg.find(':');
  if (colon == std::string::npos) throw ConfigError("$", msg);
  const std::string field = msg.substr(0, colon);
  std::string rest = msg.substr(colon + 1);
  if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
  throw ConfigError("$." + field, rest);
}

json config_json(const ExperimentConfig& c) {
  json j;
  j["n_grid"] = c.n_grid;
  j["M"] = c.factors;
  j["A"] = c.A;
  j["epsilon0"] = c.epsilon0;
  j["sparse_epsilon"] = c.sparse_epsilon;
  json z;
  z["kind"] = to_string(c.z_rule.kind);
  if (c.z_rule.kind == ZRule::Kind::fixed) z["abs"] = c.z_rule.modulus;
  z["arg"] = c.z_rule.argument ? json(*c.z_rule.argument) : json(nullptr);
  j["z_rule"] = z;
  if (c.distributions.size() == 1) {
    j["distribution"] = c.distributions.front();
  } else {
    j["distribution"] = c.distributions;
  }
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["dense_check"] = c.dense_check;
  j["row_distances"] = c.row_distances;
  j["tol"] = c.tol;
  j["failure_budget"] = c.failure_budget;
  j["record_timing"] = c.record_timing;
  j["workers"] = c.workers;
  json f;
  f["kind"] = c.test_function.name();
  f["tau0"] = c.test_function.tau0;
  j["test_function"] = f;
  j["grid_resolution"] = c.variance.grid_resolution;
  j["fourier_modes"] = c.variance.fourier_modes;
  j["check_support"] = c.variance.check_support;
  j["bootstrap_resamples"] = c.bootstrap_resamples;
  j["bins"] = c.bins;
  j["r_max"] = c.r_max;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  const std::string root = "$";
  if (!j.is_object()) throw ConfigError(root, "expected a JSON object");
  reject_unknown(j,
                 {"experiment", "n_grid", "M", "A", "epsilon0", "sparse_epsilon", "z_rule", "distribution", "trials",
                  "seed", "dense_check", "row_distances", "tol", "failure_budget", "record_timing", "workers",
                  "test_function", "grid_resolution", "fourier_modes", "check_support", "bootstrap_resamples",
                  "bins", "r_max"},
                 root);
  ExperimentConfig c;
  auto has = [&](const char* k) { return j.contains(k); };
  auto p = [&](const char* k) { return child(root, k); };

  if (has("n_grid")) {
    const json& g = j.at("n_grid");
    if (!g.is_array()) throw ConfigError(p("n_grid"), "expected an array of sizes");
    c.n_grid.clear();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const std::string ip = p("n_grid") + "[" + std::to_string(i) + "]";
      const std::size_t n = as_count(g[i], ip);
      if (n == 0) throw ConfigError(ip, "sizes must be positive");
      c.n_grid.push_back(n);
    }
  }
  if (has("M")) c.factors = as_count(j.at("M"), p("M"));
  if (has("A")) c.A = as_number(j.at("A"), p("A"));
  if (has("epsilon0")) c.epsilon0 = as_number(j.at("epsilon0"), p("epsilon0"));
  if (has("sparse_epsilon")) c.sparse_epsilon = as_number(j.at("sparse_epsilon"), p("sparse_epsilon"));
  if (has("z_rule")) c.z_rule = parse_z_rule(j.at("z_rule"), p("z_rule"));
  if (has("distribution")) {
    const json& d = j.at("distribution");
    c.distributions.clear();
    if (d.is_string()) {
      c.distributions.push_back(check_distribution(d.get<std::string>(), p("distribution")));
    } else if (d.is_array()) {
      for (std::size_t i = 0; i < d.size(); ++i) {
        const std::string ip = p("distribution") + "[" + std::to_string(i) + "]";
        c.distributions.push_back(check_distribution(as_string(d[i], ip), ip));
      }
    } else {
      throw ConfigError(p("distribution"), "expected a name or an array of names");
    }
  }
  if (has("trials")) c.trials = as_count(j.at("trials"), p("trials"));
  if (has("seed")) {
    const json& s = j.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      throw ConfigError(p("seed"), "expected a non-negative 64-bit integer");
    }
    c.seed = s.get<std::uint64_t>();
  }
  if (has("dense_check")) c.dense_check = as_bool(j.at("dense_check"), p("dense_check"));
  if (has("row_distances")) c.row_distances = as_bool(j.at("row_distances"), p("row_distances"));
  if (has("tol")) c.tol = as_number(j.at("tol"), p("tol"));
  if (has("failure_budget")) c.failure_budget = as_number(j.at("failure_budget"), p("failure_budget"));
  if (has("record_timing")) c.record_timing = as_bool(j.at("record_timing"), p("record_timing"));
  if (has("workers")) c.workers = as_count(j.at("workers"), p("workers"));
  if (has("test_function")) c.test_function = parse_test_function(j.at("test_function"), p("test_function"));
  if (has("grid_resolution")) c.variance.grid_resolution = as_count(j.at("grid_resolution"), p("grid_resolution"));
  if (has("fourier_modes")) c.variance.fourier_modes = as_count(j.at("fourier_modes"), p("fourier_modes"));
  if (has("check_support")) c.variance.check_support = as_bool(j.at("check_support"), p("check_support"));
  if (has("bootstrap_resamples")) {
    c.bootstrap_resamples = as_count(j.at("bootstrap_resamples"), p("bootstrap_resamples"));
  }
  if (has("bins")) c.bins = as_count(j.at("bins"), p("bins"));
  if (has("r_max")) c.r_max = as_number(j.at("r_max"), p("r_max"));

  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    rethrow_validation(e);
  }
  return c;
}

json parse_json(std::string_view text, const std::string& what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("$", what + " is not valid JSON (byte " + std::to_string(e.byte) + ")");
  }
}

std::string csv_row(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) s += ',';
    s += cells[i];
  }
  s += '\n';
  return s;
}

std::string fmt_opt(double v) { return std::isfinite(v) ? format_double(v) : ""; }

}  // namespace

// ---- complex / matrix CSV -------------------------------------------------

std::string format_complex(Complex c) {
  std::string s = format_double(c.real());
  const std::string im = format_double(c.imag());
  if (im.front() != '-') s += '+';
  s += im;
  s += 'i';
  return s;
}

Complex parse_complex(std::string_view text) {
  auto bad = [&] { return std::invalid_argument("parse_complex: malformed complex number \"" + std::string(text) + "\""); };
  std::string_view t = text;
  while (!t.empty() && (t.front() == ' ' || t.front() == '\t')) t.remove_prefix(1);
  while (!t.empty() && (t.back() == ' ' || t.back() == '\t' || t.back() == '\r')) t.remove_suffix(1);
  if (t.empty()) throw bad();
  if (t.back() != 'i') {
    const auto re = parse_double(t);
    if (!re) throw bad();
    return {*re, 0.0};
  }
  t.remove_suffix(1);
  // split at the last sign that is not a leading sign or an exponent sign
  std::size_t split = std::string_view::npos;
  for (std::size_t i = t.size(); i-- > 1;) {
    if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string_view::npos) {
    const auto im = parse_double(t);
    if (!im) throw bad();
    return {0.0, *im};
  }
  const auto re = parse_double(t.substr(0, split));
  const auto im = parse_double(t.substr(split));
  if (!re || !im) throw bad();
  return {*re, *im};
}

std::string matrix_to_csv(const ComplexMatrix& m) {
  require_finite(m, "matrix_to_csv");
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_complex(m(i, j));
    }
    out += '\n';
  }
  return out;
}

ComplexMatrix matrix_from_csv(std::string_view text, const std::string& source) {
  std::vector<std::vector<Complex>> rows;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    std::vector<Complex> row;
    std::size_t cstart = 0;
    std::size_t col = 0;
    while (true) {
      std::size_t cend = line.find(',', cstart);
      const std::string_view cell = line.substr(cstart, cend == std::string_view::npos ? line.size() - cstart : cend - cstart);
      ++col;
      try {
        row.push_back(parse_complex(cell));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(source + ":" + std::to_string(line_no) + ":" + std::to_string(col), e.what());
      }
      if (cend == std::string_view::npos) break;
      cstart = cend + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ConfigError(source + ":" + std::to_string(line_no), "ragged row (" + std::to_string(row.size()) +
                                                                  " cells, expected " +
                                                                  std::to_string(rows.front().size()) + ")");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError(source, "empty matrix");
  ComplexMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

void write_text_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_matrix_csv(const std::filesystem::path& path, const ComplexMatrix& m) {
  write_text_atomic(path, matrix_to_csv(m));
}

ComplexMatrix read_matrix_csv(const std::filesystem::path& path) {
  return matrix_from_csv(read_text(path), path.string());
}

// ---- config ---------------------------------------------------------------

ExperimentConfig parse_config(std::string_view json_text) {
  return config_from_json(parse_json(json_text, "config"));
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const std::runtime_error& e) {
    throw ConfigError("$", e.what());
  }
  return parse_config(text);
}

std::string config_to_json(const ExperimentConfig& cfg) { return config_json(cfg).dump(2); }

// ---- results --------------------------------------------------------------

std::string record_to_json(const TrialRecord& r) {
  json j;
  j["trial"] = r.trial;
  j["seed_path"] = r.seed_path;
  j["n"] = r.n;
  j["m"] = r.m;
  j["z_re"] = r.z.real();
  j["z_im"] = r.z.imag();
  j["status"] = r.excluded ? "excluded" : "ok";
  if (r.excluded) j["error"] = r.error;
  j["out_of_regime"] = r.out_of_regime;
  j["sigma_min"] = r.excluded ? json(nullptr) : number_or_null(r.sigma_min);
  j["sigma_method"] = r.sigma_method.empty() ? json(nullptr) : json(r.sigma_method);
  j["iterations"] = r.iterations;
  j["gap_limited"] = r.gap_limited;
  j["dense_sigma_min"] = optional_number(r.dense_sigma_min);
  j["dist_min"] = optional_number(r.dist_min);
  j["dist_argmin"] = r.dist_argmin ? json(*r.dist_argmin) : json(nullptr);
  j["mass_profile"] = r.mass_profile;
  j["incompressible"] = r.incompressible ? json(*r.incompressible) : json(nullptr);
  j["a"] = optional_number(r.a);
  j["b"] = optional_number(r.b);
  j["null_residual"] = optional_number(r.null_residual);
  j["max_system_residual"] = optional_number(r.max_system_residual);
  j["degenerate"] = r.degenerate;
  j["wall_ms"] = optional_number(r.wall_ms);
  return j.dump();
}

std::string records_to_jsonl(const std::vector<TrialRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += record_to_json(r);
    out += '\n';
  }
  return out;
}

std::string summary_to_csv(const ResultSet& rs) {
  std::string out = csv_row({"n", "trials", "excluded", "threshold", "exceedances", "p_hat", "ci_lo", "ci_hi",
                             "sigma_sqrt_n_q10", "sigma_sqrt_n_median", "sigma_sqrt_n_q90", "dense_checked",
                             "dense_agree", "distance_violations", "mass_threshold", "mass_pass", "incompressible",
                             "both_pass", "min_mass_median", "out_of_regime"});
  for (const GridSummary& s : rs.summaries) {
    out += csv_row({std::to_string(s.n), std::to_string(s.trials), std::to_string(s.excluded),
                    fmt_opt(s.threshold), std::to_string(s.exceedances), fmt_opt(s.p_hat), fmt_opt(s.ci.lo),
                    fmt_opt(s.ci.hi), fmt_opt(s.sigma_sqrt_n_q10), fmt_opt(s.sigma_sqrt_n_median),
                    fmt_opt(s.sigma_sqrt_n_q90), std::to_string(s.dense_checked), std::to_string(s.dense_agree),
                    std::to_string(s.distance_violations), fmt_opt(s.mass_threshold), std::to_string(s.mass_pass),
                    std::to_string(s.incompressible), std::to_string(s.both_pass), fmt_opt(s.min_mass_median),
                    std::to_string(s.out_of_regime)});
  }
  return out;
}

std::string linear_statistic_to_jsonl(const std::vector<LinearStatisticRun>& runs, std::uint64_t seed) {
  std::string out;
  for (std::size_t g = 0; g < runs.size(); ++g) {
    const LinearStatisticRun& run = runs[g];
    for (std::size_t t = 0; t < run.raw.size(); ++t) {
      const std::size_t trial = g * run.replicas + t;
      json j;
      j["trial"] = trial;
      j["seed_path"] = std::to_string(seed) + "/" + std::to_string(trial);
      j["n"] = run.n;
      j["m"] = run.m;
      j["f"] = run.f.name();
      const bool ok = std::isfinite(run.raw[t]);
      j["status"] = ok ? "ok" : "excluded";
      j["sum"] = number_or_null(run.raw[t]);
      j["centered"] = ok ? json(run.raw[t] - run.mean) : json(nullptr);
      out += j.dump();
      out += '\n';
    }
  }
  return out;
}

std::string linear_statistic_summary_csv(const std::vector<LinearStatisticRun>& runs) {
  std::string out = csv_row({"n", "m", "f", "replicas", "excluded", "mean", "empirical_variance", "ci_lo", "ci_hi",
                             "bootstrap_se", "predicted_variance", "ratio", "qq_deviation"});
  for (const auto& r : runs) {
    const double ratio = r.predicted_variance > 0.0 ? r.empirical_variance / r.predicted_variance : NAN;
    out += csv_row({std::to_string(r.n), std::to_string(r.m), r.f.name(), std::to_string(r.replicas),
                    std::to_string(r.excluded), fmt_opt(r.mean), fmt_opt(r.empirical_variance),
                    fmt_opt(r.variance_ci.lo), fmt_opt(r.variance_ci.hi), fmt_opt(r.variance_ci.standard_error),
                    fmt_opt(r.predicted_variance), fmt_opt(ratio), fmt_opt(r.qq_deviation)});
  }
  return out;
}

std::string histogram_to_jsonl(const std::vector<RadialHistogram>& hs) {
  std::string out;
  for (const auto& h : hs) {
    json j;
    j["n"] = h.n;
    j["edges"] = h.edges;
    j["counts"] = h.counts;
    j["overflow"] = h.overflow;
    j["total"] = h.total;
    j["fraction_within_1_1"] = h.fraction_within(1.1);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string histogram_to_csv(const std::vector<RadialHistogram>& hs) {
  std::string out = csv_row({"n", "r_lo", "r_hi", "count", "fraction"});
  for (const auto& h : hs) {
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      const double frac = h.total ? static_cast<double>(h.counts[b]) / static_cast<double>(h.total) : 0.0;
      out += csv_row({std::to_string(h.n), format_double(h.edges[b]), format_double(h.edges[b + 1]),
                      std::to_string(h.counts[b]), format_double(frac)});
    }
  }
  return out;
}

// ---- manifest -------------------------------------------------------------

std::string manifest_to_json(const RunManifest& m) {
  json j;
  j["command"] = m.command;
  j["config"] = parse_json(m.config_json, "manifest config");
  j["seed"] = m.seed;
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["arguments"] = m.arguments;
  j["outputs"] = m.outputs;
  j["version"] = m.version;
  j["workers"] = m.workers;
  j["wall_seconds"] = m.wall_seconds;
  return j.dump(2) + "\n";
}

RunManifest parse_manifest(std::string_view json_text) {
  const json j = parse_json(json_text, "manifest");
  if (!j.is_object()) throw ConfigError("$", "manifest must be a JSON object");
  RunManifest m;
  if (!j.contains("command")) throw ConfigError("$.command", "missing");
  m.command = as_string(j.at("command"), "$.command");
  if (!j.contains("config")) throw ConfigError("$.config", "missing");
  try {
    m.config_json = config_to_json(config_from_json(j.at("config")));
  } catch (const ConfigError& e) {
    throw ConfigError("$.config" + e.field().substr(1), std::string(e.what()).substr(e.field().size() + 2));
  }
  if (j.contains("seed")) m.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("started")) m.started = as_string(j.at("started"), "$.started");
  if (j.contains("finished")) m.finished = as_string(j.at("finished"), "$.finished");
  if (j.contains("arguments")) m.arguments = j.at("arguments").get<std::vector<std::string>>();
  if (j.contains("outputs")) m.outputs = j.at("outputs").get<std::vector<std::string>>();
  if (j.contains("version")) m.version = as_string(j.at("version"), "$.version");
  if (j.contains("workers")) m.workers = as_count(j.at("workers"), "$.workers");
  if (j.contains("wall_seconds")) m.wall_seconds = as_number(j.at("wall_seconds"), "$.wall_seconds");
  return m;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  write_text_atomic(path, manifest_to_json(m));
}

RunManifest read_manifest(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const std::runtime_error& e) {
    throw ConfigError("$", e.what());
  }
  return parse_manifest(text);
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace prodsv
