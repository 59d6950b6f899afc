#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "prodsv/experiments.hpp"
#include "prodsv/numerics.hpp"

namespace prodsv {

/// Malformed input; `field` is a JSON path such as "$.n_grid[1]" or a
/// "file:line:column" position for CSV.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Shortest round-trip text, e.g. "1.5-2i", "-0.25+0i".
std::string format_complex(Complex c);
Complex parse_complex(std::string_view text);

std::string matrix_to_csv(const ComplexMatrix& m);
ComplexMatrix matrix_from_csv(std::string_view text, const std::string& source = "<csv>");
void write_matrix_csv(const std::filesystem::path& path, const ComplexMatrix& m);
ComplexMatrix read_matrix_csv(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it into place.
void write_text_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_text(const std::filesystem::path& path);

/// JSON experiment config. Unknown keys are rejected.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical JSON (every field explicit, sorted keys).
std::string config_to_json(const ExperimentConfig& cfg);

/// One JSON object, no trailing newline.
std::string record_to_json(const TrialRecord& r);
std::string records_to_jsonl(const std::vector<TrialRecord>& records);
std::string summary_to_csv(const ResultSet& rs);

std::string linear_statistic_to_jsonl(const std::vector<LinearStatisticRun>& runs, std::uint64_t seed);
std::string linear_statistic_summary_csv(const std::vector<LinearStatisticRun>& runs);

std::string histogram_to_jsonl(const std::vector<RadialHistogram>& hs);
std::string histogram_to_csv(const std::vector<RadialHistogram>& hs);

struct RunManifest {
  std::string command;
  std::string config_json;  // canonical config snapshot
  std::uint64_t seed = 0;
  std::string started;      // ISO-8601 UTC
  std::string finished;
  std::vector<std::string> arguments;
  std::vector<std::string> outputs;
  std::string version;
  std::size_t workers = 1;
  double wall_seconds = 0.0;
};

std::string manifest_to_json(const RunManifest& m);
RunManifest parse_manifest(std::string_view json_text);
void write_manifest(const std::filesystem::path& path, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& path);

std::string utc_timestamp();

}  // namespace prodsv
