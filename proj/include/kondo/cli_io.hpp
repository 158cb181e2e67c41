#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kondo/experiments.hpp"

namespace kondo {

enum class Experiment { ground, ehl, scaling, quench, scan, double_quench, interference, thermal, ansatz };

std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& s);

/// Raised for unknown keys, malformed values and violated constraints.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& msg)
      : std::runtime_error(key + ": " + msg), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct RunConfig {
  Experiment experiment = Experiment::ehl;
  // chain
  int n = 8;
  double j1 = 1.0;
  double j2 = 0.0;
  double jp = 1.0;
  std::vector<double> jp_grid;  // empty -> experiment default
  std::vector<int> n_list;      // scaling: sizes to compare
  Variant variant = Variant::initial;
  // dynamics
  double t_max = 0.0;  // 0 -> 4N
  double dt = 0.0;     // 0 -> t_max / 400
  std::vector<double> beta_grid;  // empty -> default thermal grid
  double epsilon = 0.1;
  // numerics
  std::uint64_t seed = kDefaultSeed;
  double lanczos_tol = 1e-10;
  double krylov_tol = 1e-9;
  double threshold = kDefaultEhlThreshold;
  double collapse_ratio = 0.0;  // scaling: match N/L* to this value when > 0
  int k = 40;
  // output
  std::filesystem::path out_dir;
  std::string format = "csv";

  ChainSpec chain() const;
  double resolved_t_max() const { return t_max > 0.0 ? t_max : default_t_max(n); }
  double resolved_dt() const { return dt > 0.0 ? dt : default_dt(resolved_t_max()); }
};

/// Flat `key = value` text with `#` comments; keys are normalized to dashes.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Builds and validates a config from key/value pairs. Every failure names
/// the offending key.
RunConfig parse_config(const std::map<std::string, std::string>& values);

/// Command line: flags mirror the config keys; `--config FILE` supplies a
/// base file that flags override. The output directory defaults to
/// $KONDO_LAB_OUT, then "kondo_out". Returns false when only help was shown.
bool parse_args(int argc, char** argv, RunConfig& out);

std::vector<double> default_beta_grid();

struct CsvTable {
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::string format_double(double v);
void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

/// JSON echo of the full config plus solver provenance.
std::string config_json(const RunConfig& cfg);

/// Runs the configured experiment and writes its files; returns the manifest.
std::vector<std::filesystem::path> run_experiment(const RunConfig& cfg);

}  // namespace kondo
