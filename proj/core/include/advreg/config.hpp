#pragma once

#include <map>
#include <string>
#include <vector>

#include "advreg/benchmark.hpp"
#include "advreg/icp.hpp"
#include "advreg/registration.hpp"

namespace advreg {

/// Ordered key=value pairs. Blank lines and lines starting with '#' are
/// skipped; whitespace around keys and values is trimmed.
class KeyValues {
 public:
  static KeyValues parse(const std::string& text, const std::string& origin = "<string>");
  static KeyValues load(const std::string& path);

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  const std::string& origin() const { return origin_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::string origin_;
};

/// Applies one key to the config; returns false for unknown keys.
bool apply_train_key(TrainConfig& cfg, const std::string& key, const std::string& value);
bool apply_icp_key(IcpConfig& cfg, const std::string& key, const std::string& value);

/// Unknown keys are an error.
TrainConfig parse_train_config(const KeyValues& kv, TrainConfig base = {});
TrainConfig load_train_config(const std::string& path);
std::string format_train_config(const TrainConfig& cfg);

/// Benchmark spec file: spec keys (kind, levels, trials_per_level,
/// base_rotation_deg, seed, methods, translation_sigma, gaussian_rotations,
/// allow_any_noise, jobs) plus "train.<key>" and "icp.<key>" overrides.
struct BenchmarkSpecFile {
  bench::AugmentationSpec spec;
  bench::ExperimentOptions options;
};

BenchmarkSpecFile parse_benchmark_spec(const KeyValues& kv);
BenchmarkSpecFile load_benchmark_spec(const std::string& path);

std::vector<double> parse_number_list(const std::string& text);

}  // namespace advreg
