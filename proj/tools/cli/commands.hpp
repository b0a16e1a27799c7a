#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "advreg/pointcloud.hpp"

namespace advreg::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kInputError = 2, kNumericAbort = 3 };

struct RegisterOptions {
  std::string source;
  std::string target;
  std::optional<std::string> config;
  std::optional<std::string> out;  ///< stdout when unset
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<CloudFormat> format;
};

struct IcpOptions {
  std::string source;
  std::string target;
  std::optional<std::string> config;
  std::optional<std::string> out;
  std::optional<CloudFormat> format;
};

struct BenchmarkOptions {
  std::string base;
  std::string spec;
  std::optional<std::string> out;  ///< CSV path; stdout gets only the summary
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::optional<CloudFormat> format;
};

struct SelfcheckOptions {
  /// Names of checks whose analytic side gets perturbed by 1e-2 (test hook).
  std::vector<std::string> inject_faults;
};

struct ShapeOptions {
  std::string kind = "sphere-section";
  std::size_t points = 2000;
  std::uint64_t seed = 0;
  std::string out;
  bool ascii = false;
};

int cmd_register(const RegisterOptions& opts, std::ostream& out, std::ostream& err);
int cmd_icp(const IcpOptions& opts, std::ostream& out, std::ostream& err);
int cmd_benchmark(const BenchmarkOptions& opts, std::ostream& out, std::ostream& err);
int cmd_selfcheck(const SelfcheckOptions& opts, std::ostream& out, std::ostream& err);
int cmd_shape(const ShapeOptions& opts, std::ostream& out, std::ostream& err);

/// One named selfcheck: max error against its tolerance.
struct CheckResult {
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool passed() const { return max_error <= tolerance; }
};

std::vector<CheckResult> run_selfchecks(const SelfcheckOptions& opts);
std::vector<std::string> selfcheck_names();

}  // namespace advreg::cli
