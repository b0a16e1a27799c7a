#include "cli/app.hpp"

#include <map>
#include <ostream>

#include <CLI11.hpp>

#include "cli/commands.hpp"

namespace advreg::cli {

namespace {

const std::map<std::string, CloudFormat> kFormats{{"ply", CloudFormat::ply}, {"xyz", CloudFormat::xyz}};

}  // namespace

int run_app(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adversarial point-set registration"};
  app.name("advreg");
  app.require_subcommand(1);

  RegisterOptions reg;
  auto* reg_cmd = app.add_subcommand("register", "Register --source onto --target with the adversarial method");
  reg_cmd->add_option("--source", reg.source, "Source cloud (PLY or XYZ)")->required();
  reg_cmd->add_option("--target", reg.target, "Target cloud (PLY or XYZ)")->required();
  reg_cmd->add_option("--config", reg.config, "key=value training config");
  reg_cmd->add_option("--out", reg.out, "Transform record path (default: stdout)");
  reg_cmd->add_option("--seed", reg.seed, "Overrides the config seed");
  reg_cmd->add_option("--mode", reg.mode, "joint | two-phase | rotation-only")
      ->check(CLI::IsMember({"joint", "two-phase", "rotation-only"}));
  reg_cmd->add_option("--format", reg.format, "Input format (default: from extension)")
      ->transform(CLI::CheckedTransformer(kFormats));

  IcpOptions icp;
  auto* icp_cmd = app.add_subcommand("icp", "Register --source onto --target with point-to-point ICP");
  icp_cmd->add_option("--source", icp.source, "Source cloud")->required();
  icp_cmd->add_option("--target", icp.target, "Target cloud")->required();
  icp_cmd->add_option("--config", icp.config, "key=value ICP config (max_iterations, convergence_epsilon)");
  icp_cmd->add_option("--out", icp.out, "Transform record path (default: stdout)");
  icp_cmd->add_option("--format", icp.format, "Input format")->transform(CLI::CheckedTransformer(kFormats));

  BenchmarkOptions bench;
  auto* bench_cmd = app.add_subcommand("benchmark", "Run a synthetic augmentation sweep");
  bench_cmd->add_option("--base,--source", bench.base, "Base cloud")->required();
  bench_cmd->add_option("--spec,--config", bench.spec, "Benchmark spec file")->required();
  bench_cmd->add_option("--out", bench.out, "CSV path (default: stdout, no summary)");
  bench_cmd->add_option("--seed", bench.seed, "Overrides the spec seed");
  bench_cmd->add_option("--jobs", bench.jobs, "Worker threads")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--format", bench.format, "Input format")->transform(CLI::CheckedTransformer(kFormats));

  SelfcheckOptions check;
  auto* check_cmd = app.add_subcommand("selfcheck", "Finite-difference and metric oracle checks");
  check_cmd->add_option("--inject-fault", check.inject_faults, "Perturb the analytic side of a check")->group("");

  ShapeOptions shape;
  auto* shape_cmd = app.add_subcommand("shape", "Write a synthetic cloud");
  shape_cmd->add_option("--kind", shape.kind, "sphere-section | critter | tripod")->capture_default_str();
  shape_cmd->add_option("--points", shape.points, "Point count")->capture_default_str()->check(CLI::PositiveNumber);
  shape_cmd->add_option("--seed", shape.seed)->capture_default_str();
  shape_cmd->add_option("--out", shape.out, "Output path (.ply or .xyz)")->required();
  shape_cmd->add_flag("--ascii", shape.ascii, "ASCII PLY instead of binary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  if (*reg_cmd) return cmd_register(reg, out, err);
  if (*icp_cmd) return cmd_icp(icp, out, err);
  if (*bench_cmd) return cmd_benchmark(bench, out, err);
  if (*check_cmd) return cmd_selfcheck(check, out, err);
  return cmd_shape(shape, out, err);
}

}  // namespace advreg::cli
