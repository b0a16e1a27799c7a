#include "cli/commands.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "advreg/benchmark.hpp"
#include "advreg/config.hpp"
#include "advreg/error.hpp"
#include "advreg/icp.hpp"
#include "advreg/registration.hpp"
#include "advreg/shapes.hpp"
#include "cli/record.hpp"

namespace advreg::cli {

namespace {

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const NumericAbort& e) {
    err << "error: numeric abort at epoch " << e.epoch() << ": " << e.what() << '\n';
    return kNumericAbort;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

PointCloud load(const std::string& path, const std::optional<CloudFormat>& format) {
  PointCloud cloud = format ? load_point_cloud(path, *format) : load_point_cloud(path);
  validate_cloud(cloud, path.c_str());
  return cloud;
}

// Writes to `path`, or to `fallback` when no path is given. The file is only
// replaced once the full text exists.
void emit(const std::optional<std::string>& path, const std::string& text, std::ostream& fallback) {
  if (!path) {
    fallback << text;
    return;
  }
  std::ofstream f(*path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + *path, *path);
  f << text;
  if (!f.flush()) throw IoError("write failed: " + *path, *path);
}

}  // namespace

int cmd_register(const RegisterOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    TrainConfig cfg = opts.config ? load_train_config(*opts.config) : TrainConfig{};
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.mode) cfg.mode = parse_mode(*opts.mode);
    cfg.validate();
    const PointCloud source = load(opts.source, opts.format);
    const PointCloud target = load(opts.target, opts.format);

    const RegistrationResult result = register_adversarial(source, target, cfg);
    TransformRecord rec;
    rec.method = "adversarial";
    rec.mode = to_string(cfg.mode);
    rec.seed = cfg.seed;
    rec.rotation = result.transform.rotation();
    rec.rotation_vector = result.transform.rotation_vector;
    rec.translation = result.transform.translation;
    rec.epochs = result.epochs_run;
    rec.scalars = {{"final_critic_loss", result.final_critic_loss},
                   {"final_generator_loss", result.final_generator_loss}};
    rec.wall_time_s = result.wall_time_s;
    std::ostringstream text;
    write_record(text, rec);
    emit(opts.out, text.str(), out);
    return kOk;
  });
}

int cmd_icp(const IcpOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    IcpConfig cfg;
    if (opts.config) {
      const KeyValues kv = KeyValues::load(*opts.config);
      for (const auto& [key, value] : kv.entries())
        if (!apply_icp_key(cfg, key, value)) throw InvalidArgument(kv.origin() + ": unknown key '" + key + "'");
    }
    cfg.validate();
    const PointCloud source = load(opts.source, opts.format);
    const PointCloud target = load(opts.target, opts.format);

    const RegistrationResult result = icp_register(source, target, cfg);
    TransformRecord rec;
    rec.method = "icp";
    rec.rotation = result.transform.rotation();
    rec.rotation_vector = result.transform.rotation_vector;
    rec.translation = result.transform.translation;
    rec.epochs = result.epochs_run;
    if (!result.correspondence_mse.empty()) rec.scalars = {{"final_mse", result.correspondence_mse.back()}};
    rec.wall_time_s = result.wall_time_s;
    std::ostringstream text;
    write_record(text, rec);
    emit(opts.out, text.str(), out);
    return kOk;
  });
}

int cmd_benchmark(const BenchmarkOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    BenchmarkSpecFile file = load_benchmark_spec(opts.spec);
    if (opts.seed) file.spec.seed = *opts.seed;
    if (opts.jobs) file.options.jobs = *opts.jobs;
    file.spec.validate();
    const PointCloud base = load(opts.base, opts.format);

    const auto results = bench::run_experiment(base, file.spec, file.options);
    std::ostringstream csv;
    bench::write_csv(csv, results);
    emit(opts.out, csv.str(), out);
    if (opts.out) bench::write_summary(out, results);
    return kOk;
  });
}

int cmd_shape(const ShapeOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RandomStream rng(opts.seed);
    PointCloud cloud;
    if (opts.kind == "sphere-section")
      cloud = shapes::sphere_section(opts.points, rng);
    else if (opts.kind == "critter")
      cloud = shapes::critter(opts.points, rng);
    else if (opts.kind == "tripod")
      cloud = shapes::tripod(opts.points, rng);
    else
      throw InvalidArgument("unknown shape '" + opts.kind + "' (sphere-section, critter, tripod)");
    if (format_from_path(opts.out) == CloudFormat::xyz)
      write_xyz(opts.out, cloud);
    else
      write_ply(opts.out, cloud, opts.ascii ? PlyEncoding::ascii : PlyEncoding::binary_little_endian);
    out << "wrote " << cloud.size() << " points to " << opts.out << '\n';
    return kOk;
  });
}

}  // namespace advreg::cli
