#include "advreg/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <ostream>
#include <thread>

#include "advreg/error.hpp"

namespace advreg::bench {

namespace {

constexpr std::uint64_t kInstanceStream = 11;
constexpr std::uint64_t kTrainStream = 12;

struct Task {
  std::size_t level_index;
  std::size_t trial;
  Method method;
};

TrialResult run_trial(const PointCloud& base, const AugmentationSpec& spec, const ExperimentOptions& options,
                      const Task& task) {
  const double level = spec.levels[task.level_index];
  TrialResult r;
  r.level = level;
  r.trial_index = task.trial;
  r.method = task.method;
  try {
    RandomStream rng(derive_seed(derive_seed(spec.seed, kInstanceStream), task.level_index, task.trial));
    const Instance inst = make_instance(base, spec, level, rng);
    RegistrationResult reg;
    if (task.method == Method::adversarial) {
      TrainConfig cfg = options.train;
      cfg.seed = derive_seed(derive_seed(spec.seed, kTrainStream), task.level_index, task.trial);
      reg = register_adversarial(inst.source, inst.target, cfg);
    } else {
      reg = icp_register(inst.source, inst.target, options.icp);
    }
    r.angular_error = angular_distance(inst.truth.rotation(), reg.transform.rotation());
    r.translation_error = (reg.transform.translation - inst.truth.translation).norm();
    r.epochs_run = reg.epochs_run;
    r.wall_time_s = reg.wall_time_s;
  } catch (const std::exception& e) {
    r.angular_error = std::numeric_limits<double>::quiet_NaN();
    r.translation_error = std::numeric_limits<double>::quiet_NaN();
    r.diagnostic = e.what();
  }
  r.success = r.angular_error < options.train.success_threshold;
  return r;
}

}  // namespace

std::string to_string(AugmentationKind kind) {
  switch (kind) {
    case AugmentationKind::rotation_sweep: return "rotation_sweep";
    case AugmentationKind::noise: return "noise";
    case AugmentationKind::partial_overlap: return "partial_overlap";
    case AugmentationKind::outliers: return "outliers";
  }
  return "rotation_sweep";
}

std::string to_string(Method method) { return method == Method::adversarial ? "adversarial" : "icp"; }

AugmentationKind parse_kind(const std::string& text) {
  for (auto k : {AugmentationKind::rotation_sweep, AugmentationKind::noise, AugmentationKind::partial_overlap,
                 AugmentationKind::outliers})
    if (text == to_string(k)) return k;
  throw InvalidArgument("unknown augmentation kind '" + text + "'");
}

Method parse_method(const std::string& text) {
  if (text == "adversarial") return Method::adversarial;
  if (text == "icp") return Method::icp;
  throw InvalidArgument("unknown method '" + text + "'");
}

void AugmentationSpec::validate() const {
  if (levels.empty()) throw InvalidArgument("augmentation spec needs at least one level");
  if (trials_per_level < 1) throw InvalidArgument("trials_per_level must be >= 1");
  if (!(base_rotation_deg >= 0.0 && base_rotation_deg <= 180.0)) throw InvalidArgument("base_rotation_deg outside [0, 180]");
  if (!(translation_sigma >= 0.0)) throw InvalidArgument("translation_sigma must be >= 0");
  for (double level : levels) {
    bool ok = std::isfinite(level);
    switch (kind) {
      case AugmentationKind::rotation_sweep: ok = ok && level >= 0.0 && level <= 180.0; break;
      case AugmentationKind::noise:
        ok = ok && (allow_any_noise ? level >= 0.0 : (level >= 0.01 - 1e-12 && level <= 0.05 + 1e-12));
        break;
      case AugmentationKind::partial_overlap: ok = ok && level > 0.0 && level <= 1.0; break;
      case AugmentationKind::outliers: ok = ok && level >= 0.0 && level < 1.0; break;
    }
    if (!ok) throw InvalidArgument("level " + std::to_string(level) + " out of range for " + to_string(kind));
  }
}

RigidTransform random_rotation(double magnitude_deg, RandomStream& rng) {
  if (!(magnitude_deg >= 0.0 && magnitude_deg <= 180.0))
    throw InvalidArgument("random_rotation: magnitude outside [0, 180] degrees");
  Vec3 axis;
  do {
    axis = normal_vec3(rng);
  } while (axis.norm() < 1e-12);
  RigidTransform t;
  t.rotation_vector = axis.normalized() * deg_to_rad(magnitude_deg);
  return t;
}

PointCloud add_noise(const PointCloud& cloud, double sigma_relative, RandomStream& rng) {
  if (!(sigma_relative >= 0.0)) throw InvalidArgument("add_noise: sigma must be >= 0");
  if (sigma_relative == 0.0) return cloud;
  const double sigma = sigma_relative * rms_radius(cloud);
  PointCloud out = cloud;
  for (auto& p : out.points) p += sigma * normal_vec3(rng);
  return out;
}

OverlapSplit partial_overlap_split(const PointCloud& cloud, double alpha, RandomStream& rng) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("partial_overlap_split: alpha must be in (0, 1]");
  if (cloud.empty()) throw InvalidArgument("partial_overlap_split: empty cloud");
  Vec3 dir;
  do {
    dir = normal_vec3(rng);
  } while (dir.norm() < 1e-12);
  dir.normalize();

  const std::size_t n = cloud.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> proj(n);
  for (std::size_t i = 0; i < n; ++i) proj[i] = cloud.points[i].dot(dir);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return proj[a] < proj[b]; });

  const auto keep = std::min<std::size_t>(n, static_cast<std::size_t>(std::llround(0.5 * (1.0 + alpha) * static_cast<double>(n))));
  OverlapSplit split;
  split.first_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep));
  split.second_indices.assign(order.end() - static_cast<std::ptrdiff_t>(keep), order.end());
  std::sort(split.first_indices.begin(), split.first_indices.end());
  std::sort(split.second_indices.begin(), split.second_indices.end());
  for (auto i : split.first_indices) split.first.points.push_back(cloud.points[i]);
  for (auto i : split.second_indices) split.second.points.push_back(cloud.points[i]);
  return split;
}

PointCloud add_outliers(const PointCloud& cloud, double fraction, RandomStream& rng) {
  if (!(fraction >= 0.0 && fraction < 1.0)) throw InvalidArgument("add_outliers: fraction must be in [0, 1)");
  if (fraction == 0.0) return cloud;
  const BoundingBox box = bounding_box(cloud);
  const auto count = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(cloud.size()) - 1e-9));
  PointCloud out = cloud;
  out.points.reserve(cloud.size() + count);
  for (std::size_t i = 0; i < count; ++i) {
    Vec3 p;
    for (int k = 0; k < 3; ++k) p[k] = rng.uniform(box.min[k], box.max[k]);
    out.points.push_back(p);
  }
  return out;
}

Instance make_instance(const PointCloud& base, const AugmentationSpec& spec, double level, RandomStream& rng) {
  Instance inst;
  if (spec.gaussian_rotations) {
    inst.truth.rotation_vector = normal_vec3(rng);
  } else {
    const double magnitude = spec.kind == AugmentationKind::rotation_sweep ? level : spec.base_rotation_deg;
    inst.truth = random_rotation(magnitude, rng);
  }
  if (spec.translation_sigma > 0.0) {
    const double sigma = spec.translation_sigma * rms_radius(base);
    inst.truth.translation = sigma * normal_vec3(rng);
  }

  switch (spec.kind) {
    case AugmentationKind::rotation_sweep:
      inst.source = base;
      inst.target = transformed(base, inst.truth);
      break;
    case AugmentationKind::noise:
      inst.source = add_noise(base, level, rng);
      inst.target = transformed(add_noise(base, level, rng), inst.truth);
      break;
    case AugmentationKind::partial_overlap: {
      auto split = partial_overlap_split(base, level, rng);
      inst.source = std::move(split.first);
      inst.target = transformed(split.second, inst.truth);
      break;
    }
    case AugmentationKind::outliers:
      inst.source = add_outliers(base, level, rng);
      inst.target = add_outliers(transformed(base, inst.truth), level, rng);
      break;
  }
  return inst;
}

std::vector<TrialResult> run_experiment(const PointCloud& base_cloud, const AugmentationSpec& spec,
                                        const ExperimentOptions& options) {
  spec.validate();
  options.train.validate();
  options.icp.validate();
  validate_cloud(base_cloud, "base");
  if (options.methods.empty()) throw InvalidArgument("run_experiment: no methods selected");

  // Instances are built around the normalised base, so errors are in units
  // of its RMS radius.
  const PointCloud base = normalize(base_cloud).first;

  std::vector<Task> tasks;
  for (std::size_t l = 0; l < spec.levels.size(); ++l)
    for (std::size_t t = 0; t < spec.trials_per_level; ++t)
      for (Method m : options.methods) tasks.push_back({l, t, m});

  std::vector<TrialResult> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) results[i] = run_trial(base, spec, options, tasks[i]);
  };
  const std::size_t jobs = std::clamp<std::size_t>(options.jobs, 1, std::max<std::size_t>(tasks.size(), 1));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  return results;
}

std::vector<SuccessRatio> success_ratios(const std::vector<TrialResult>& results) {
  std::map<std::pair<int, double>, SuccessRatio> table;
  for (const auto& r : results) {
    auto [it, inserted] = table.try_emplace({static_cast<int>(r.method), r.level}, SuccessRatio{r.method, r.level, 0, 0});
    it->second.trials += 1;
    it->second.successes += r.success ? 1 : 0;
  }
  std::vector<SuccessRatio> out;
  for (const auto& [key, value] : table) out.push_back(value);
  return out;
}

double success_ratio(const std::vector<TrialResult>& results, Method method, double level) {
  std::size_t hits = 0, total = 0;
  for (const auto& r : results) {
    if (r.method != method || r.level != level) continue;
    ++total;
    hits += r.success ? 1 : 0;
  }
  if (total == 0) throw InvalidArgument("success_ratio: no trials for that method/level");
  return static_cast<double>(hits) / static_cast<double>(total);
}

void write_csv(std::ostream& out, const std::vector<TrialResult>& results) {
  out << kCsvHeader << '\n';
  char buf[256];
  for (const auto& r : results) {
    std::snprintf(buf, sizeof(buf), "%s,%.10g,%zu,%.10g,%.10g,%s,%zu,%.6f\n", to_string(r.method).c_str(), r.level,
                  r.trial_index, rad_to_deg(r.angular_error), r.translation_error, r.success ? "true" : "false",
                  r.epochs_run, r.wall_time_s);
    out << buf;
  }
}

void write_summary(std::ostream& out, const std::vector<TrialResult>& results) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-12s %10s %9s %7s %14s\n", "method", "level", "success", "ratio", "median_err_deg");
  out << buf;
  for (const auto& s : success_ratios(results)) {
    std::vector<double> errs;
    for (const auto& r : results)
      if (r.method == s.method && r.level == s.level) errs.push_back(rad_to_deg(r.angular_error));
    std::sort(errs.begin(), errs.end(), [](double a, double b) {
      return std::isnan(b) ? !std::isnan(a) : (!std::isnan(a) && a < b);
    });
    const std::size_t n = errs.size(), mid = n / 2;
    const double median = n == 0 ? 0.0 : n % 2 ? errs[mid] : 0.5 * (errs[mid - 1] + errs[mid]);
    std::snprintf(buf, sizeof(buf), "%-12s %10g %5zu/%-3zu %7.2f %14.3f\n", to_string(s.method).c_str(), s.level,
                  s.successes, s.trials, s.ratio(), median);
    out << buf;
  }
}

}  // namespace advreg::bench
