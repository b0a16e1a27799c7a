#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "advreg/icp.hpp"
#include "advreg/pointcloud.hpp"
#include "advreg/random.hpp"
#include "advreg/registration.hpp"

namespace advreg::bench {

enum class AugmentationKind { rotation_sweep, noise, partial_overlap, outliers };
enum class Method { adversarial, icp };

std::string to_string(AugmentationKind kind);
std::string to_string(Method method);
AugmentationKind parse_kind(const std::string& text);
Method parse_method(const std::string& text);

/// One synthetic study: for every level, `trials_per_level` random instances.
struct AugmentationSpec {
  AugmentationKind kind = AugmentationKind::rotation_sweep;
  std::vector<double> levels;
  std::size_t trials_per_level = 10;
  /// Rotation magnitude for every kind except rotation_sweep.
  double base_rotation_deg = 24.0;
  std::uint64_t seed = 0;
  /// Per-axis std of a random ground-truth translation (in units of the base
  /// cloud RMS radius); 0 keeps the translation at zero.
  double translation_sigma = 0.0;
  /// Draw rotation vectors from N(0, I) instead of a fixed magnitude.
  bool gaussian_rotations = false;
  /// Accept noise levels outside [0.01, 0.05].
  bool allow_any_noise = false;

  void validate() const;
};

struct TrialResult {
  double level = 0.0;
  std::size_t trial_index = 0;
  Method method = Method::adversarial;
  double angular_error = 0.0;  ///< radians
  double translation_error = 0.0;
  bool success = false;
  std::size_t epochs_run = 0;
  double wall_time_s = 0.0;
  std::string diagnostic;  ///< non-empty when the trial threw
};

/// Uniform random axis, fixed angle, zero translation.
RigidTransform random_rotation(double magnitude_deg, RandomStream& rng);

/// Gaussian noise, per-coordinate std = sigma_relative * rms_radius(cloud).
PointCloud add_noise(const PointCloud& cloud, double sigma_relative, RandomStream& rng);

struct OverlapSplit {
  PointCloud first;
  PointCloud second;
  std::vector<std::size_t> first_indices;
  std::vector<std::size_t> second_indices;
};

/// Slices along a random direction: the first part keeps the lowest
/// (1 + alpha)/2 of the points by projection, the second the highest, so
/// they share a fraction alpha of the original points.
OverlapSplit partial_overlap_split(const PointCloud& cloud, double alpha, RandomStream& rng);

/// Appends ceil(fraction * |cloud|) points uniform in the cloud's bounding box.
PointCloud add_outliers(const PointCloud& cloud, double fraction, RandomStream& rng);

/// One registration problem with known answer: target ~ truth(source).
struct Instance {
  PointCloud source;
  PointCloud target;
  RigidTransform truth;
};

/// Builds the instance for (level, trial). `base` should be centred.
Instance make_instance(const PointCloud& base, const AugmentationSpec& spec, double level, RandomStream& rng);

struct ExperimentOptions {
  std::vector<Method> methods{Method::adversarial, Method::icp};
  TrainConfig train;
  IcpConfig icp;
  std::size_t jobs = 1;
};

/// Runs every (level, trial, method) on instances built from the normalised
/// base cloud (zero centroid, unit RMS radius). Results are ordered by level, trial,
/// then method, and are independent of `jobs`. Failing trials are recorded
/// with success = false and a diagnostic.
std::vector<TrialResult> run_experiment(const PointCloud& base_cloud, const AugmentationSpec& spec,
                                        const ExperimentOptions& options);

struct SuccessRatio {
  Method method;
  double level;
  std::size_t successes;
  std::size_t trials;
  double ratio() const { return trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0; }
};

std::vector<SuccessRatio> success_ratios(const std::vector<TrialResult>& results);
double success_ratio(const std::vector<TrialResult>& results, Method method, double level);

inline constexpr const char* kCsvHeader =
    "method,level,trial,angular_error_deg,translation_error,success,epochs,wall_time_s";

void write_csv(std::ostream& out, const std::vector<TrialResult>& results);
void write_summary(std::ostream& out, const std::vector<TrialResult>& results);

}  // namespace advreg::bench
