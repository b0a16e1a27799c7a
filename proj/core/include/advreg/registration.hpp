#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "advreg/geometry.hpp"
#include "advreg/optimizer.hpp"
#include "advreg/pointcloud.hpp"

namespace advreg {

enum class RegistrationMode {
  joint,                     ///< rotation and translation optimised together
  rotation_only,             ///< translation frozen at zero
  rotation_then_translation  ///< augmented rotation phase, then translation phase
};

std::string to_string(RegistrationMode mode);
RegistrationMode parse_mode(const std::string& text);

/// Hyper-parameters of the adversarial loop. Every default is exposed in the
/// key=value config format (see config.hpp).
struct TrainConfig {
  std::size_t n_epochs = 500;
  std::size_t k_critic = 5;
  std::size_t k_generator = 1;
  Schedule batch_size = Schedule::constant(128);
  Schedule lr_critic = Schedule::constant(8e-3);
  Schedule lr_generator = Schedule::exponential(1e-2, 0.99);
  double lambda_gp = 10.0;
  RegistrationMode mode = RegistrationMode::joint;
  double augment_shift_sigma = 0.1;
  double augment_scale_min = 0.5;
  double augment_scale_max = 2.0;
  bool normalize_inputs = true;
  std::uint64_t seed = 0;
  double success_threshold = deg_to_rad(4.0);
  std::size_t critic_width = 32;
  std::size_t critic_depth = 4;
  /// Stop once the generator parameters moved less than plateau_tolerance
  /// (max-abs) for this many consecutive epochs. 0 disables.
  std::size_t plateau_patience = 0;
  double plateau_tolerance = 1e-5;

  void validate() const;
};

struct LossTraceEntry {
  std::size_t epoch = 0;
  double critic_loss = 0.0;
  double generator_loss = 0.0;

  bool operator==(const LossTraceEntry&) const = default;
};

struct RegistrationResult {
  /// Maps source points onto the target, in the clouds' original coordinates.
  RigidTransform transform;
  std::size_t epochs_run = 0;
  std::vector<LossTraceEntry> loss_trace;
  /// ICP only: mean squared correspondence distance per iteration.
  std::vector<double> correspondence_mse;
  double final_critic_loss = 0.0;
  double final_generator_loss = 0.0;
  double wall_time_s = 0.0;
};

struct PhaseResult {
  RigidTransform transform;
  std::vector<LossTraceEntry> trace;
  std::size_t epochs_run = 0;
};

/// Separate centroids, one shared isotropic scale sqrt(rms_source * rms_target).
struct PairNormalization {
  NormalizationRecord source;
  NormalizationRecord target;
};

PairNormalization normalize_pair(const PointCloud& source, const PointCloud& target);
/// Re-expresses a transform found between normalised clouds in original
/// coordinates: target.invert(M(source.apply(p))) == result(p).
RigidTransform denormalize_transform(const RigidTransform& normalized, const PairNormalization& norm);

/// Called after every epoch with the epoch index (within the phase), the
/// current transform in the coordinates the loop works in, and the losses.
using EpochObserver = std::function<void(std::size_t, const RigidTransform&, const LossTraceEntry&)>;

/// The full adversarial registration. Deterministic given cfg.seed.
RegistrationResult register_adversarial(const PointCloud& source, const PointCloud& target, const TrainConfig& cfg,
                                        const EpochObserver& observer = {});

/// Rotation-only loop with per-epoch random shift/scale augmentation of both
/// batches. With cfg.normalize_inputs the pair is normalised first; the
/// returned translation is zero either way.
PhaseResult register_rotation_phase(const PointCloud& source, const PointCloud& target, const TrainConfig& cfg);

/// Translation-only loop with the rotation frozen to `fixed_rotation`; no
/// augmentation. With cfg.normalize_inputs the pair is normalised first and
/// the translation is returned in original target coordinates.
PhaseResult register_translation_phase(const PointCloud& source, const PointCloud& target,
                                       const RigidTransform& fixed_rotation, const TrainConfig& cfg);

}  // namespace advreg
