#include "advreg/registration.hpp"

#include <chrono>
#include <cmath>

#include "advreg/critic.hpp"
#include "advreg/error.hpp"
#include "advreg/losses.hpp"
#include "advreg/random.hpp"

namespace advreg {

namespace {

constexpr std::uint64_t kMainStream = 1;
constexpr std::uint64_t kTranslationStream = 2;

struct PhaseOptions {
  bool optimize_rotation = true;
  bool optimize_translation = true;
  bool augment = false;
};

std::string epoch_message(const char* what, std::size_t epoch) {
  return std::string(what) + " at epoch " + std::to_string(epoch);
}

// One run of the alternating critic/generator game.
PhaseResult run_phase(const PointCloud& source, const PointCloud& target, const RigidTransform& init,
                      const PhaseOptions& opts, const TrainConfig& cfg, RandomStream& rng,
                      const EpochObserver& observer = {}) {
  PhaseResult result;
  result.transform = init;
  if (cfg.n_epochs == 0) return result;

  CriticNet critic = init_critic(cfg.critic_width, cfg.critic_depth, rng);
  Eigen::VectorXd critic_params = critic.parameters();
  AdamState critic_opt = make_adam(critic.parameter_count(), schedule_value(cfg.lr_critic, 0));
  Eigen::VectorXd gen_params = init.params();
  AdamState gen_opt = make_adam(6, schedule_value(cfg.lr_generator, 0));

  Vec6 free_mask = Vec6::Zero();
  if (opts.optimize_rotation) free_mask.head<3>().setOnes();
  if (opts.optimize_translation) free_mask.tail<3>().setOnes();

  const bool augment = opts.augment && (cfg.augment_shift_sigma > 0.0 || cfg.augment_scale_min != 1.0 ||
                                        cfg.augment_scale_max != 1.0);
  std::size_t still_epochs = 0;
  result.trace.reserve(cfg.n_epochs);

  for (std::size_t epoch = 0; epoch < cfg.n_epochs; ++epoch) {
    critic_opt.lr = schedule_value(cfg.lr_critic, epoch);
    gen_opt.lr = schedule_value(cfg.lr_generator, epoch);
    const std::size_t batch = schedule_count(cfg.batch_size, epoch);

    BatchAugment target_aug, source_aug;
    if (augment) {
      const double scale = rng.uniform(cfg.augment_scale_min, cfg.augment_scale_max);
      const double sigma = cfg.augment_shift_sigma;
      target_aug = {scale, normal_vec3(rng) * sigma};
      source_aug = {scale, normal_vec3(rng) * sigma};
    }

    const RigidTransform current = RigidTransform::from_params(gen_params);
    double critic_value = 0.0;
    for (std::size_t k = 0; k < cfg.k_critic; ++k) {
      const Points x = augment_batch(sample_batch(target, batch, rng), target_aug);
      const Points y = transform_batch(sample_batch(source, batch, rng), current, source_aug);
      const auto eval = critic_loss_full(critic, x, y, cfg.lambda_gp, rng);
      critic_value = eval.value;
      if (!std::isfinite(critic_value)) throw NumericAbort(epoch_message("non-finite critic loss", epoch), static_cast<long>(epoch));
      try {
        adam_step(critic_opt, critic_params, eval.gradients.flatten());
      } catch (const NumericAbort&) {
        throw NumericAbort(epoch_message("non-finite critic gradient", epoch), static_cast<long>(epoch));
      }
      critic.set_parameters(critic_params);
    }

    const Vec6 before = gen_params;
    double gen_value = 0.0;
    for (std::size_t k = 0; k < cfg.k_generator; ++k) {
      const Points xs = sample_batch(source, batch, rng);
      const auto eval = generator_loss(critic, xs, RigidTransform::from_params(gen_params), source_aug);
      gen_value = eval.value;
      if (!std::isfinite(gen_value)) throw NumericAbort(epoch_message("non-finite generator loss", epoch), static_cast<long>(epoch));
      try {
        adam_step(gen_opt, gen_params, eval.gradient.cwiseProduct(free_mask));
      } catch (const NumericAbort&) {
        throw NumericAbort(epoch_message("non-finite generator gradient", epoch), static_cast<long>(epoch));
      }
    }

    result.trace.push_back({epoch, critic_value, gen_value});
    result.epochs_run = epoch + 1;
    if (observer) observer(epoch, RigidTransform::from_params(gen_params), result.trace.back());

    if (cfg.plateau_patience > 0) {
      const double moved = (gen_params - before).cwiseAbs().maxCoeff();
      still_epochs = moved < cfg.plateau_tolerance ? still_epochs + 1 : 0;
      if (still_epochs >= cfg.plateau_patience) break;
    }
  }
  result.transform = RigidTransform::from_params(gen_params);
  return result;
}

void append_trace(RegistrationResult& out, const PhaseResult& phase) {
  const std::size_t offset = out.epochs_run;
  for (auto entry : phase.trace) {
    entry.epoch += offset;
    out.loss_trace.push_back(entry);
  }
  out.epochs_run += phase.epochs_run;
}

}  // namespace

std::string to_string(RegistrationMode mode) {
  switch (mode) {
    case RegistrationMode::joint: return "joint";
    case RegistrationMode::rotation_only: return "rotation-only";
    case RegistrationMode::rotation_then_translation: return "two-phase";
  }
  return "joint";
}

RegistrationMode parse_mode(const std::string& text) {
  if (text == "joint") return RegistrationMode::joint;
  if (text == "rotation-only" || text == "rotation_only") return RegistrationMode::rotation_only;
  if (text == "two-phase" || text == "rotation_then_translation") return RegistrationMode::rotation_then_translation;
  throw InvalidArgument("unknown registration mode '" + text + "'");
}

void TrainConfig::validate() const {
  if (k_critic < 1 || k_generator < 1) throw InvalidArgument("k_critic and k_generator must be >= 1");
  validate_schedule(batch_size, true);
  if (schedule_value(batch_size, 0) < 0.5) throw InvalidArgument("batch_size must be >= 1");
  validate_schedule(lr_critic, false);
  validate_schedule(lr_generator, false);
  if (!(lambda_gp >= 0.0) || !std::isfinite(lambda_gp)) throw InvalidArgument("lambda_gp must be >= 0");
  if (!(augment_shift_sigma >= 0.0)) throw InvalidArgument("augment_shift_sigma must be >= 0");
  if (!(augment_scale_min > 0.0 && augment_scale_min <= augment_scale_max && std::isfinite(augment_scale_max)))
    throw InvalidArgument("augment scale range must be positive and ordered");
  if (!(success_threshold > 0.0)) throw InvalidArgument("success_threshold must be > 0");
  if (critic_width < 1 || critic_depth < 2) throw InvalidArgument("critic needs width >= 1 and depth >= 2");
}

PairNormalization normalize_pair(const PointCloud& source, const PointCloud& target) {
  const double scale = std::sqrt(rms_radius(source) * rms_radius(target));
  if (!(scale > 0.0)) throw DegenerateInput("normalize_pair: degenerate cloud");
  return {{centroid(source), scale}, {centroid(target), scale}};
}

RigidTransform denormalize_transform(const RigidTransform& normalized, const PairNormalization& norm) {
  // target.invert(R (p - c_s)/s + t) = R p + (s t + c_t - R c_s); scales are shared.
  const Mat3 r = normalized.rotation();
  RigidTransform out;
  out.rotation_vector = normalized.rotation_vector;
  out.translation = norm.target.scale * normalized.translation + norm.target.centroid - r * norm.source.centroid;
  return out;
}

RegistrationResult register_adversarial(const PointCloud& source, const PointCloud& target, const TrainConfig& cfg,
                                        const EpochObserver& observer) {
  cfg.validate();
  validate_cloud(source, "source");
  validate_cloud(target, "target");
  const auto start = std::chrono::steady_clock::now();

  PairNormalization norm{{Vec3::Zero(), 1.0}, {Vec3::Zero(), 1.0}};
  if (cfg.normalize_inputs) norm = normalize_pair(source, target);
  const PointCloud src = cfg.normalize_inputs ? apply_normalization(source, norm.source) : source;
  const PointCloud tgt = cfg.normalize_inputs ? apply_normalization(target, norm.target) : target;

  RegistrationResult out;
  RigidTransform found;
  RandomStream rng(derive_seed(cfg.seed, kMainStream));
  switch (cfg.mode) {
    case RegistrationMode::joint: {
      auto phase = run_phase(src, tgt, RigidTransform::identity(), {true, true, false}, cfg, rng, observer);
      append_trace(out, phase);
      found = phase.transform;
      break;
    }
    case RegistrationMode::rotation_only: {
      auto phase = run_phase(src, tgt, RigidTransform::identity(), {true, false, false}, cfg, rng, observer);
      append_trace(out, phase);
      found = phase.transform;
      break;
    }
    case RegistrationMode::rotation_then_translation: {
      auto rotation = run_phase(src, tgt, RigidTransform::identity(), {true, false, true}, cfg, rng, observer);
      append_trace(out, rotation);
      RandomStream rng2(derive_seed(cfg.seed, kTranslationStream));
      RigidTransform start_t{rotation.transform.rotation_vector, Vec3::Zero()};
      auto translation = run_phase(src, tgt, start_t, {false, true, false}, cfg, rng2, observer);
      append_trace(out, translation);
      found = translation.transform;
      break;
    }
  }
  found.rotation_vector = canonicalize_rotation_vector(found.rotation_vector);
  out.transform = denormalize_transform(found, norm);
  if (!out.loss_trace.empty()) {
    out.final_critic_loss = out.loss_trace.back().critic_loss;
    out.final_generator_loss = out.loss_trace.back().generator_loss;
  }
  out.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

PhaseResult register_rotation_phase(const PointCloud& source, const PointCloud& target, const TrainConfig& cfg) {
  cfg.validate();
  validate_cloud(source, "source");
  validate_cloud(target, "target");
  RandomStream rng(derive_seed(cfg.seed, kMainStream));
  if (!cfg.normalize_inputs) return run_phase(source, target, RigidTransform::identity(), {true, false, true}, cfg, rng);
  const PairNormalization norm = normalize_pair(source, target);
  PhaseResult out = run_phase(apply_normalization(source, norm.source), apply_normalization(target, norm.target),
                              RigidTransform::identity(), {true, false, true}, cfg, rng);
  out.transform.translation = Vec3::Zero();
  return out;
}

PhaseResult register_translation_phase(const PointCloud& source, const PointCloud& target,
                                       const RigidTransform& fixed_rotation, const TrainConfig& cfg) {
  cfg.validate();
  validate_cloud(source, "source");
  validate_cloud(target, "target");
  if (!fixed_rotation.rotation_vector.allFinite()) throw InvalidArgument("fixed rotation is not finite");
  RandomStream rng(derive_seed(cfg.seed, kTranslationStream));
  const RigidTransform start{fixed_rotation.rotation_vector, Vec3::Zero()};
  if (!cfg.normalize_inputs) return run_phase(source, target, start, {false, true, false}, cfg, rng);
  const PairNormalization norm = normalize_pair(source, target);
  PhaseResult out = run_phase(apply_normalization(source, norm.source), apply_normalization(target, norm.target),
                              start, {false, true, false}, cfg, rng);
  out.transform = denormalize_transform(out.transform, norm);
  return out;
}

}  // namespace advreg
