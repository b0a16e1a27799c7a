#pragma once

#include <span>
#include <vector>

#include "advreg/critic.hpp"
#include "advreg/geometry.hpp"
#include "advreg/pointcloud.hpp"
#include "advreg/random.hpp"

namespace advreg {

/// x_hat = alpha * target + (1 - alpha) * transformed_source.
struct Interpolate {
  Vec3 point = Vec3::Zero();
  double alpha = 0.0;
};

/// Affine map applied to a batch after the rigid transform: p -> scale * p + shift.
/// The identity by default; the rotation phase uses it for its random
/// shift/scale augmentation.
struct BatchAugment {
  double scale = 1.0;
  Vec3 shift = Vec3::Zero();
};

/// -[ mean_i f(x_i) - mean_j f(y_j) ], x = target batch, y = transformed source.
double critic_loss(const CriticNet& net, const Points& target_batch, const Points& transformed_source_batch);

/// One interpolate per index pair, pairs truncated to min(n, m). Draws one
/// alpha ~ U[0, 1] per pair.
std::vector<Interpolate> make_interpolates(const Points& target_batch, const Points& transformed_source_batch,
                                           RandomStream& rng);
/// Same, with explicit mixing coefficients (one per pair).
std::vector<Interpolate> make_interpolates(const Points& target_batch, const Points& transformed_source_batch,
                                           std::span<const double> alphas);

/// mean_i (|grad_x f(x_hat_i)| - 1)^2.
double gradient_penalty(const CriticNet& net, std::span<const Interpolate> interpolates);

struct CriticLossEvaluation {
  double value = 0.0;
  double wasserstein_term = 0.0;  ///< critic_loss part
  double penalty_term = 0.0;      ///< unweighted gradient penalty
  CriticGradients gradients;
};

/// critic_loss + lambda * gradient_penalty and its gradient w.r.t. every
/// critic parameter.
CriticLossEvaluation critic_loss_full(const CriticNet& net, const Points& target_batch,
                                      const Points& transformed_source_batch, double lambda, RandomStream& rng);
CriticLossEvaluation critic_loss_full(const CriticNet& net, const Points& target_batch,
                                      const Points& transformed_source_batch, double lambda,
                                      std::span<const Interpolate> interpolates);

struct GeneratorLossEvaluation {
  double value = 0.0;
  Vec6 gradient = Vec6::Zero();  ///< w.r.t. (rotation_vector, translation)
};

/// -mean_j f(augment(M(x_j))) and its gradient w.r.t. the 6 transform
/// parameters.
GeneratorLossEvaluation generator_loss(const CriticNet& net, const Points& source_batch,
                                       const RigidTransform& transform, const BatchAugment& augment = {});

/// Applies transform then augmentation to every column.
Points transform_batch(const Points& batch, const RigidTransform& transform, const BatchAugment& augment = {});
Points augment_batch(const Points& batch, const BatchAugment& augment);

}  // namespace advreg
