#include "advreg/losses.hpp"

#include <algorithm>
#include <vector>

#include "advreg/error.hpp"

namespace advreg {

namespace {

void require_nonempty(const Points& batch, const char* what) {
  if (batch.cols() == 0) throw InvalidArgument(std::string(what) + ": empty batch");
}

Points interpolate_points(std::span<const Interpolate> interpolates) {
  Points pts(3, static_cast<Eigen::Index>(interpolates.size()));
  for (std::size_t i = 0; i < interpolates.size(); ++i) pts.col(static_cast<Eigen::Index>(i)) = interpolates[i].point;
  return pts;
}

}  // namespace

Points augment_batch(const Points& batch, const BatchAugment& augment) {
  Points out = batch * augment.scale;
  out.colwise() += augment.shift;
  return out;
}

Points transform_batch(const Points& batch, const RigidTransform& transform, const BatchAugment& augment) {
  Points out = exp_map(transform.rotation_vector) * batch;
  out.colwise() += transform.translation;
  if (augment.scale != 1.0 || !augment.shift.isZero(0.0)) return augment_batch(out, augment);
  return out;
}

double critic_loss(const CriticNet& net, const Points& target_batch, const Points& transformed_source_batch) {
  require_nonempty(target_batch, "critic_loss");
  require_nonempty(transformed_source_batch, "critic_loss");
  return -(forward(net, target_batch).mean() - forward(net, transformed_source_batch).mean());
}

std::vector<Interpolate> make_interpolates(const Points& target_batch, const Points& transformed_source_batch,
                                           RandomStream& rng) {
  const auto count = static_cast<std::size_t>(std::min(target_batch.cols(), transformed_source_batch.cols()));
  std::vector<double> alphas(count);
  for (auto& a : alphas) a = rng.uniform();
  return make_interpolates(target_batch, transformed_source_batch, alphas);
}

std::vector<Interpolate> make_interpolates(const Points& target_batch, const Points& transformed_source_batch,
                                           std::span<const double> alphas) {
  require_nonempty(target_batch, "make_interpolates");
  require_nonempty(transformed_source_batch, "make_interpolates");
  const auto count = static_cast<std::size_t>(std::min(target_batch.cols(), transformed_source_batch.cols()));
  if (alphas.size() != count) throw InvalidArgument("make_interpolates: need one alpha per pair");
  std::vector<Interpolate> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double a = alphas[i];
    if (!(a >= 0.0 && a <= 1.0)) throw InvalidArgument("make_interpolates: alpha outside [0, 1]");
    const auto col = static_cast<Eigen::Index>(i);
    out[i] = {a * target_batch.col(col) + (1.0 - a) * transformed_source_batch.col(col), a};
  }
  return out;
}

double gradient_penalty(const CriticNet& net, std::span<const Interpolate> interpolates) {
  if (interpolates.empty()) throw InvalidArgument("gradient_penalty: no interpolates");
  const Points g = grad_input(net, interpolate_points(interpolates));
  double sum = 0.0;
  for (Eigen::Index i = 0; i < g.cols(); ++i) {
    const double d = g.col(i).norm() - 1.0;
    sum += d * d;
  }
  return sum / static_cast<double>(g.cols());
}

CriticLossEvaluation critic_loss_full(const CriticNet& net, const Points& target_batch,
                                      const Points& transformed_source_batch, double lambda, RandomStream& rng) {
  const auto interpolates = make_interpolates(target_batch, transformed_source_batch, rng);
  return critic_loss_full(net, target_batch, transformed_source_batch, lambda, interpolates);
}

CriticLossEvaluation critic_loss_full(const CriticNet& net, const Points& target_batch,
                                      const Points& transformed_source_batch, double lambda,
                                      std::span<const Interpolate> interpolates) {
  require_nonempty(target_batch, "critic_loss_full");
  require_nonempty(transformed_source_batch, "critic_loss_full");
  if (!(lambda >= 0.0)) throw InvalidArgument("critic_loss_full: lambda must be >= 0");

  const auto n = static_cast<std::size_t>(target_batch.cols());
  const auto m = static_cast<std::size_t>(transformed_source_batch.cols());
  CriticLossEvaluation eval;
  eval.wasserstein_term = critic_loss(net, target_batch, transformed_source_batch);

  const std::vector<double> target_cot(n, -1.0 / static_cast<double>(n));
  const std::vector<double> source_cot(m, 1.0 / static_cast<double>(m));
  eval.gradients = backward_params(net, target_batch, target_cot);
  eval.gradients += backward_params(net, transformed_source_batch, source_cot);

  eval.value = eval.wasserstein_term;
  if (lambda > 0.0 && !interpolates.empty()) {
    auto penalty = penalty_with_gradients(net, interpolate_points(interpolates), lambda);
    eval.penalty_term = penalty.value / lambda;
    eval.value += penalty.value;
    eval.gradients += penalty.gradients;
  } else if (!interpolates.empty()) {
    eval.penalty_term = gradient_penalty(net, interpolates);
  }
  return eval;
}

GeneratorLossEvaluation generator_loss(const CriticNet& net, const Points& source_batch,
                                       const RigidTransform& transform, const BatchAugment& augment) {
  require_nonempty(source_batch, "generator_loss");
  const Mat3 r = exp_map(transform.rotation_vector);
  Points moved = r * source_batch;
  moved.colwise() += transform.translation;
  moved = augment_batch(moved, augment);

  const auto m = static_cast<double>(source_batch.cols());
  GeneratorLossEvaluation eval;
  eval.value = -forward(net, moved).mean();

  // d/dt = -(s/m) sum g_j. d/dw = -(s/m) sum_j (-R [x_j]x J_r)^T g_j
  //      = (s/m) J_r^T sum_j (R^T g_j) x x_j.
  const Points g = grad_input(net, moved);
  const Points u = r.transpose() * g;
  Vec3 cross_sum = Vec3::Zero();
  for (Eigen::Index j = 0; j < source_batch.cols(); ++j)
    cross_sum += Vec3(u.col(j)).cross(Vec3(source_batch.col(j)));
  const double s = augment.scale / m;
  eval.gradient.head<3>() = s * (right_jacobian(transform.rotation_vector).transpose() * cross_sum);
  eval.gradient.tail<3>() = -s * g.rowwise().sum();
  return eval;
}

}  // namespace advreg
