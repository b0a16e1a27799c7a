#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "advreg/geometry.hpp"
#include "advreg/pointcloud.hpp"
#include "advreg/random.hpp"

namespace advreg {

/// Dense layer y = W^T x + b with W stored fan_in x fan_out.
struct DenseLayer {
  Eigen::MatrixXd weight;
  Eigen::VectorXd bias;
};

/// Scalar critic R^3 -> R: `depth` dense layers, ReLU after all but the
/// last. The default shape is 3 -> 32 -> 32 -> 32 -> 1.
struct CriticNet {
  std::vector<DenseLayer> layers;

  std::size_t depth() const { return layers.size(); }
  std::size_t parameter_count() const;
  /// Flat parameter vector: per layer, weight (column-major) then bias.
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& flat);
};

/// Gradient with respect to every critic parameter; same shapes as the net.
struct CriticGradients {
  std::vector<DenseLayer> layers;

  static CriticGradients zeros_like(const CriticNet& net);
  Eigen::VectorXd flatten() const;
  CriticGradients& operator+=(const CriticGradients& other);
  CriticGradients& operator*=(double s);
};

inline constexpr std::size_t kDefaultCriticWidth = 32;
inline constexpr std::size_t kDefaultCriticDepth = 4;

/// He-normal weights (variance 2 / fan_in), zero biases.
CriticNet init_critic(std::size_t width, std::size_t depth, RandomStream& rng);

double forward(const CriticNet& net, const Vec3& x);
Eigen::RowVectorXd forward(const CriticNet& net, const Points& batch);

/// sum_i c_i * d f(x_i) / d theta.
CriticGradients backward_params(const CriticNet& net, const Points& batch,
                                std::span<const double> cotangents);

Vec3 grad_input(const CriticNet& net, const Vec3& x);
Points grad_input(const CriticNet& net, const Points& batch);

/// d/d theta of (|grad_x f(x_hat)| - 1)^2. Zero when the input-gradient norm
/// is below 1e-12.
CriticGradients backward_gp(const CriticNet& net, const Vec3& x_hat);

struct PenaltyEvaluation {
  double value = 0.0;  ///< weight * mean_i (|g_i| - 1)^2
  CriticGradients gradients;
};

/// Batched gradient penalty: value and parameter gradient of
/// weight * mean_i (|grad_x f(x_i)| - 1)^2.
PenaltyEvaluation penalty_with_gradients(const CriticNet& net, const Points& batch, double weight);

/// Binary checkpoint: "ADVC", version byte, u32 layer-dim count, u32 dims,
/// then per layer row-major float64 weights followed by biases (little endian).
void save_critic(const std::string& path, const CriticNet& net);
CriticNet load_critic(const std::string& path);

}  // namespace advreg
