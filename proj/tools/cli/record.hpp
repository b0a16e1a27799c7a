#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "advreg/geometry.hpp"

namespace advreg::cli {

/// Plain-text transform record written by `register` and `icp`.
///
///   advreg-transform 1
///   method adversarial
///   mode joint
///   seed 0
///   rotation_matrix
///     r00 r01 r02
///     r10 r11 r12
///     r20 r21 r22
///   rotation_vector x y z
///   translation x y z
///   epochs 500
///   final_critic_loss v
///   final_generator_loss v
///   wall_time_s 2.713
///
/// Reals use 17 significant digits; wall_time_s is the only field that varies
/// between runs with the same seed.
struct TransformRecord {
  std::string method;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
  Mat3 rotation = Mat3::Identity();
  Vec3 rotation_vector = Vec3::Zero();
  Vec3 translation = Vec3::Zero();
  std::size_t epochs = 0;
  std::vector<std::pair<std::string, double>> scalars;
  double wall_time_s = 0.0;
};

void write_record(std::ostream& out, const TransformRecord& record);
TransformRecord read_record(std::istream& in);

}  // namespace advreg::cli
