#pragma once

#include <cstddef>
#include <string>

#include <Eigen/Core>

namespace advreg {

struct AdamState {
  std::size_t step = 0;
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

AdamState make_adam(std::size_t parameter_count, double lr);

/// One bias-corrected Adam update of `params` in place. Throws
/// InvalidArgument on shape mismatch and NumericAbort(epoch = -1) on a
/// non-finite gradient.
void adam_step(AdamState& state, Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& grads);

void sgd_step(double lr, Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& grads);

enum class ScheduleKind { constant, exponential_decay, step_decay };

/// Per-epoch value of a hyper-parameter. `rate` < 1 decays, > 1 grows.
struct Schedule {
  ScheduleKind kind = ScheduleKind::constant;
  double base = 1e-3;
  double rate = 1.0;
  std::size_t interval = 1;

  static Schedule constant(double base) { return {ScheduleKind::constant, base, 1.0, 1}; }
  static Schedule exponential(double base, double rate) { return {ScheduleKind::exponential_decay, base, rate, 1}; }
  static Schedule step(double base, double rate, std::size_t interval) {
    return {ScheduleKind::step_decay, base, rate, interval};
  }
};

void validate_schedule(const Schedule& s, bool allow_growth);
double schedule_value(const Schedule& s, std::size_t epoch);
/// schedule_value rounded to the nearest count, at least 1.
std::size_t schedule_count(const Schedule& s, std::size_t epoch);

/// Text form "constant 0.001", "exponential_decay 0.01 0.995",
/// "step_decay 128 2 100".
Schedule parse_schedule(const std::string& text);
std::string format_schedule(const Schedule& s);

}  // namespace advreg
