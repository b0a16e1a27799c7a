#include "advreg/optimizer.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "advreg/error.hpp"

namespace advreg {

AdamState make_adam(std::size_t parameter_count, double lr) {
  AdamState s;
  s.m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(parameter_count));
  s.v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(parameter_count));
  s.lr = lr;
  return s;
}

void adam_step(AdamState& state, Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& grads) {
  if (params.size() != grads.size() || state.m.size() != grads.size() || state.v.size() != grads.size())
    throw InvalidArgument("adam_step: parameter/gradient/state shapes differ");
  if (!grads.allFinite()) throw NumericAbort("adam_step: non-finite gradient", -1);
  if (!(state.beta1 >= 0.0 && state.beta1 < 1.0 && state.beta2 >= 0.0 && state.beta2 < 1.0 && state.eps > 0.0))
    throw InvalidArgument("adam_step: invalid hyper-parameters");
  ++state.step;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grads;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * grads.cwiseProduct(grads);
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  params.array() -= state.lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + state.eps);
}

void sgd_step(double lr, Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& grads) {
  if (params.size() != grads.size()) throw InvalidArgument("sgd_step: shape mismatch");
  if (!grads.allFinite()) throw NumericAbort("sgd_step: non-finite gradient", -1);
  params -= lr * grads;
}

void validate_schedule(const Schedule& s, bool allow_growth) {
  if (!(s.base > 0.0) || !std::isfinite(s.base)) throw InvalidArgument("schedule base must be > 0");
  if (!(s.rate > 0.0) || !std::isfinite(s.rate)) throw InvalidArgument("schedule rate must be > 0");
  if (!allow_growth && s.rate > 1.0) throw InvalidArgument("decay rate must lie in (0, 1]");
  if (s.kind == ScheduleKind::step_decay && s.interval == 0) throw InvalidArgument("step interval must be >= 1");
}

double schedule_value(const Schedule& s, std::size_t epoch) {
  switch (s.kind) {
    case ScheduleKind::constant:
      return s.base;
    case ScheduleKind::exponential_decay:
      return s.base * std::pow(s.rate, static_cast<double>(epoch));
    case ScheduleKind::step_decay:
      return s.base * std::pow(s.rate, static_cast<double>(epoch / s.interval));
  }
  return s.base;
}

std::size_t schedule_count(const Schedule& s, std::size_t epoch) {
  const double v = std::round(schedule_value(s, epoch));
  return v < 1.0 ? 1 : static_cast<std::size_t>(v);
}

Schedule parse_schedule(const std::string& text) {
  std::istringstream in(text);
  std::string kind;
  std::vector<double> nums;
  in >> kind;
  for (double x; in >> x;) nums.push_back(x);
  if (!in.eof()) throw InvalidArgument("bad schedule '" + text + "'");
  Schedule s;
  if (kind == "constant" && nums.size() == 1) {
    s = Schedule::constant(nums[0]);
  } else if ((kind == "exponential_decay" || kind == "exponential") && nums.size() == 2) {
    s = Schedule::exponential(nums[0], nums[1]);
  } else if ((kind == "step_decay" || kind == "step") && nums.size() == 3 && nums[2] >= 1.0) {
    s = Schedule::step(nums[0], nums[1], static_cast<std::size_t>(nums[2]));
  } else {
    throw InvalidArgument("bad schedule '" + text + "'");
  }
  return s;
}

std::string format_schedule(const Schedule& s) {
  std::ostringstream out;
  out.precision(17);
  switch (s.kind) {
    case ScheduleKind::constant: out << "constant " << s.base; break;
    case ScheduleKind::exponential_decay: out << "exponential_decay " << s.base << ' ' << s.rate; break;
    case ScheduleKind::step_decay: out << "step_decay " << s.base << ' ' << s.rate << ' ' << s.interval; break;
  }
  return out.str();
}

}  // namespace advreg
