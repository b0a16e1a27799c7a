#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>

#include <Eigen/Geometry>

#include "advreg/critic.hpp"
#include "advreg/geometry.hpp"
#include "advreg/losses.hpp"
#include "cli/commands.hpp"

namespace advreg::cli {

namespace {

constexpr double kFaultSize = 1e-2;

double rel_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max(1.0, std::abs(numeric));
}

double central_difference(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x,
                          Eigen::Index i, double h) {
  const double x0 = x[i];
  x[i] = x0 + h;
  const double up = f(x);
  x[i] = x0 - h;
  const double down = f(x);
  return (up - down) / (2.0 * h);
}

// Largest relative error between `analytic` and a central difference of f at x.
double fd_max_error(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& analytic, double h) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    worst = std::max(worst, rel_error(analytic[i], central_difference(f, x, i, h)));
  return worst;
}

Vec3 random_rotation_vector(RandomStream& rng, double max_angle) {
  Vec3 axis = normal_vec3(rng);
  return axis.normalized() * rng.uniform(0.0, max_angle);
}

Points random_points(RandomStream& rng, Eigen::Index n) {
  Points p(3, n);
  for (Eigen::Index j = 0; j < n; ++j) p.col(j) = normal_vec3(rng);
  return p;
}

CriticNet with_params(const CriticNet& net, const Eigen::VectorXd& flat) {
  CriticNet out = net;
  out.set_parameters(flat);
  return out;
}

struct Context {
  RandomStream rng{20240601};
  std::vector<std::string> faults;
  bool faulty(const std::string& name) const {
    return std::find(faults.begin(), faults.end(), name) != faults.end();
  }
  void maybe_perturb(const std::string& name, Eigen::VectorXd& analytic) const {
    if (faulty(name)) analytic[0] += kFaultSize;
  }
};

double check_exp_map(Context& ctx) {
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const Vec3 w = random_rotation_vector(ctx.rng, M_PI);
    const Mat3 oracle = w.norm() > 0 ? Eigen::AngleAxisd(w.norm(), w.normalized()).toRotationMatrix() : Mat3::Identity();
    Mat3 r = exp_map(w);
    if (ctx.faulty("geometry.exp_map")) r(0, 0) += kFaultSize;
    worst = std::max(worst, (r - oracle).cwiseAbs().maxCoeff());
  }
  return worst;
}

double check_transform_jacobian(Context& ctx) {
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const RigidTransform t{random_rotation_vector(ctx.rng, 3.0), normal_vec3(ctx.rng)};
    const Vec3 p = normal_vec3(ctx.rng);
    const Mat36 jac = d_transform_d_params(t, p);
    for (int row = 0; row < 3; ++row) {
      auto f = [&](const Eigen::VectorXd& x) { return apply_transform(RigidTransform::from_params(x), p)[row]; };
      Eigen::VectorXd analytic = jac.row(row).transpose();
      ctx.maybe_perturb("geometry.transform_jacobian", analytic);
      worst = std::max(worst, fd_max_error(f, t.params(), analytic, 1e-6));
    }
  }
  return worst;
}

double check_critic_params(Context& ctx) {
  const CriticNet net = init_critic(16, 4, ctx.rng);
  const Points batch = random_points(ctx.rng, 6);
  std::vector<double> cot(6);
  for (double& c : cot) c = ctx.rng.normal();
  auto f = [&](const Eigen::VectorXd& theta) {
    const Eigen::RowVectorXd y = forward(with_params(net, theta), batch);
    double s = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) s += cot[i] * y[i];
    return s;
  };
  Eigen::VectorXd analytic = backward_params(net, batch, cot).flatten();
  ctx.maybe_perturb("critic.param_gradient", analytic);
  return fd_max_error(f, net.parameters(), analytic, 1e-6);
}

double check_critic_input(Context& ctx) {
  const CriticNet net = init_critic(32, 4, ctx.rng);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Vec3 x = normal_vec3(ctx.rng);
    auto f = [&](const Eigen::VectorXd& p) { return forward(net, Vec3(p)); };
    Eigen::VectorXd analytic = grad_input(net, x);
    ctx.maybe_perturb("critic.input_gradient", analytic);
    worst = std::max(worst, fd_max_error(f, x, analytic, 1e-6));
  }
  return worst;
}

double check_penalty(Context& ctx) {
  const CriticNet net = init_critic(16, 4, ctx.rng);
  const Points batch = random_points(ctx.rng, 5);
  auto f = [&](const Eigen::VectorXd& theta) { return penalty_with_gradients(with_params(net, theta), batch, 10.0).value; };
  Eigen::VectorXd analytic = penalty_with_gradients(net, batch, 10.0).gradients.flatten();
  ctx.maybe_perturb("critic.penalty_gradient", analytic);
  return fd_max_error(f, net.parameters(), analytic, 1e-6);
}

double check_critic_loss(Context& ctx) {
  const CriticNet net = init_critic(16, 4, ctx.rng);
  const Points target = random_points(ctx.rng, 6);
  const Points source = random_points(ctx.rng, 6);
  const auto inter = make_interpolates(target, source, ctx.rng);
  auto f = [&](const Eigen::VectorXd& theta) {
    return critic_loss_full(with_params(net, theta), target, source, 10.0, inter).value;
  };
  Eigen::VectorXd analytic = critic_loss_full(net, target, source, 10.0, inter).gradients.flatten();
  ctx.maybe_perturb("losses.critic_loss_gradient", analytic);
  return fd_max_error(f, net.parameters(), analytic, 1e-6);
}

double check_generator(Context& ctx) {
  const CriticNet net = init_critic(32, 4, ctx.rng);
  const Points source = random_points(ctx.rng, 16);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const RigidTransform t{random_rotation_vector(ctx.rng, 3.0), normal_vec3(ctx.rng)};
    const BatchAugment aug{ctx.rng.uniform(0.5, 2.0), normal_vec3(ctx.rng)};
    auto f = [&](const Eigen::VectorXd& x) { return generator_loss(net, source, RigidTransform::from_params(x), aug).value; };
    Eigen::VectorXd analytic = generator_loss(net, source, t, aug).gradient;
    ctx.maybe_perturb("losses.generator_gradient", analytic);
    worst = std::max(worst, fd_max_error(f, t.params(), analytic, 1e-6));
  }
  return worst;
}

double quaternion_angle(const Vec3& a, const Vec3& b) {
  auto q = [](const Vec3& w) {
    return w.norm() > 0 ? Eigen::Quaterniond(Eigen::AngleAxisd(w.norm(), w.normalized())) : Eigen::Quaterniond::Identity();
  };
  const Eigen::Quaterniond d = q(a).conjugate() * q(b);
  return 2.0 * std::atan2(d.vec().norm(), std::abs(d.w()));
}

double check_metric_geodesic(Context& ctx) {
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Vec3 a = random_rotation_vector(ctx.rng, M_PI);
    const Vec3 b = random_rotation_vector(ctx.rng, M_PI);
    double d = angular_distance(exp_map(a), exp_map(b));
    if (ctx.faulty("metric.quaternion_geodesic")) d += kFaultSize;
    worst = std::max(worst, std::abs(d - quaternion_angle(a, b)));
  }
  return worst;
}

double check_metric_identity(Context& ctx) {
  double worst = 0.0;
  for (int k = 0; k <= 1000; ++k) {
    const double angle = M_PI * k / 1000.0;
    const Vec3 w = random_rotation_vector(ctx.rng, 1.0).normalized() * angle;
    double d = angular_distance(Mat3::Identity(), exp_map(w));
    if (ctx.faulty("metric.identity_angle")) d += kFaultSize;
    worst = std::max(worst, std::abs(d - angle));
  }
  return worst;
}

struct CheckDef {
  const char* name;
  double tolerance;
  double (*run)(Context&);
};

constexpr CheckDef kChecks[] = {
    {"geometry.exp_map", 1e-12, check_exp_map},
    {"geometry.transform_jacobian", 1e-6, check_transform_jacobian},
    {"critic.param_gradient", 1e-6, check_critic_params},
    {"critic.input_gradient", 1e-6, check_critic_input},
    {"critic.penalty_gradient", 1e-5, check_penalty},
    {"losses.critic_loss_gradient", 1e-5, check_critic_loss},
    {"losses.generator_gradient", 1e-6, check_generator},
    {"metric.quaternion_geodesic", 1e-9, check_metric_geodesic},
    {"metric.identity_angle", 1e-9, check_metric_identity},
};

}  // namespace

std::vector<std::string> selfcheck_names() {
  std::vector<std::string> names;
  for (const auto& c : kChecks) names.emplace_back(c.name);
  return names;
}

std::vector<CheckResult> run_selfchecks(const SelfcheckOptions& opts) {
  Context ctx;
  ctx.faults = opts.inject_faults;
  std::vector<CheckResult> results;
  for (const auto& c : kChecks) results.push_back({c.name, c.run(ctx), c.tolerance});
  return results;
}

int cmd_selfcheck(const SelfcheckOptions& opts, std::ostream& out, std::ostream& err) {
  const auto names = selfcheck_names();
  for (const auto& f : opts.inject_faults) {
    if (std::find(names.begin(), names.end(), f) == names.end()) {
      err << "error: unknown check '" << f << "'\n";
      return kInputError;
    }
  }
  int failed = 0;
  for (const auto& r : run_selfchecks(opts)) {
    char line[160];
    std::snprintf(line, sizeof line, "%-4s %-30s max_error=%.3e tolerance=%.0e\n", r.passed() ? "ok" : "FAIL",
                  r.name.c_str(), r.max_error, r.tolerance);
    out << line;
    if (!r.passed()) {
      err << "selfcheck failed: " << r.name << '\n';
      ++failed;
    }
  }
  return failed ? kCheckFailed : kOk;
}

}  // namespace advreg::cli
