#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "advreg/benchmark.hpp"
#include "advreg/error.hpp"
#include "advreg/shapes.hpp"
#include "support/oracles.hpp"

using namespace advreg;
using namespace advreg::bench;

namespace {

PointCloud gaussian_cloud(std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed);
  PointCloud c;
  for (std::size_t i = 0; i < n; ++i) c.points.push_back(normal_vec3(rng));
  return c;
}

const PointCloud& tripod() {
  static const PointCloud c = [] {
    RandomStream rng(7);
    return shapes::tripod(2000, rng);
  }();
  return c;
}

std::set<std::tuple<double, double, double>> as_set(const PointCloud& c) {
  std::set<std::tuple<double, double, double>> s;
  for (const auto& p : c.points) s.emplace(p.x(), p.y(), p.z());
  return s;
}

ExperimentOptions icp_only() {
  ExperimentOptions o;
  o.methods = {Method::icp};
  return o;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(RandomRotation, ZeroMagnitudeIsIdentity) {
  RandomStream rng(1);
  const auto t = random_rotation(0.0, rng);
  EXPECT_EQ(t.rotation(), Mat3::Identity());
  EXPECT_EQ(t.translation, Vec3::Zero());
}

TEST(RandomRotation, AngleMatchesMagnitude) {
  RandomStream rng(2);
  for (double deg : {0.5, 12.0, 24.0, 60.0, 90.0, 120.0, 179.0, 180.0}) {
    for (int i = 0; i < 50; ++i) {
      const auto t = random_rotation(deg, rng);
      EXPECT_NEAR(angular_distance(Mat3::Identity(), t.rotation()), deg_to_rad(deg), 1e-9);
      EXPECT_NEAR(oracle::quat_geodesic(Vec3::Zero(), t.rotation_vector), deg_to_rad(deg), 1e-9);
      EXPECT_EQ(t.translation, Vec3::Zero());
    }
  }
}

TEST(RandomRotation, AxesAreIsotropic) {
  RandomStream rng(3);
  Vec3 sum = Vec3::Zero();
  const int n = 10000;
  for (int i = 0; i < n; ++i) sum += random_rotation(30.0, rng).rotation_vector.normalized();
  EXPECT_LT((sum / n).norm(), 0.05);
}

TEST(RandomRotation, RejectsOutOfRange) {
  RandomStream rng(4);
  EXPECT_THROW(random_rotation(-1.0, rng), InvalidArgument);
  EXPECT_THROW(random_rotation(180.5, rng), InvalidArgument);
}

TEST(AddNoise, ZeroSigmaLeavesCloudUnchanged) {
  RandomStream rng(5);
  const PointCloud c = gaussian_cloud(100, 1);
  EXPECT_EQ(add_noise(c, 0.0, rng).points, c.points);
}

TEST(AddNoise, EmpiricalStdMatchesNominal) {
  const PointCloud c = gaussian_cloud(40000, 2);
  RandomStream rng(6);
  const PointCloud noisy = add_noise(c, 0.05, rng);
  const double nominal = 0.05 * rms_radius(c);
  for (int k = 0; k < 3; ++k) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double d = noisy.points[i][k] - c.points[i][k];
      s += d;
      s2 += d * d;
    }
    const double n = static_cast<double>(c.size());
    const double sd = std::sqrt(s2 / n - (s / n) * (s / n));
    EXPECT_NEAR(sd / nominal, 1.0, 0.05) << "axis " << k;
  }
}

TEST(AddNoise, ReproducibleWithSeed) {
  const PointCloud c = gaussian_cloud(200, 3);
  RandomStream a(9), b(9);
  EXPECT_EQ(add_noise(c, 0.03, a).points, add_noise(c, 0.03, b).points);
}

TEST(AddNoise, RejectsNegativeSigma) {
  RandomStream rng(1);
  EXPECT_THROW(add_noise(gaussian_cloud(10, 1), -0.1, rng), InvalidArgument);
}

TEST(PartialOverlap, FullOverlapKeepsEverything) {
  const PointCloud c = gaussian_cloud(500, 4);
  RandomStream rng(1);
  const auto split = partial_overlap_split(c, 1.0, rng);
  EXPECT_EQ(as_set(split.first), as_set(c));
  EXPECT_EQ(as_set(split.second), as_set(c));
}

TEST(PartialOverlap, HalfOverlapIndexArithmetic) {
  const PointCloud c = gaussian_cloud(10000, 5);
  RandomStream rng(2);
  const auto split = partial_overlap_split(c, 0.5, rng);
  EXPECT_EQ(split.first.size(), 7500u);
  EXPECT_EQ(split.second.size(), 7500u);
  std::vector<std::size_t> shared;
  std::set_intersection(split.first_indices.begin(), split.first_indices.end(), split.second_indices.begin(),
                        split.second_indices.end(), std::back_inserter(shared));
  EXPECT_EQ(shared.size(), 5000u);
}

TEST(PartialOverlap, UnionIsOriginalPointSet) {
  const PointCloud c = gaussian_cloud(3001, 6);
  for (double alpha : {0.1, 0.3, 0.7, 0.95}) {
    RandomStream rng(static_cast<std::uint64_t>(alpha * 100));
    const auto split = partial_overlap_split(c, alpha, rng);
    std::set<std::size_t> all(split.first_indices.begin(), split.first_indices.end());
    all.insert(split.second_indices.begin(), split.second_indices.end());
    EXPECT_EQ(all.size(), c.size());
    auto u = as_set(split.first);
    for (const auto& p : as_set(split.second)) u.insert(p);
    EXPECT_EQ(u, as_set(c));
  }
}

TEST(PartialOverlap, RejectsBadAlpha) {
  RandomStream rng(1);
  const PointCloud c = gaussian_cloud(10, 1);
  EXPECT_THROW(partial_overlap_split(c, 0.0, rng), InvalidArgument);
  EXPECT_THROW(partial_overlap_split(c, 1.5, rng), InvalidArgument);
}

TEST(AddOutliers, ZeroFractionLeavesCloudUnchanged) {
  RandomStream rng(1);
  const PointCloud c = gaussian_cloud(50, 7);
  EXPECT_EQ(add_outliers(c, 0.0, rng).points, c.points);
}

TEST(AddOutliers, CountAndContainment) {
  RandomStream rng(2);
  const PointCloud c = gaussian_cloud(1000, 8);
  const PointCloud out = add_outliers(c, 0.2, rng);
  ASSERT_EQ(out.size(), 1200u);
  const BoundingBox box = bounding_box(c);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(out.points[i], c.points[i]);
  for (std::size_t i = c.size(); i < out.size(); ++i) {
    EXPECT_TRUE((out.points[i].array() >= box.min.array()).all());
    EXPECT_TRUE((out.points[i].array() <= box.max.array()).all());
  }
}

TEST(AddOutliers, CountRoundsUp) {
  RandomStream rng(3);
  EXPECT_EQ(add_outliers(gaussian_cloud(7, 9), 0.5, rng).size(), 7u + 4u);
  EXPECT_THROW(add_outliers(gaussian_cloud(7, 9), 1.0, rng), InvalidArgument);
}

TEST(Spec, ValidatesLevelsPerKind) {
  AugmentationSpec spec;
  EXPECT_THROW(spec.validate(), InvalidArgument);
  spec.levels = {0.0, 180.0};
  EXPECT_NO_THROW(spec.validate());
  spec.levels = {181.0};
  EXPECT_THROW(spec.validate(), InvalidArgument);
  spec.kind = AugmentationKind::noise;
  spec.levels = {0.03};
  EXPECT_NO_THROW(spec.validate());
  spec.levels = {0.2};
  EXPECT_THROW(spec.validate(), InvalidArgument);
  spec.allow_any_noise = true;
  EXPECT_NO_THROW(spec.validate());
  spec.kind = AugmentationKind::partial_overlap;
  spec.levels = {0.0};
  EXPECT_THROW(spec.validate(), InvalidArgument);
  spec.levels = {1.0};
  EXPECT_NO_THROW(spec.validate());
  spec.kind = AugmentationKind::outliers;
  EXPECT_THROW(spec.validate(), InvalidArgument);
  spec.levels = {0.0, 0.5};
  EXPECT_NO_THROW(spec.validate());
  spec.trials_per_level = 0;
  EXPECT_THROW(spec.validate(), InvalidArgument);
}

TEST(Names, RoundTrip) {
  for (auto k : {AugmentationKind::rotation_sweep, AugmentationKind::noise, AugmentationKind::partial_overlap,
                 AugmentationKind::outliers})
    EXPECT_EQ(parse_kind(to_string(k)), k);
  EXPECT_EQ(parse_method("icp"), Method::icp);
  EXPECT_EQ(parse_method("adversarial"), Method::adversarial);
  EXPECT_THROW(parse_method("cpd"), InvalidArgument);
  EXPECT_THROW(parse_kind("shear"), InvalidArgument);
}

TEST(Instance, RotationSweepTargetIsExactMotion) {
  const PointCloud base = normalize(tripod()).first;
  AugmentationSpec spec;
  spec.levels = {60.0};
  spec.translation_sigma = 0.5;
  RandomStream rng(4);
  const Instance inst = make_instance(base, spec, 60.0, rng);
  EXPECT_NEAR(rad_to_deg(inst.truth.rotation_vector.norm()), 60.0, 1e-9);
  EXPECT_GT(inst.truth.translation.norm(), 0.0);
  ASSERT_EQ(inst.target.size(), base.size());
  for (std::size_t i = 0; i < base.size(); ++i)
    EXPECT_LT((inst.target.points[i] - apply_transform(inst.truth, base.points[i])).norm(), 1e-12);
}

TEST(Instance, GaussianRotationsUseNormalVectors) {
  AugmentationSpec spec;
  spec.levels = {0.0};
  spec.gaussian_rotations = true;
  RandomStream a(5), b(5);
  const Instance inst = make_instance(normalize(tripod()).first, spec, 0.0, a);
  EXPECT_EQ(inst.truth.rotation_vector, normal_vec3(b));
}

TEST(Experiment, IdentityProblemAlwaysSucceeds) {
  AugmentationSpec spec;
  spec.levels = {0.0};
  spec.trials_per_level = 4;
  ExperimentOptions opts;
  const auto results = run_experiment(tripod(), spec, opts);
  ASSERT_EQ(results.size(), 8u);
  EXPECT_EQ(success_ratio(results, Method::icp, 0.0), 1.0);
  EXPECT_EQ(success_ratio(results, Method::adversarial, 0.0), 1.0);
}

TEST(Experiment, SuccessFlagMatchesThresholdExactly) {
  AugmentationSpec spec;
  spec.levels = {12.0, 90.0, 150.0};
  spec.trials_per_level = 5;
  const auto opts = icp_only();
  for (const auto& r : run_experiment(tripod(), spec, opts)) {
    EXPECT_EQ(r.success, r.angular_error < opts.train.success_threshold);
    EXPECT_TRUE(r.diagnostic.empty());
  }
}

TEST(Experiment, OrderingAndIndependenceOfJobs) {
  AugmentationSpec spec;
  spec.levels = {30.0, 120.0};
  spec.trials_per_level = 3;
  spec.seed = 17;
  ExperimentOptions one;
  one.train.n_epochs = 5;
  ExperimentOptions four = one;
  four.jobs = 4;
  const auto a = run_experiment(tripod(), spec, one);
  const auto b = run_experiment(tripod(), spec, four);
  ASSERT_EQ(a.size(), 12u);
  ASSERT_EQ(b.size(), a.size());
  std::size_t i = 0;
  for (std::size_t l = 0; l < 2; ++l)
    for (std::size_t t = 0; t < 3; ++t)
      for (Method m : {Method::adversarial, Method::icp}) {
        EXPECT_EQ(a[i].level, spec.levels[l]);
        EXPECT_EQ(a[i].trial_index, t);
        EXPECT_EQ(a[i].method, m);
        EXPECT_EQ(a[i].angular_error, b[i].angular_error);
        EXPECT_EQ(a[i].translation_error, b[i].translation_error);
        EXPECT_EQ(a[i].epochs_run, b[i].epochs_run);
        ++i;
      }
}

TEST(Experiment, FailingTrialIsRecordedNotThrown) {
  AugmentationSpec spec;
  spec.levels = {10.0};
  spec.trials_per_level = 2;
  ExperimentOptions opts;
  opts.methods = {Method::adversarial};
  opts.train.n_epochs = 3;
  opts.train.lambda_gp = 1e308;
  opts.train.lr_critic = Schedule::constant(1e300);
  const auto results = run_experiment(tripod(), spec, opts);
  ASSERT_EQ(results.size(), 2u);
  for (const auto& r : results) {
    EXPECT_FALSE(r.success);
    EXPECT_TRUE(std::isnan(r.angular_error));
    EXPECT_FALSE(r.diagnostic.empty());
  }
}

TEST(Experiment, RejectsEmptyMethodList) {
  AugmentationSpec spec;
  spec.levels = {10.0};
  ExperimentOptions opts;
  opts.methods.clear();
  EXPECT_THROW(run_experiment(tripod(), spec, opts), InvalidArgument);
}

TEST(Csv, HeaderAndRowFormat) {
  std::vector<TrialResult> results(2);
  results[0] = {24.0, 0, Method::adversarial, deg_to_rad(1.5), 0.25, true, 500, 1.234567};
  results[1] = {24.0, 1, Method::icp, deg_to_rad(10.0), 0.5, false, 17, 0.01};
  std::ostringstream out;
  write_csv(out, results);
  const auto rows = lines(out.str());
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], "method,level,trial,angular_error_deg,translation_error,success,epochs,wall_time_s");
  EXPECT_EQ(rows[1], "adversarial,24,0,1.5,0.25,true,500,1.234567");
  EXPECT_EQ(rows[2], "icp,24,1,10,0.5,false,17,0.010000");
  EXPECT_EQ(out.str().back(), '\n');
}

TEST(Summary, RatiosPerMethodAndLevel) {
  std::vector<TrialResult> results;
  for (int i = 0; i < 4; ++i) results.push_back({60.0, static_cast<std::size_t>(i), Method::icp, 0.0, 0.0, i < 1, 1, 0.0});
  for (int i = 0; i < 4; ++i)
    results.push_back({60.0, static_cast<std::size_t>(i), Method::adversarial, 0.0, 0.0, i < 3, 1, 0.0});
  EXPECT_DOUBLE_EQ(success_ratio(results, Method::icp, 60.0), 0.25);
  EXPECT_DOUBLE_EQ(success_ratio(results, Method::adversarial, 60.0), 0.75);
  EXPECT_THROW(success_ratio(results, Method::icp, 12.0), InvalidArgument);
  const auto table = success_ratios(results);
  ASSERT_EQ(table.size(), 2u);
  std::ostringstream out;
  write_summary(out, results);
  EXPECT_EQ(lines(out.str()).size(), 3u);
}

TEST(Summary, MedianAveragesMiddlePairForEvenCounts) {
  std::vector<TrialResult> results;
  for (double deg : {40.0, 10.0, 30.0, 20.0})
    results.push_back({0.0, results.size(), Method::adversarial, deg_to_rad(deg), 0.0, false, 1, 0.0});
  std::ostringstream out;
  write_summary(out, results);
  EXPECT_NE(lines(out.str())[1].find(" 25.000"), std::string::npos) << out.str();
  results.push_back({0.0, 4, Method::adversarial, deg_to_rad(35.0), 0.0, false, 1, 0.0});
  std::ostringstream odd;
  write_summary(odd, results);
  EXPECT_NE(lines(odd.str())[1].find(" 30.000"), std::string::npos) << odd.str();
}
