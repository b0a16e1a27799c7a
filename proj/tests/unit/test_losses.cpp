#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "advreg/error.hpp"
#include "advreg/losses.hpp"
#include "support/oracles.hpp"

using namespace advreg;

namespace {

CriticNet constant_net(double c) {
  RandomStream rng(0);
  CriticNet net = init_critic(8, 3, rng);
  for (auto& l : net.layers) {
    l.weight.setZero();
    l.bias.setZero();
  }
  net.layers.back().bias(0) = c;
  return net;
}

// f(x) = relu(x1) - relu(-x1) = x1.
CriticNet linear_x_net() {
  RandomStream rng(0);
  CriticNet net = init_critic(2, 2, rng);
  net.layers[0].weight.setZero();
  net.layers[0].weight(0, 0) = 1.0;
  net.layers[0].weight(0, 1) = -1.0;
  net.layers[0].bias.setZero();
  net.layers[1].weight(0, 0) = 1.0;
  net.layers[1].weight(1, 0) = -1.0;
  net.layers[1].bias.setZero();
  return net;
}

Points random_points(RandomStream& rng, Eigen::Index n, double scale = 1.0) {
  Points p(3, n);
  for (Eigen::Index j = 0; j < n; ++j) p.col(j) = scale * Vec3(rng.normal(), rng.normal(), rng.normal());
  return p;
}

CriticNet with_params(const CriticNet& net, const Eigen::VectorXd& flat) {
  CriticNet out = net;
  out.set_parameters(flat);
  return out;
}

double naive_mean(const CriticNet& net, const Points& b) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < b.cols(); ++j) s += oracle::naive_forward(net, b.col(j));
  return s / b.cols();
}

}  // namespace

TEST(CriticLoss, ConstantCriticIsZero) {
  RandomStream rng(1);
  EXPECT_EQ(critic_loss(constant_net(2.5), random_points(rng, 5), random_points(rng, 9)), 0.0);
}

TEST(CriticLoss, IdenticalBatchesAreZero) {
  RandomStream rng(2);
  const CriticNet net = oracle::random_net(32, 4, rng);
  const Points b = random_points(rng, 16);
  EXPECT_EQ(critic_loss(net, b, b), 0.0);
}

TEST(CriticLoss, MatchesNaiveOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomStream rng(seed);
    const CriticNet net = oracle::random_net(32, 4, rng);
    const Points t = random_points(rng, 12), s = random_points(rng, 7);
    EXPECT_NEAR(critic_loss(net, t, s), -(naive_mean(net, t) - naive_mean(net, s)), 1e-12);
  }
}

TEST(CriticLoss, EmptyBatchThrows) {
  RandomStream rng(3);
  const CriticNet net = oracle::random_net(8, 3, rng);
  EXPECT_THROW(critic_loss(net, Points(3, 0), random_points(rng, 3)), InvalidArgument);
  EXPECT_THROW(critic_loss(net, random_points(rng, 3), Points(3, 0)), InvalidArgument);
}

TEST(CriticLoss, AntisymmetricInBatches) {
  RandomStream rng(4);
  const CriticNet net = oracle::random_net(32, 4, rng);
  const Points t = random_points(rng, 10), s = random_points(rng, 10);
  EXPECT_EQ(critic_loss(net, t, s), -critic_loss(net, s, t));
}

TEST(CriticLoss, PermutationInvariant) {
  RandomStream rng(5);
  const CriticNet net = oracle::random_net(32, 4, rng);
  const Points t = random_points(rng, 10), s = random_points(rng, 8);
  Points t_rev = t.rowwise().reverse();
  EXPECT_NEAR(critic_loss(net, t, s), critic_loss(net, t_rev, s), 1e-12);
}

TEST(MakeInterpolates, AlphaOneGivesTargetAlphaZeroGivesSource) {
  RandomStream rng(6);
  const Points t = random_points(rng, 4), s = random_points(rng, 6);
  const std::vector<double> ones(4, 1.0), zeros(4, 0.0);
  const auto a = make_interpolates(t, s, ones);
  const auto b = make_interpolates(t, s, zeros);
  ASSERT_EQ(a.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(a[i].point, Vec3(t.col(static_cast<Eigen::Index>(i))));
    EXPECT_EQ(b[i].point, Vec3(s.col(static_cast<Eigen::Index>(i))));
  }
}

TEST(MakeInterpolates, TruncatesToShorterBatch) {
  RandomStream rng(7);
  const Points t = random_points(rng, 9), s = random_points(rng, 5);
  EXPECT_EQ(make_interpolates(t, s, rng).size(), 5u);
  EXPECT_EQ(make_interpolates(s, t, rng).size(), 5u);
}

TEST(MakeInterpolates, PointsAreConvexMixtures) {
  RandomStream rng(8);
  const Points t = random_points(rng, 20), s = random_points(rng, 20);
  const auto inter = make_interpolates(t, s, rng);
  for (std::size_t i = 0; i < inter.size(); ++i) {
    const auto j = static_cast<Eigen::Index>(i);
    EXPECT_GE(inter[i].alpha, 0.0);
    EXPECT_LE(inter[i].alpha, 1.0);
    EXPECT_LT((inter[i].point - (inter[i].alpha * t.col(j) + (1 - inter[i].alpha) * s.col(j))).norm(), 1e-15);
  }
}

TEST(MakeInterpolates, DeterministicGivenStream) {
  RandomStream rng(9);
  const Points t = random_points(rng, 8), s = random_points(rng, 8);
  RandomStream a(3), b(3);
  const auto x = make_interpolates(t, s, a), y = make_interpolates(t, s, b);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(x[i].alpha, y[i].alpha);
}

TEST(MakeInterpolates, AlphaMeanIsOneHalf) {
  RandomStream rng(10);
  const Points t = random_points(rng, 10000), s = random_points(rng, 10000);
  const auto inter = make_interpolates(t, s, rng);
  double mean = 0.0;
  for (const auto& i : inter) mean += i.alpha;
  mean /= inter.size();
  const double sigma = std::sqrt(1.0 / 12.0 / inter.size());
  EXPECT_LT(std::abs(mean - 0.5), 4 * sigma);
}

TEST(MakeInterpolates, RejectsAlphaOutsideUnitInterval) {
  RandomStream rng(11);
  const Points t = random_points(rng, 2), s = random_points(rng, 2);
  const std::vector<double> bad{0.5, 1.5};
  EXPECT_THROW(make_interpolates(t, s, bad), InvalidArgument);
}

TEST(GradientPenalty, ZeroCriticIsOne) {
  RandomStream rng(12);
  const auto inter = make_interpolates(random_points(rng, 6), random_points(rng, 6), rng);
  EXPECT_EQ(gradient_penalty(constant_net(0.0), inter), 1.0);
}

TEST(GradientPenalty, UnitGradientCriticIsZero) {
  RandomStream rng(13);
  const auto inter = make_interpolates(random_points(rng, 6), random_points(rng, 6), rng);
  EXPECT_EQ(gradient_penalty(linear_x_net(), inter), 0.0);
}

TEST(GradientPenalty, MatchesPerPointOracle) {
  RandomStream rng(14);
  const CriticNet net = oracle::random_net(32, 4, rng);
  const auto inter = make_interpolates(random_points(rng, 11), random_points(rng, 11), rng);
  double expected = 0.0;
  for (const auto& i : inter) {
    const Eigen::VectorXd g = oracle::fd_gradient([&](const Eigen::VectorXd& x) { return forward(net, Vec3(x)); },
                                                  i.point, 1e-6);
    expected += (g.norm() - 1.0) * (g.norm() - 1.0);
  }
  expected /= inter.size();
  EXPECT_NEAR(gradient_penalty(net, inter), expected, 1e-6);
  double exact = 0.0;
  for (const auto& i : inter) {
    const double n = grad_input(net, i.point).norm();
    exact += (n - 1.0) * (n - 1.0);
  }
  EXPECT_NEAR(gradient_penalty(net, inter), exact / inter.size(), 1e-12);
}

TEST(CriticLossFull, LambdaZeroEqualsCriticLoss) {
  RandomStream rng(15);
  const CriticNet net = oracle::random_net(32, 4, rng);
  const Points t = random_points(rng, 10), s = random_points(rng, 10);
  EXPECT_EQ(critic_loss_full(net, t, s, 0.0, rng).value, critic_loss(net, t, s));
}

TEST(CriticLossFull, ZeroNetWithLambdaTen) {
  RandomStream rng(16);
  EXPECT_EQ(critic_loss_full(constant_net(0.0), random_points(rng, 5), random_points(rng, 5), 10.0, rng).value, 10.0);
}

TEST(CriticLossFull, TermsAddUp) {
  RandomStream rng(17);
  const CriticNet net = oracle::random_net(32, 4, rng);
  const Points t = random_points(rng, 10), s = random_points(rng, 10);
  const auto inter = make_interpolates(t, s, rng);
  const auto e = critic_loss_full(net, t, s, 7.0, inter);
  EXPECT_NEAR(e.value, e.wasserstein_term + 7.0 * e.penalty_term, 1e-12);
  EXPECT_NEAR(e.penalty_term, gradient_penalty(net, inter), 1e-12);
}

TEST(CriticLossFull, NegativeLambdaThrows) {
  RandomStream rng(18);
  const CriticNet net = oracle::random_net(8, 3, rng);
  EXPECT_THROW(critic_loss_full(net, random_points(rng, 3), random_points(rng, 3), -1.0, rng), InvalidArgument);
}

TEST(CriticLossFull, MatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RandomStream rng(seed + 1000);
    const CriticNet net = oracle::random_net(8, seed % 2 ? 4 : 3, rng);
    const Points t = oracle::points_away_from_kinks(net, 5, 1e-3, rng);
    const Points s = oracle::points_away_from_kinks(net, 4, 1e-3, rng);
    std::vector<double> alphas;
    std::vector<Interpolate> inter;
    while (inter.size() < 4) {
      const double a = rng.uniform();
      const Vec3 p = a * t.col(static_cast<Eigen::Index>(inter.size())) + (1 - a) * s.col(static_cast<Eigen::Index>(inter.size()));
      if (oracle::relu_margin(net, p) > 1e-3) inter.push_back({p, a});
    }
    auto f = [&](const Eigen::VectorXd& theta) { return critic_loss_full(with_params(net, theta), t, s, 10.0, inter).value; };
    const Eigen::VectorXd numeric = oracle::fd_gradient(f, net.parameters(), 1e-5);
    const auto e = critic_loss_full(net, t, s, 10.0, inter);
    EXPECT_LT(oracle::max_rel_error(e.gradients.flatten(), numeric), 1e-4) << "seed " << seed;
  }
}

TEST(GeneratorLoss, ConstantCritic) {
  RandomStream rng(19);
  const auto e = generator_loss(constant_net(1.75), random_points(rng, 8), RigidTransform{Vec3(0.3, 0.1, -0.2), Vec3(1, 2, 3)});
  EXPECT_EQ(e.value, -1.75);
  EXPECT_TRUE(e.gradient.isZero(0.0));
}

TEST(GeneratorLoss, LinearCriticHandTrace) {
  RandomStream rng(20);
  const Points b = random_points(rng, 9);
  const auto e = generator_loss(linear_x_net(), b, RigidTransform::identity());
  EXPECT_NEAR(e.value, -b.row(0).mean(), 1e-15);
  EXPECT_EQ(Vec3(e.gradient.tail<3>()), Vec3(-1, 0, 0));
}

TEST(GeneratorLoss, TranslationGradientIsMinusMeanInputGradient) {
  RandomStream rng(21);
  const CriticNet net = oracle::random_net(32, 4, rng);
  const Points b = random_points(rng, 13);
  const RigidTransform t{Vec3(0.7, -1.1, 0.4), Vec3(0.2, 0.0, -0.5)};
  const auto e = generator_loss(net, b, t);
  Vec3 mean = Vec3::Zero();
  for (Eigen::Index j = 0; j < b.cols(); ++j) mean += grad_input(net, apply_transform(t, Vec3(b.col(j))));
  mean /= b.cols();
  EXPECT_LT((Vec3(e.gradient.tail<3>()) + mean).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(GeneratorLoss, MatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RandomStream rng(seed + 2000);
    const CriticNet net = oracle::random_net(32, 4, rng);
    const Points b = random_points(rng, 8);
    const RigidTransform t{Vec3(rng.normal(), rng.normal(), rng.normal()), Vec3(rng.normal(), rng.normal(), rng.normal())};
    const BatchAugment aug = seed % 2 ? BatchAugment{} : BatchAugment{rng.uniform(0.5, 2.0), Vec3(rng.normal(), 0.3, -0.2)};
    auto f = [&](const Eigen::VectorXd& x) { return generator_loss(net, b, RigidTransform::from_params(x), aug).value; };
    const Eigen::VectorXd numeric = oracle::fd_gradient(f, t.params(), 1e-6);
    EXPECT_LT(oracle::max_rel_error(generator_loss(net, b, t, aug).gradient, numeric), 1e-5) << "seed " << seed;
  }
}

TEST(TransformBatch, AppliesTransformThenAugment) {
  RandomStream rng(22);
  const Points b = random_points(rng, 5);
  const RigidTransform t{Vec3(0.1, 0.2, 0.3), Vec3(1, 0, 0)};
  const BatchAugment aug{2.0, Vec3(0, 1, 0)};
  const Points out = transform_batch(b, t, aug);
  for (Eigen::Index j = 0; j < b.cols(); ++j)
    EXPECT_LT((Vec3(out.col(j)) - (2.0 * apply_transform(t, Vec3(b.col(j))) + Vec3(0, 1, 0))).norm(), 1e-15);
}
