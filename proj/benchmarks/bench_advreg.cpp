#include <benchmark/benchmark.h>

#include "advreg/critic.hpp"
#include "advreg/icp.hpp"
#include "advreg/kdtree.hpp"
#include "advreg/losses.hpp"
#include "advreg/registration.hpp"
#include "advreg/shapes.hpp"

using namespace advreg;

namespace {

PointCloud sphere(std::size_t n) {
  RandomStream rng(1);
  return normalize(shapes::sphere_section(n, rng)).first;
}

}  // namespace

static void BM_CriticForward(benchmark::State& state) {
  RandomStream rng(2);
  const CriticNet net = init_critic(32, 4, rng);
  const Points batch = sample_batch(sphere(4096), static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(forward(net, batch));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CriticForward)->Arg(128)->Arg(512)->Arg(2048);

static void BM_CriticLossWithPenalty(benchmark::State& state) {
  RandomStream rng(3);
  const CriticNet net = init_critic(32, 4, rng);
  const PointCloud c = sphere(4096);
  const auto n = static_cast<std::size_t>(state.range(0));
  const Points x = sample_batch(c, n, rng), y = sample_batch(c, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(critic_loss_full(net, x, y, 10.0, rng));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CriticLossWithPenalty)->Arg(128)->Arg(512);

static void BM_GeneratorLoss(benchmark::State& state) {
  RandomStream rng(4);
  const CriticNet net = init_critic(32, 4, rng);
  const Points y = sample_batch(sphere(4096), static_cast<std::size_t>(state.range(0)), rng);
  const RigidTransform t{Vec3(0.1, 0.2, 0.3), Vec3(0.01, 0, 0)};
  for (auto _ : state) benchmark::DoNotOptimize(generator_loss(net, y, t, {}));
}
BENCHMARK(BM_GeneratorLoss)->Arg(128)->Arg(512);

// Per-epoch cost should not depend on the cloud size.
static void BM_TrainingEpochs(benchmark::State& state) {
  const PointCloud c = sphere(static_cast<std::size_t>(state.range(0)));
  TrainConfig cfg;
  cfg.n_epochs = 20;
  cfg.normalize_inputs = false;
  for (auto _ : state) benchmark::DoNotOptimize(register_adversarial(c, c, cfg));
  state.counters["epochs"] = benchmark::Counter(static_cast<double>(state.iterations() * cfg.n_epochs),
                                                benchmark::Counter::kIsRate | benchmark::Counter::kInvert);
}
BENCHMARK(BM_TrainingEpochs)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_KdTreeBuild(benchmark::State& state) {
  const PointCloud c = sphere(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    KdTree tree(c.points);
    benchmark::DoNotOptimize(tree);
  }
}
BENCHMARK(BM_KdTreeBuild)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_KdTreeNearest(benchmark::State& state) {
  const PointCloud c = sphere(static_cast<std::size_t>(state.range(0)));
  const KdTree tree(c.points);
  const PointCloud queries = sphere(1024);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tree.nearest(queries.points[i] * 1.01));
    i = (i + 1) % queries.size();
  }
}
BENCHMARK(BM_KdTreeNearest)->Arg(2000)->Arg(100000);

static void BM_Icp(benchmark::State& state) {
  const PointCloud c = sphere(static_cast<std::size_t>(state.range(0)));
  const PointCloud target = transformed(c, RigidTransform{Vec3(0.2, -0.1, 0.15), Vec3(0.05, 0, 0)});
  for (auto _ : state) benchmark::DoNotOptimize(icp_register(c, target, {}));
}
BENCHMARK(BM_Icp)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
