#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "advreg/config.hpp"
#include "advreg/error.hpp"
#include "support/temp_dir.hpp"

using namespace advreg;

TEST(KeyValues, SkipsCommentsAndTrims) {
  const auto kv = KeyValues::parse("# header\n\n  n_epochs =  20 \n\tmode=joint\r\n", "t");
  ASSERT_EQ(kv.entries().size(), 2u);
  EXPECT_EQ(kv.entries()[0].first, "n_epochs");
  EXPECT_EQ(kv.entries()[0].second, "20");
  EXPECT_EQ(kv.entries()[1].second, "joint");
}

TEST(KeyValues, RejectsLinesWithoutEquals) {
  EXPECT_THROW(KeyValues::parse("n_epochs 20\n"), InvalidArgument);
  EXPECT_THROW(KeyValues::parse(" = 3\n"), InvalidArgument);
}

TEST(KeyValues, MissingFileIsAnIoError) {
  EXPECT_THROW(KeyValues::load("/nonexistent/advreg.cfg"), IoError);
}

TEST(TrainConfigFile, AppliesEveryKey) {
  const auto cfg = parse_train_config(KeyValues::parse(
      "n_epochs = 12\nk_critic = 3\nk_generator = 2\nbatch_size = 64\nlr_critic = 0.002\n"
      "lr_generator = exponential_decay 0.05 0.9\nlambda_gp = 5\nmode = two-phase\n"
      "augment_shift_sigma = 0.25\naugment_scale_min = 0.8\naugment_scale_max = 1.5\n"
      "normalize_inputs = off\nseed = 99\nsuccess_threshold_deg = 5\ncritic_width = 16\ncritic_depth = 3\n"
      "plateau_patience = 4\nplateau_tolerance = 1e-7\n"));
  EXPECT_EQ(cfg.n_epochs, 12u);
  EXPECT_EQ(cfg.k_critic, 3u);
  EXPECT_EQ(cfg.k_generator, 2u);
  EXPECT_EQ(schedule_count(cfg.batch_size, 100), 64u);
  EXPECT_DOUBLE_EQ(schedule_value(cfg.lr_critic, 50), 0.002);
  EXPECT_DOUBLE_EQ(schedule_value(cfg.lr_generator, 2), 0.05 * 0.9 * 0.9);
  EXPECT_EQ(cfg.lambda_gp, 5.0);
  EXPECT_EQ(cfg.mode, RegistrationMode::rotation_then_translation);
  EXPECT_EQ(cfg.augment_shift_sigma, 0.25);
  EXPECT_EQ(cfg.augment_scale_min, 0.8);
  EXPECT_EQ(cfg.augment_scale_max, 1.5);
  EXPECT_FALSE(cfg.normalize_inputs);
  EXPECT_EQ(cfg.seed, 99u);
  EXPECT_NEAR(cfg.success_threshold, deg_to_rad(5.0), 1e-15);
  EXPECT_EQ(cfg.critic_width, 16u);
  EXPECT_EQ(cfg.critic_depth, 3u);
  EXPECT_EQ(cfg.plateau_patience, 4u);
  EXPECT_EQ(cfg.plateau_tolerance, 1e-7);
}

TEST(TrainConfigFile, FormatRoundTrips) {
  TrainConfig cfg;
  cfg.n_epochs = 321;
  cfg.lr_generator = parse_schedule("step_decay 0.01 0.5 100");
  cfg.batch_size = parse_schedule("step_decay 128 2 50");
  cfg.seed = 18446744073709551615ull;
  cfg.lambda_gp = 0.1;
  const std::string text = format_train_config(cfg);
  const TrainConfig back = parse_train_config(KeyValues::parse(text));
  EXPECT_EQ(format_train_config(back), text);
  EXPECT_EQ(back.seed, cfg.seed);
}

TEST(TrainConfigFile, DefaultsRoundTrip) {
  const std::string text = format_train_config(TrainConfig{});
  EXPECT_EQ(format_train_config(parse_train_config(KeyValues::parse(text))), text);
}

TEST(TrainConfigFile, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(parse_train_config(KeyValues::parse("epochs = 3\n")), InvalidArgument);
  EXPECT_THROW(parse_train_config(KeyValues::parse("n_epochs = 3x\n")), InvalidArgument);
  EXPECT_THROW(parse_train_config(KeyValues::parse("n_epochs = -3\n")), InvalidArgument);
  EXPECT_THROW(parse_train_config(KeyValues::parse("normalize_inputs = maybe\n")), InvalidArgument);
  EXPECT_THROW(parse_train_config(KeyValues::parse("lr_critic = cosine 1\n")), InvalidArgument);
  EXPECT_THROW(parse_train_config(KeyValues::parse("mode = sideways\n")), InvalidArgument);
  EXPECT_THROW(parse_train_config(KeyValues::parse("k_critic = 0\n")), InvalidArgument);
  EXPECT_THROW(parse_train_config(KeyValues::parse("augment_scale_min = 2\naugment_scale_max = 1\n")), InvalidArgument);
}

TEST(TrainConfigFile, LoadsFromDisk) {
  test::TempDir dir;
  const auto path = dir.file("train.cfg");
  std::ofstream(path) << "n_epochs = 7\nmode = rotation-only\n";
  const auto cfg = load_train_config(path);
  EXPECT_EQ(cfg.n_epochs, 7u);
  EXPECT_EQ(cfg.mode, RegistrationMode::rotation_only);
}

TEST(NumberList, ParsesCommaSeparatedValues) {
  EXPECT_EQ(parse_number_list("12, 24,60 ,120,180"), (std::vector<double>{12, 24, 60, 120, 180}));
  EXPECT_EQ(parse_number_list("0.5"), (std::vector<double>{0.5}));
  EXPECT_TRUE(parse_number_list("").empty());
  EXPECT_THROW(parse_number_list("1, two"), InvalidArgument);
}

TEST(BenchmarkSpecFile, ParsesSpecAndOverrides) {
  const auto file = parse_benchmark_spec(KeyValues::parse(
      "kind = noise\nlevels = 0.01, 0.03\ntrials_per_level = 4\nbase_rotation_deg = 24\nseed = 5\n"
      "methods = icp\njobs = 2\ntranslation_sigma = 0.5\ngaussian_rotations = no\n"
      "train.n_epochs = 40\nicp.max_iterations = 7\n"));
  EXPECT_EQ(file.spec.kind, bench::AugmentationKind::noise);
  EXPECT_EQ(file.spec.levels, (std::vector<double>{0.01, 0.03}));
  EXPECT_EQ(file.spec.trials_per_level, 4u);
  EXPECT_EQ(file.spec.base_rotation_deg, 24.0);
  EXPECT_EQ(file.spec.seed, 5u);
  EXPECT_EQ(file.spec.translation_sigma, 0.5);
  EXPECT_FALSE(file.spec.gaussian_rotations);
  ASSERT_EQ(file.options.methods.size(), 1u);
  EXPECT_EQ(file.options.methods[0], bench::Method::icp);
  EXPECT_EQ(file.options.jobs, 2u);
  EXPECT_EQ(file.options.train.n_epochs, 40u);
  EXPECT_EQ(file.options.icp.max_iterations, 7u);
}

TEST(BenchmarkSpecFile, RejectsMalformedSpecs) {
  EXPECT_THROW(parse_benchmark_spec(KeyValues::parse("levels = 10\n")), InvalidArgument);
  EXPECT_THROW(parse_benchmark_spec(KeyValues::parse("kind = rotation_sweep\n")), InvalidArgument);
  EXPECT_THROW(parse_benchmark_spec(KeyValues::parse("kind = shear\nlevels = 1\n")), InvalidArgument);
  EXPECT_THROW(parse_benchmark_spec(KeyValues::parse("kind = noise\nlevels = 0.5\n")), InvalidArgument);
  EXPECT_THROW(parse_benchmark_spec(KeyValues::parse("kind = rotation_sweep\nlevels = 10\nmethods = cpd\n")),
               InvalidArgument);
  EXPECT_THROW(parse_benchmark_spec(KeyValues::parse("kind = rotation_sweep\nlevels = 10\nmethods = ,\n")),
               InvalidArgument);
  EXPECT_THROW(parse_benchmark_spec(KeyValues::parse("kind = rotation_sweep\nlevels = 10\ntrain.bogus = 1\n")),
               InvalidArgument);
  EXPECT_THROW(parse_benchmark_spec(KeyValues::parse("kind = rotation_sweep\nlevels = 10\nicp.max_iterations = 0\n")),
               InvalidArgument);
  EXPECT_THROW(parse_benchmark_spec(KeyValues::parse("kind = rotation_sweep\nlevels = 10\nfoo = 1\n")),
               InvalidArgument);
}
