// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsgan Authors

#include <gmock/gmock.h>
#include <gtest/gtest.h>
#include <zlib.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "tsgan/checkpoint.hpp"
#include "tsgan/config.hpp"
#include "tsgan/errors.hpp"
#include "tsgan/run.hpp"
#include "tsgan/tune.hpp"

namespace tsgan {
namespace {

namespace fs = std::filesystem;
using ::testing::ElementsAre;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("tsgan_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string serialize_checkpoint(const Checkpoint& c) {
  std::ostringstream out;
  write_checkpoint(c, out);
  return out.str();
}

Checkpoint parse_checkpoint(const std::string& bytes) {
  std::istringstream in(bytes);
  return read_checkpoint(in);
}

class ScopedEnv {
 public:
  ScopedEnv(const char* name, const char* value) : name_(name) {
    if (const char* old = std::getenv(name)) old_ = old;
    if (value) {
      setenv(name, value, 1);
    } else {
      unsetenv(name);
    }
  }
  ~ScopedEnv() {
    if (old_) {
      setenv(name_, old_->c_str(), 1);
    } else {
      unsetenv(name_);
    }
  }

 private:
  const char* name_;
  std::optional<std::string> old_;
};

// --- RunConfig -------------------------------------------------------------

TEST(RunConfigTest, DefaultsRoundTrip) {
  const RunConfig defaults;
  const RunConfig parsed = RunConfig::parse_text(defaults.serialize());
  EXPECT_EQ(parsed.serialize(), defaults.serialize());
  EXPECT_EQ(parsed.hash(), defaults.hash());
  // Defaults are already in canonical form.
  for (const auto& spec : config_schema()) {
    RunConfig c;
    c.set(spec.name, std::string(spec.default_value));
    EXPECT_EQ(c.get(spec.name), spec.default_value) << spec.name;
  }
}

TEST(RunConfigTest, RandomValidConfigsRoundTrip) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    RunConfig config;
    for (const auto& spec : config_schema()) {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      switch (spec.kind) {
        case ValueKind::Integer: {
          const double hi = std::min(spec.max, spec.min + 1000.0);
          config.set(spec.name, std::to_string(static_cast<std::int64_t>(spec.min + u(rng) * (hi - spec.min))));
          break;
        }
        case ValueKind::Real: {
          const double hi = std::isfinite(spec.max) ? spec.max : spec.min + 100.0;
          double v = spec.min + u(rng) * (hi - spec.min);
          if (spec.exclusive_min && v == spec.min) v = (spec.min + hi) / 2;
          if (spec.exclusive_max && v == hi) v = (spec.min + hi) / 2;
          config.set(spec.name, format_real(v));
          break;
        }
        case ValueKind::Choice:
          config.set(spec.name, spec.choices[trial % spec.choices.size()]);
          break;
        case ValueKind::Path:
          config.set(spec.name, trial % 2 ? "" : "/tmp/some dir/file_" + std::to_string(trial) + ".csv");
          break;
      }
    }
    const std::string text = config.serialize();
    EXPECT_EQ(RunConfig::parse_text(text).serialize(), text);
  }
}

TEST(RunConfigTest, CommentsBlankLinesAndCanonicalValues) {
  const RunConfig c = RunConfig::parse_text(
      "# header\n\n  gan.generator_lr = 1e-4   # trailing\n"
      "forecast.cell=gru\nseed = 0042\n");
  EXPECT_EQ(c.get("gan.generator_lr"), "0.0001");
  EXPECT_EQ(c.get("forecast.cell"), "gru");
  EXPECT_EQ(c.get("seed"), "42");
  EXPECT_TRUE(c.is_set("seed"));
  EXPECT_FALSE(c.is_set("gan.steps"));
  EXPECT_EQ(c.get_int("gan.steps"), 2000);
}

TEST(RunConfigTest, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(RunConfig::parse_text("gan.layers = 3\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse_text("gan.generator_layers = 5\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse_text("gan.generator_layers = 0\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse_text("gan.generator_hidden = 31\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse_text("gan.critic_hidden = 513\n"), ConfigError);
  EXPECT_NO_THROW(RunConfig::parse_text("gan.generator_hidden = 512\ngan.critic_layers = 4\n"));
  EXPECT_THROW(RunConfig::parse_text("gan.steps = 2.5\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse_text("gan.lambda_gp = nan\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse_text("data.alpha = 1\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse_text("forecast.cell = rnn\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse_text("seed = -1\n"), ConfigError);
}

TEST(RunConfigTest, MalformedLinesCarryLineNumbers) {
  try {
    RunConfig::parse_text("seed = 1\n\njust words\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(RunConfig::parse_text("seed = 1\nseed = 2\n"), ParseError);
}

TEST(RunConfigTest, ModuleConfigsFollowKeys) {
  RunConfig c;
  c.set("seed", "9");
  c.set("gan.generator_layers", "1");
  c.set("gan.generator_hidden", "64");
  c.set("gan.critic_lr", "0.0002");
  c.set("forecast.cell", "gru");
  c.set("forecast.hidden", "16");
  const GanTrainConfig g = c.gan_config();
  EXPECT_EQ(g.seed, 9u);
  EXPECT_EQ(g.generator_layers, 1u);
  EXPECT_EQ(g.generator_hidden, 64u);
  EXPECT_EQ(g.critic_adam.learning_rate, 0.0002);
  EXPECT_EQ(g.generator_adam.learning_rate, 1e-4);
  EXPECT_EQ(g.generator_adam.beta1, 0.0);
  const ForecastConfig f = c.forecast_config();
  EXPECT_EQ(f.cell, CellKind::Gru);
  EXPECT_EQ(f.hidden, 16u);
  EXPECT_EQ(f.adam.learning_rate, 1e-3);
  EXPECT_EQ(c.catchment_config().length, 100000u);
}

TEST(RunConfigTest, SeedFallsBackToEnvironment) {
  RunConfig c;
  {
    ScopedEnv env("TSGAN_SEED", "77");
    EXPECT_EQ(resolve_seed(c), 77u);
    c.set("seed", "5");
    EXPECT_EQ(resolve_seed(c), 5u);
  }
  {
    ScopedEnv env("TSGAN_SEED", "seven");
    EXPECT_THROW(resolve_seed(RunConfig{}), ConfigError);
  }
  {
    ScopedEnv env("TSGAN_SEED", nullptr);
    EXPECT_EQ(resolve_seed(RunConfig{}), 0u);
  }
}

// --- Checkpoint format -----------------------------------------------------

Checkpoint sample_checkpoint() {
  Checkpoint c;
  Rng rng(3);
  c.tensors.push_back({"a.weight", normal_tensor({3, 4}, rng)});
  c.tensors.push_back({"scalar", Tensor::scalar(-0.0)});
  c.tensors.push_back({"empty", Tensor::zeros({0, 5})});
  c.tensors.push_back({"tiny", Tensor::vector({5e-324, 1.7976931348623157e308, 0.1})});
  c.config.set("seed", "12");
  c.meta["kind"] = "test";
  c.meta["note"] = "spaces are fine";
  return c;
}

TEST(CheckpointTest, RoundTripIsBitExact) {
  const Checkpoint c = sample_checkpoint();
  const Checkpoint back = parse_checkpoint(serialize_checkpoint(c));
  ASSERT_EQ(back.tensors.size(), c.tensors.size());
  for (std::size_t i = 0; i < c.tensors.size(); ++i) {
    EXPECT_EQ(back.tensors[i].name, c.tensors[i].name);
    EXPECT_EQ(back.tensors[i].tensor.shape(), c.tensors[i].tensor.shape());
    EXPECT_TRUE(back.tensors[i].tensor.bitwise_equal(c.tensors[i].tensor)) << c.tensors[i].name;
  }
  EXPECT_EQ(back.config, c.config);
  EXPECT_EQ(back.meta, c.meta);
  EXPECT_EQ(serialize_checkpoint(back), serialize_checkpoint(c));
}

TEST(CheckpointTest, BinaryLayout) {
  Checkpoint c;
  c.tensors.push_back({"w", Tensor::vector({1.0, -2.0})});
  const std::string bytes = serialize_checkpoint(c);
  const std::string snapshot = c.snapshot();
  const auto u8 = [&](std::size_t i) { return static_cast<unsigned char>(bytes[i]); };
  EXPECT_EQ(bytes.substr(0, 4), "SGN1");
  EXPECT_EQ(u8(4), 1);  // version, little-endian
  EXPECT_EQ(u8(5) | u8(6) | u8(7), 0);
  EXPECT_EQ(u8(8), 1);  // tensor count
  EXPECT_EQ(u8(12), 1);  // name length (u16)
  EXPECT_EQ(u8(13), 0);
  EXPECT_EQ(bytes[14], 'w');
  EXPECT_EQ(u8(15), 1);  // rank
  EXPECT_EQ(u8(16), 2);  // dim 0 (u64)
  // 1.0 = 0x3ff0000000000000, little-endian.
  EXPECT_EQ(u8(24 + 7), 0x3f);
  EXPECT_EQ(u8(24 + 6), 0xf0);
  EXPECT_EQ(u8(32 + 7), 0xc0);  // -2.0 = 0xc000000000000000
  const std::size_t snap_at = 40;
  EXPECT_EQ(static_cast<std::size_t>(u8(snap_at) | (u8(snap_at + 1) << 8) | (u8(snap_at + 2) << 16)),
            snapshot.size());
  EXPECT_EQ(bytes.substr(snap_at + 4, snapshot.size()), snapshot);
  ASSERT_EQ(bytes.size(), snap_at + 4 + snapshot.size() + 4);
  const auto body = bytes.size() - 4;
  const auto crc = crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(body));
  EXPECT_EQ(static_cast<unsigned long>(u8(body) | (u8(body + 1) << 8) | (u8(body + 2) << 16) |
                                       (static_cast<unsigned long>(u8(body + 3)) << 24)),
            crc);
}

TEST(CheckpointTest, EmptyTableIsValid) {
  const Checkpoint back = parse_checkpoint(serialize_checkpoint(Checkpoint{}));
  EXPECT_TRUE(back.tensors.empty());
  EXPECT_EQ(back.config, RunConfig{});
  restore_tensors(back, {});
}

TEST(CheckpointTest, FlippedByteIsDetected) {
  const std::string good = serialize_checkpoint(sample_checkpoint());
  for (std::size_t pos : {std::size_t{20}, good.size() / 2, good.size() - 10, good.size() - 1}) {
    std::string bad = good;
    bad[pos] = static_cast<char>(bad[pos] ^ 0x01);
    EXPECT_THROW(parse_checkpoint(bad), CorruptionError) << "byte " << pos;
  }
}

TEST(CheckpointTest, EveryTruncationIsCorruption) {
  const std::string good = serialize_checkpoint(sample_checkpoint());
  for (std::size_t len = 0; len < good.size(); len += 7) {
    EXPECT_THROW(parse_checkpoint(good.substr(0, len)), CorruptionError) << "length " << len;
  }
  EXPECT_THROW(parse_checkpoint(good.substr(0, good.size() - 1)), CorruptionError);
}

TEST(CheckpointTest, MagicAndVersionMismatchAreFormatErrors) {
  std::string bytes = serialize_checkpoint(sample_checkpoint());
  std::string magic = bytes;
  magic[3] = '2';
  EXPECT_THROW(parse_checkpoint(magic), FormatError);
  std::string version = bytes;
  version[4] = 2;
  EXPECT_THROW(parse_checkpoint(version), FormatError);
}

TEST(CheckpointTest, RestoreChecksNamesAndShapes) {
  const Checkpoint c = sample_checkpoint();
  Tensor target = Tensor::zeros({3, 4});
  restore_tensors(c, {{"a.weight", target}});
  EXPECT_TRUE(target.bitwise_equal(c.tensor("a.weight")));
  EXPECT_THROW(restore_tensors(c, {{"a.weight", Tensor::zeros({4, 3})}}), FormatError);
  EXPECT_THROW(restore_tensors(c, {{"missing", Tensor::zeros({1})}}), FormatError);
}

TEST(CheckpointTest, PreprocStatsRoundTrip) {
  PreprocStats stats;
  stats.channels = {{"precipitation_mm", false, 0.123456789012345678, 0.3},
                    {"flow", true, 1.0 / 3.0, 2.0e-17}};
  Checkpoint c;
  store_preproc_stats(stats, c);
  const PreprocStats back = load_preproc_stats(parse_checkpoint(serialize_checkpoint(c)));
  EXPECT_EQ(back.checksum(), stats.checksum());
  EXPECT_TRUE(back.find("flow").log_transform);
}

// --- Model checkpoints ------------------------------------------------------

WindowBatch wet_windows(std::uint64_t seed) {
  CatchmentConfig cc;
  cc.length = 600;
  cc.storm_start_probability = 0.03;
  return filter_flat_windows(make_windows(preprocess(synth_catchment(cc, seed), model_channels()).data));
}

RunConfig tiny_gan_config() {
  RunConfig c;
  c.set("seed", "4");
  c.set("gan.generator_layers", "1");
  c.set("gan.generator_hidden", "32");
  c.set("gan.critic_layers", "1");
  c.set("gan.critic_hidden", "32");
  c.set("gan.batch_size", "8");
  c.set("gan.critic_iters", "2");
  c.set("gan.eval_every", "0");
  return c;
}

TEST(ModelCheckpointTest, GanResumeIsBitExact) {
  const WindowBatch data = wet_windows(2);
  const RunConfig config = tiny_gan_config();
  const PreprocStats stats{{{"flow", true, 1.0, 2.0}}};

  GanTrainer straight(config.gan_config(), data);
  straight.train(4);

  GanTrainer first(config.gan_config(), data);
  first.train(2);
  const std::string bytes = serialize_checkpoint(make_gan_checkpoint(first, stats, config));
  const Checkpoint ckpt = parse_checkpoint(bytes);
  GanTrainer resumed(ckpt.config.gan_config(), data);
  restore_gan_trainer(ckpt, resumed);
  resumed.train(2);

  std::vector<NamedTensor> a, b;
  straight.model().generator.append_named("g", a);
  straight.model().critic.append_named("d", a);
  resumed.model().generator.append_named("g", b);
  resumed.model().critic.append_named("d", b);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(a[i].tensor.bitwise_equal(b[i].tensor)) << a[i].name;
  EXPECT_EQ(resumed.model().generator_steps, 4u);
  EXPECT_EQ(resumed.model().critic_steps, straight.model().critic_steps);
  EXPECT_EQ(load_preproc_stats(ckpt).checksum(), stats.checksum());
  EXPECT_THROW(load_forecast_model(ckpt), FormatError);
}

TEST(ModelCheckpointTest, ForecasterRoundTripPredictsIdentically) {
  RunConfig config;
  config.set("forecast.cell", "gru");
  config.set("forecast.hidden", "6");
  config.set("forecast.layers", "2");
  Rng rng(1);
  const ForecastModel model = make_forecast_model(config.forecast_config(), rng);
  const Checkpoint ckpt = parse_checkpoint(serialize_checkpoint(make_forecast_checkpoint(model, {}, config)));
  const ForecastModel back = load_forecast_model(ckpt);
  EXPECT_EQ(back.cell, CellKind::Gru);
  const Tensor rain = channel_tensor(wet_windows(3), kPrecipitation);
  EXPECT_TRUE(predict(model, rain).bitwise_equal(predict(back, rain)));
  EXPECT_THROW(load_gan_model(ckpt), FormatError);
}

// --- Tuner -----------------------------------------------------------------

TEST(TunerTest, NineTrialsTwoRungsPlan) {
  const HalvingPlan plan = plan_successive_halving(9, 2, 150);
  EXPECT_THAT(plan.entrants, ElementsAre(9u, 3u));
  EXPECT_EQ(plan.final_survivors(), 1u);
  EXPECT_EQ(plan.base_steps, 10u);  // 9 * 10 + 3 * (30 - 10) = 150
  EXPECT_THAT(plan.steps, ElementsAre(10u, 30u));
  EXPECT_EQ(plan.total_steps, 150u);
  EXPECT_EQ(plan_successive_halving(9, 2, 164).base_steps, 10u);
  EXPECT_THROW(plan_successive_halving(9, 2, 14), ConfigError);
  EXPECT_NO_THROW(plan_successive_halving(9, 2, 15));
  EXPECT_THROW(plan_successive_halving(0, 2, 100), ConfigError);
}

TEST(TunerTest, KeepsBestThirdEachRung) {
  const HalvingPlan plan = plan_successive_halving(9, 2, 15);
  const std::vector<double> quality = {0.5, 0.2, 0.9, 0.1, 0.7, 0.3, 0.8, 0.6, 0.4};
  std::vector<std::pair<std::size_t, std::size_t>> calls;
  std::vector<std::size_t> pruned;
  const TuneReport report = successive_halving(
      plan,
      [&](std::size_t i, std::size_t steps) {
        calls.emplace_back(i, steps);
        return quality[i] / static_cast<double>(steps);
      },
      {}, [&](std::size_t i) { pruned.push_back(i); });
  ASSERT_EQ(report.rungs.size(), 2u);
  EXPECT_THAT(report.rungs[0].survivors, ElementsAre(3u, 1u, 5u));
  EXPECT_THAT(report.rungs[1].entrants, ElementsAre(1u, 3u, 5u));
  EXPECT_THAT(report.rungs[1].survivors, ElementsAre(3u));
  EXPECT_EQ(calls.size(), 12u);
  EXPECT_EQ(calls[9], (std::pair<std::size_t, std::size_t>{1, 3}));
  EXPECT_EQ(pruned.size(), 8u);
  EXPECT_EQ(report.best().index, 3u);
  EXPECT_EQ(report.ranking[1].index, 1u);
  EXPECT_EQ(report.ranking[2].index, 5u);
  EXPECT_EQ(report.ranking.back().index, 2u);
}

TEST(TunerTest, TiesBreakByTrialIndex) {
  const HalvingPlan plan = plan_successive_halving(9, 2, 15);
  const TuneReport report = successive_halving(plan, [](std::size_t, std::size_t) { return 0.25; });
  EXPECT_THAT(report.rungs[0].survivors, ElementsAre(0u, 1u, 2u));
  EXPECT_THAT(report.rungs[1].survivors, ElementsAre(0u));
  for (std::size_t k = 0; k < report.ranking.size(); ++k) EXPECT_EQ(report.ranking[k].index, k);
}

TEST(TunerTest, NonFiniteScoresRankLast) {
  const HalvingPlan plan = plan_successive_halving(3, 1, 3);
  const TuneReport report = successive_halving(
      plan, [](std::size_t i, std::size_t) { return i == 0 ? std::nan("") : 1.0 * static_cast<double>(i); });
  EXPECT_THAT(report.rungs[0].survivors, ElementsAre(1u));
  EXPECT_EQ(report.ranking.back().index, 0u);
}

TEST(TunerTest, SearchSpaceSamplesStayInBounds) {
  GanTrainConfig base;
  base.seed = 100;
  const auto a = sample_search_space(base, 40);
  const auto b = sample_search_space(base, 40);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].seed, 100u ^ i);
    EXPECT_EQ(a[i].generator_hidden, b[i].generator_hidden);
    EXPECT_GE(a[i].generator_layers, 1u);
    EXPECT_LE(a[i].generator_layers, 4u);
    EXPECT_GE(a[i].critic_hidden, 32u);
    EXPECT_LE(a[i].critic_hidden, 512u);
    EXPECT_NO_THROW(a[i].validate());
  }
  EXPECT_THROW(sample_search_space(base, 1, {5, 512}), ConfigError);
}

TEST(TunerTest, IdenticalTrialsTieAndKeepLowestIndex) {
  GanTrainConfig c = tiny_gan_config().gan_config();
  c.eval_samples = 64;
  const std::vector<GanTrainConfig> trials(9, c);
  const TuneReport report = tune_gan(trials, wet_windows(5), 2, 15);
  ASSERT_EQ(report.rungs.size(), 2u);
  for (const double s : report.rungs[0].scores) EXPECT_EQ(s, report.rungs[0].scores[0]);
  EXPECT_THAT(report.rungs[0].survivors, ElementsAre(0u, 1u, 2u));
  EXPECT_THAT(report.rungs[1].survivors, ElementsAre(0u));
  EXPECT_EQ(report.rungs[1].steps, 3u);
}

// --- Manifests and subcommands ---------------------------------------------

TEST(ManifestTest, TextRoundTripAndLoadsAsConfig) {
  Manifest m;
  m.command = "train-gan";
  m.config.set("seed", "3");
  m.artifacts = {{"gan.ckpt", 0xdeadbeef, 1234}, {"gan_log.csv", 7, 8}};
  const std::string text = m.to_text();
  const Manifest back = Manifest::parse_text(text);
  EXPECT_EQ(back.command, "train-gan");
  EXPECT_EQ(back.artifacts, m.artifacts);
  EXPECT_EQ(back.config, m.config);
  EXPECT_EQ(RunConfig::parse_text(text), m.config);
  EXPECT_NE(text.find("# config_hash = " + m.config.hash()), std::string::npos);
}

RunConfig tiny_pipeline_config() {
  RunConfig c = tiny_gan_config();
  c.set("data.length", "700");
  c.set("data.storm_start_probability", "0.03");
  c.set("split.train_windows", "400");
  c.set("split.test_windows", "200");
  c.set("gan.steps", "3");
  c.set("gan.checkpoint_every", "2");
  c.set("forecast.hidden", "4");
  c.set("forecast.layers", "1");
  c.set("forecast.max_epochs", "2");
  c.set("forecast.added_windows", "30");
  c.set("generate.count", "10");
  return c;
}

TEST(CommandTest, SynthDataIsByteIdentical) {
  const fs::path dir = scratch_dir("synth");
  RunConfig c;
  c.set("seed", "1");
  c.set("data.length", "500");
  const auto a = run_synth_data(c, dir / "a");
  const auto b = run_synth_data(c, dir / "b");
  EXPECT_EQ(a.manifest.artifacts, b.manifest.artifacts);
  EXPECT_EQ(file_crc32(dir / "a/series.csv"), file_crc32(dir / "b/series.csv"));
  EXPECT_EQ(load_csv(dir / "a/series.csv").length(), 500u);
  EXPECT_TRUE(fs::exists(manifest_path(dir / "a", "synth-data")));
}

TEST(CommandTest, PipelineEndToEnd) {
  const fs::path dir = scratch_dir("pipeline");
  RunConfig c = tiny_pipeline_config();

  const auto pre = run_command("preprocess", c, dir / "pre");
  std::ifstream test_csv(dir / "pre/test_windows.csv");
  EXPECT_EQ(read_windows_csv(test_csv).count(), 200u);
  EXPECT_THAT(pre.summary, ::testing::HasSubstr("400 train windows"));

  const auto gan = run_command("train-gan", c, dir / "gan");
  ASSERT_EQ(gan.manifest.artifacts.size(), 3u);  // step-2 checkpoint, final checkpoint, log
  EXPECT_EQ(gan.manifest.artifacts[0].name, "gan-step2.ckpt");
  EXPECT_EQ(load_gan_model(load_checkpoint(dir / "gan/gan.ckpt")).generator_steps, 3u);

  c.set("path.gan_checkpoint", (dir / "gan/gan.ckpt").string());
  run_command("generate", c, dir / "gen");
  std::ifstream generated(dir / "gen/generated.csv");
  const WindowBatch windows = read_windows_csv(generated);
  EXPECT_EQ(windows.count(), 10u);
  EXPECT_EQ(windows.count_of(Provenance::Synthetic), 10u);

  c.set("forecast.augment", "gan");
  run_command("train-forecaster", c, dir / "f_gan");
  c.set("forecast.augment", "none");
  run_command("train-forecaster", c, dir / "f_plain");
  c.set("path.forecast_checkpoint",
        (dir / "f_plain/forecaster.ckpt").string() + "," + (dir / "f_gan/forecaster.ckpt").string());
  const auto eval = run_command("evaluate", c, dir / "eval");
  EXPECT_THAT(eval.summary, ::testing::HasSubstr("plain mae="));
  EXPECT_THAT(eval.summary, ::testing::HasSubstr("gan mae="));
}

TEST(CommandTest, ManifestRerunReproducesArtifacts) {
  const fs::path dir = scratch_dir("rerun");
  const auto first = run_command("train-forecaster", tiny_pipeline_config(), dir / "one");
  const Manifest manifest = Manifest::load(manifest_path(dir / "one", "train-forecaster"));
  const auto second = run_command(manifest.command, manifest.config, dir / "two");
  EXPECT_EQ(second.manifest.artifacts, manifest.artifacts);
  EXPECT_EQ(first.manifest.config.hash(), manifest.config.hash());
}

TEST(CommandTest, MissingInputsAreConfigErrors) {
  const fs::path dir = scratch_dir("missing");
  RunConfig c = tiny_pipeline_config();
  EXPECT_THROW(run_command("generate", c, dir), ConfigError);
  EXPECT_THROW(run_command("evaluate", c, dir), ConfigError);
  c.set("forecast.augment", "gan");
  EXPECT_THROW(run_command("train-forecaster", c, dir), ConfigError);
  EXPECT_THROW(run_command("synth-data", c, std::nullopt), ConfigError);
  EXPECT_THROW(run_command("nope", c, dir), ContractError);
}

TEST(CommandTest, GradcheckPassesWithoutOutput) {
  RunConfig c;
  c.set("seed", "7");
  c.set("gradcheck.cases", "3");
  const auto r = run_gradcheck(c, std::nullopt);
  EXPECT_EQ(r.exit_code, 0) << r.details;
  EXPECT_THAT(r.summary, ::testing::HasSubstr("PASS"));
}

}  // namespace
}  // namespace tsgan
