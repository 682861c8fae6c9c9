// Copyright 2026 The mmids Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "mmids/checkpoint.hpp"
#include "mmids/commands.hpp"
#include "mmids/error.hpp"
#include "mmids/json_io.hpp"
#include "mmids/run_config.hpp"

namespace mmids {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Commands : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mmids_cmd_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  nlohmann::ordered_json small_doc(const std::string& out) const {
    return {{"synthetic", {{"sample_count", 300}, {"seed", 3}}},
            {"model", {{"sensor_widths", {8, 8, 8, 4}}, {"lstm_hidden", {4, 4, 4}}, {"fusion_widths", {8, 4}}}},
            {"train", {{"window", 4}, {"epochs", 2}, {"batch_size", 32}}},
            {"gradcheck", {{"seeds", {0}}}},
            {"ablation", {{"seeds", {0}}}},
            {"output", {{"dir", (dir_ / out).string()}}}};
  }

  fs::path dir_;
};

TEST_F(Commands, TrainThenEvalWritesArtifacts) {
  const RunConfig cfg = run_config_from_json(small_doc("run"));
  const auto outcome = run_train(cfg);
  EXPECT_EQ(outcome.epoch_losses.size(), 2u);
  EXPECT_GT(outcome.train_samples, 0u);
  EXPECT_GT(outcome.test_samples, 0u);
  for (const char* name : {"checkpoint.json", "stats.json", "loss.csv"}) {
    EXPECT_TRUE(fs::exists(dir_ / "run" / name)) << name;
  }
  EXPECT_EQ(slurp(dir_ / "run" / "loss.csv").substr(0, 11), "epoch,loss\n");

  const auto ckpt = load_checkpoint(dir_ / "run" / "checkpoint.json");
  EXPECT_EQ(ckpt.metadata.at("modality"), "multi");
  EXPECT_EQ(ckpt.metadata.at("train_samples").get<std::size_t>(), outcome.train_samples);
  EXPECT_EQ(ckpt.metadata.at("final_loss").get<double>(), outcome.epoch_losses.back());

  const auto report = run_eval(cfg);
  EXPECT_EQ(report.confusion.total(), outcome.test_samples);
  EXPECT_EQ(read_report(dir_ / "run" / "report.json", ReportFormat::json), report);
  EXPECT_EQ(read_report(dir_ / "run" / "report.csv", ReportFormat::csv).confusion, report.confusion);
}

TEST_F(Commands, ZeroEpochsStillWritesCheckpoint) {
  auto doc = small_doc("zero");
  doc["train"]["epochs"] = 0;
  const RunConfig cfg = run_config_from_json(doc);
  const auto outcome = run_train(cfg);
  EXPECT_TRUE(outcome.epoch_losses.empty());
  const auto ckpt = load_checkpoint(cfg.checkpoint_path());
  EXPECT_TRUE(ckpt.metadata.at("final_loss").is_null());
  EXPECT_EQ(ckpt.params.flatten(), ModelParams::initialize(cfg.train.arch, cfg.train.seed).flatten());
  EXPECT_EQ(slurp(dir_ / "zero" / "loss.csv"), "epoch,loss\n");
}

TEST_F(Commands, SensorOnlyModalityRecorded) {
  auto doc = small_doc("sensor");
  doc["modality"] = "sensor-only";
  const RunConfig cfg = run_config_from_json(doc);
  run_train(cfg);
  const auto ckpt = load_checkpoint(cfg.checkpoint_path());
  EXPECT_EQ(ckpt.metadata.at("modality"), "sensor-only");
  EXPECT_EQ(ckpt.config.mode, BranchMode::sensor_only);
  EXPECT_NO_THROW(run_eval(cfg));
}

TEST_F(Commands, InvalidConfigWritesNothing) {
  auto doc = small_doc("bad");
  doc["train"]["batch_size"] = 0;
  EXPECT_THROW(run_train(run_config_from_json(doc)), InvalidArgument);
  EXPECT_FALSE(fs::exists(dir_ / "bad"));
  doc = small_doc("bad");
  doc["train"]["bogus"] = 1;
  EXPECT_THROW(run_config_from_json(doc), InvalidArgument);
  EXPECT_FALSE(fs::exists(dir_ / "bad"));
}

TEST_F(Commands, MissingOutputDirRejected) {
  auto doc = small_doc("x");
  doc.erase("output");
  EXPECT_THROW(run_train(run_config_from_json(doc)), InvalidArgument);
}

TEST_F(Commands, EvalWithoutCheckpointFails) {
  EXPECT_THROW(run_eval(run_config_from_json(small_doc("none"))), DataError);
}

TEST_F(Commands, EvalRejectsForeignStats) {
  const RunConfig a = run_config_from_json(small_doc("a"));
  run_train(a);
  auto doc = small_doc("b");
  doc["synthetic"]["seed"] = 4;
  run_train(run_config_from_json(doc));
  fs::copy_file(dir_ / "b" / "stats.json", dir_ / "a" / "stats.json", fs::copy_options::overwrite_existing);
  EXPECT_THROW(run_eval(a), DataError);
}

TEST_F(Commands, TrainingIsReproducible) {
  run_train(run_config_from_json(small_doc("one")));
  run_train(run_config_from_json(small_doc("two")));
  for (const char* name : {"checkpoint.json", "stats.json", "loss.csv"}) {
    EXPECT_EQ(slurp(dir_ / "one" / name), slurp(dir_ / "two" / name)) << name;
  }
}

TEST_F(Commands, GenerateThenTrainFromFiles) {
  const RunConfig gen = run_config_from_json(small_doc("unused"));
  const auto g = run_generate(gen, dir_ / "data");
  EXPECT_EQ(g.sensor_rows, 300u);
  EXPECT_GT(g.attack_fraction, 0.0);

  auto doc = small_doc("files");
  doc.erase("synthetic");
  doc["data"] = {{"sensor_csv", "data/sensor.csv"}, {"network_csv", "data/network.csv"}};
  const RunConfig from_files = run_config_from_json(doc, dir_);
  EXPECT_EQ(from_files.data->sensor_csv, dir_ / "data" / "sensor.csv");
  const auto files_outcome = run_train(from_files);
  const auto memory_outcome = run_train(run_config_from_json(small_doc("memory")));
  EXPECT_EQ(files_outcome.train_samples, memory_outcome.train_samples);
  EXPECT_EQ(load_checkpoint(dir_ / "files" / "checkpoint.json").metadata.at("stats_digest"),
            load_checkpoint(dir_ / "memory" / "checkpoint.json").metadata.at("stats_digest"));
}

TEST_F(Commands, GradcheckPassesOnConfiguredSeed) {
  std::vector<GradCheckResult> per_seed;
  const auto r = run_gradcheck(run_config_from_json(small_doc("g")), &per_seed);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(per_seed.size(), 1u);
}

TEST_F(Commands, AblationWritesTable) {
  auto doc = small_doc("abl");
  doc["train"]["epochs"] = 1;
  const auto r = run_ablation(run_config_from_json(doc));
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_EQ(r.rows[0].mode, BranchMode::multi);
  EXPECT_EQ(r.rows[1].mode, BranchMode::sensor_only);
  EXPECT_EQ(r.rows[2].mode, BranchMode::network_only);
  const std::string csv = slurp(dir_ / "abl" / "ablation.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "modality,precision,recall,f1");
  EXPECT_TRUE(fs::exists(dir_ / "abl" / "ablation.json"));
  const std::string table = format_ablation_table(r);
  EXPECT_NE(table.find("network-only"), std::string::npos);
}

TEST(StatsDigest, SensitiveToValues) {
  PreprocessStats a;
  a.sensor.features.push_back({"FIT101", 0.5, 0.0, 1.0, 10});
  PreprocessStats b = a;
  EXPECT_EQ(stats_digest(a), stats_digest(b));
  EXPECT_EQ(stats_digest(a).size(), 16u);
  b.sensor.features[0].max = std::nextafter(1.0, 2.0);
  EXPECT_NE(stats_digest(a), stats_digest(b));
}

}  // namespace
}  // namespace mmids
