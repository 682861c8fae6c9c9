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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "mmids/dataset.hpp"
#include "mmids/error.hpp"
#include "mmids/preprocess.hpp"
#include "mmids/synthetic.hpp"
#include "mmids/table.hpp"
#include "oracles/threshold_baseline.hpp"

namespace mmids {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("mmids_data_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path p = path_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
  }

 private:
  fs::path path_;
};

std::string header(const std::string& prefix, std::size_t features, bool label) {
  std::string h = "timestamp";
  for (std::size_t f = 0; f < features; ++f) h += "," + prefix + std::to_string(f);
  if (label) h += ",label";
  return h + "\n";
}

std::string rows(std::size_t count, std::size_t features, bool label) {
  std::string out;
  for (std::size_t r = 0; r < count; ++r) {
    out += std::to_string(r + 1);
    for (std::size_t f = 0; f < features; ++f) out += "," + std::to_string(0.5 * static_cast<double>(r + f));
    if (label) out += r % 3 == 0 ? ",1" : ",0";
    out += "\n";
  }
  return out;
}

RawModalityTable make_table(Modality m, std::vector<double> ts, std::vector<std::vector<double>> values,
                            std::vector<int> labels = {}) {
  RawModalityTable t;
  t.modality = m;
  for (std::size_t f = 0; f < values.front().size(); ++f) t.feature_names.push_back("f" + std::to_string(f));
  t.timestamps = std::move(ts);
  t.values = Matrix(values.size(), values.front().size());
  for (std::size_t r = 0; r < values.size(); ++r) {
    for (std::size_t f = 0; f < values[r].size(); ++f) t.values(r, f) = values[r][f];
  }
  t.labels = std::move(labels);
  return t;
}

TEST(IngestCsv, AcceptsSwatShapedSensorFile) {
  TempDir dir;
  const auto p = dir.write("s.csv", header("S", 51, true) + rows(5, 51, true));
  const auto t = ingest_csv(p, Modality::sensor, kSwatSensorFeatures);
  EXPECT_EQ(t.feature_count(), 51u);
  EXPECT_EQ(t.row_count(), 5u);
  EXPECT_EQ(t.labels, (std::vector<int>{1, 0, 0, 1, 0}));
}

TEST(IngestCsv, AcceptsSwatShapedNetworkFileWithoutLabels) {
  TempDir dir;
  const auto p = dir.write("n.csv", header("N", 16, false) + rows(4, 16, false));
  const auto t = ingest_csv(p, Modality::network, kSwatNetworkFeatures);
  EXPECT_EQ(t.feature_count(), 16u);
  EXPECT_FALSE(t.has_labels());
}

TEST(IngestCsv, RejectsOffByOneColumnCounts) {
  TempDir dir;
  const auto p15 = dir.write("n15.csv", header("N", 15, false) + rows(3, 15, false));
  try {
    ingest_csv(p15, Modality::network, kSwatNetworkFeatures);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("expected 16"), std::string::npos) << what;
    EXPECT_NE(what.find("found 15"), std::string::npos) << what;
  }
  const auto p52 = dir.write("s52.csv", header("S", 52, true) + rows(3, 52, true));
  EXPECT_THROW(ingest_csv(p52, Modality::sensor, kSwatSensorFeatures), DataError);
}

TEST(IngestCsv, EmptyCellsBecomeMissing) {
  TempDir dir;
  const auto p = dir.write("s.csv", "timestamp,a,b,label\n1,,2,0\n2,3,,1\n");
  const auto t = ingest_csv(p, Modality::sensor, 2);
  EXPECT_TRUE(is_missing(t.values(0, 0)));
  EXPECT_EQ(t.values(0, 1), 2.0);
  EXPECT_EQ(t.values(1, 0), 3.0);
  EXPECT_TRUE(is_missing(t.values(1, 1)));
  EXPECT_EQ(t.missing_count(), 2u);
}

TEST(IngestCsv, UnparseableCellNamesRowAndColumn) {
  TempDir dir;
  const auto p = dir.write("s.csv", "timestamp,a,b\n1,1,2\n2,3,oops\n");
  try {
    ingest_csv(p, Modality::sensor, 2);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("row 3"), std::string::npos) << what;
    EXPECT_NE(what.find("'b'"), std::string::npos) << what;
  }
}

TEST(IngestCsv, UnsortedTimestampsRejected) {
  TempDir dir;
  const auto p = dir.write("s.csv", "timestamp,a\n2,1\n1,2\n");
  EXPECT_THROW(ingest_csv(p, Modality::sensor, 1), DataError);
}

TEST(IngestCsv, MissingFileRejected) {
  EXPECT_THROW(ingest_csv("/nonexistent/file.csv", Modality::sensor, 1), DataError);
}

TEST(IngestCsv, WriteThenReadIsExact) {
  TempDir dir;
  auto t = make_table(Modality::sensor, {0.5, 1.25, 2.0}, {{0.1, kMissing}, {1.0 / 3.0, -2e-300}, {7, 8}},
                      {0, 1, 0});
  write_csv(t, dir.path() / "t.csv");
  const auto back = ingest_csv(dir.path() / "t.csv", Modality::sensor, 2);
  EXPECT_EQ(back.timestamps, t.timestamps);
  EXPECT_EQ(back.labels, t.labels);
  EXPECT_TRUE(is_missing(back.values(0, 1)));
  EXPECT_EQ(back.values(1, 0), 1.0 / 3.0);
  EXPECT_EQ(back.values(1, 1), -2e-300);
}

TEST(Impute, MeanOfObserved) {
  const auto t = make_table(Modality::sensor, {1, 2, 3}, {{1}, {kMissing}, {3}});
  const auto stats = fit_modality_stats(t, 3);
  const auto out = impute_missing(t, stats);
  EXPECT_EQ(out.values(1, 0), 2.0);
}

TEST(Impute, CompleteColumnUnchanged) {
  const auto t = make_table(Modality::sensor, {1, 2, 3}, {{1, 4}, {2, 5}, {3, 6}});
  EXPECT_EQ(impute_missing(t, fit_modality_stats(t, 3)).values, t.values);
}

TEST(Impute, EntirelyMissingColumnThrows) {
  const auto t = make_table(Modality::sensor, {1, 2}, {{1, kMissing}, {2, kMissing}});
  EXPECT_THROW(impute_missing(t, fit_modality_stats(t, 2)), DataError);
}

TEST(Normalize, EndpointsAndConstants) {
  const auto t = make_table(Modality::sensor, {1, 2, 3}, {{2, 5}, {4, 5}, {6, 5}});
  const auto out = minmax_normalize(t, fit_modality_stats(t, 3));
  EXPECT_EQ(out.values(0, 0), 0.0);
  EXPECT_EQ(out.values(1, 0), 0.5);
  EXPECT_EQ(out.values(2, 0), 1.0);
  for (std::size_t r = 0; r < 3; ++r) EXPECT_EQ(out.values(r, 1), 0.0);
}

TEST(Normalize, OutOfRangeValuesAreClamped) {
  const auto fit = make_table(Modality::sensor, {1, 2}, {{0}, {10}});
  const auto later = make_table(Modality::sensor, {3, 4}, {{-5}, {25}});
  const auto out = minmax_normalize(later, fit_modality_stats(fit, 2));
  EXPECT_EQ(out.values(0, 0), 0.0);
  EXPECT_EQ(out.values(1, 0), 1.0);
}

TEST(Normalize, MissingFeatureInStatsThrows) {
  const auto t = make_table(Modality::sensor, {1, 2}, {{1, 2}, {3, 4}});
  const auto narrow = make_table(Modality::sensor, {1, 2}, {{1}, {3}});
  EXPECT_THROW(minmax_normalize(t, fit_modality_stats(narrow, 2)), DataError);
}

TEST(Stats, JsonRoundTripIsBitExact) {
  const auto s = make_table(Modality::sensor, {1, 2, 3}, {{0.1, 1.0 / 7.0}, {kMissing, 2e-17}, {0.3, 9e300}});
  const auto n = make_table(Modality::network, {1, 2}, {{1.0 / 3.0}, {5}});
  PreprocessStats stats{fit_modality_stats(s, 3), fit_modality_stats(n, 2)};
  const auto back = stats_from_json(nlohmann::ordered_json::parse(stats_to_json(stats).dump()));
  EXPECT_EQ(back, stats);
}

TEST(Stats, FileRoundTrip) {
  TempDir dir;
  const auto s = make_table(Modality::sensor, {1, 2}, {{0.1}, {0.7}});
  PreprocessStats stats{fit_modality_stats(s, 2), fit_modality_stats(s, 2)};
  save_stats(stats, dir.path() / "stats.json");
  EXPECT_EQ(load_stats(dir.path() / "stats.json"), stats);
}

TEST(Align, LastWindowRowsAtOrBeforeSensorTime) {
  const auto s = make_table(Modality::sensor, {10}, {{1}}, {1});
  const auto n = make_table(Modality::network, {8, 9, 10, 11}, {{8}, {9}, {10}, {11}});
  const auto samples = align_modalities(s, n, 2);
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_EQ(samples[0].network, Matrix::from_rows({{9}, {10}}));
  EXPECT_EQ(samples[0].label, 1);
}

TEST(Align, TooFewPrecedingRowsDropped) {
  const auto s = make_table(Modality::sensor, {2, 3}, {{1}, {2}}, {0, 1});
  const auto n = make_table(Modality::network, {1, 2, 3}, {{1}, {2}, {3}});
  const auto samples = align_modalities(s, n, 3);
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_EQ(samples[0].timestamp, 3.0);
}

TEST(Align, WindowOneIsMostRecentRow) {
  const auto s = make_table(Modality::sensor, {5}, {{1}}, {0});
  const auto n = make_table(Modality::network, {1, 4, 6}, {{1}, {4}, {6}});
  const auto samples = align_modalities(s, n, 1);
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_EQ(samples[0].network, Matrix::from_rows({{4}}));
}

TEST(Align, NothingAlignsThrows) {
  const auto s = make_table(Modality::sensor, {1}, {{1}}, {0});
  const auto n = make_table(Modality::network, {5}, {{1}});
  EXPECT_THROW(align_modalities(s, n, 1), DataError);
}

TEST(Align, CountMatchesEligibleSensorRows) {
  SyntheticSpec spec;
  spec.sample_count = 300;
  spec.missing_rate = 0.0;
  const auto data = generate_synthetic(spec);
  const auto samples = align_modalities(data.sensor, data.network, spec.window);
  std::size_t eligible = 0;
  for (double t : data.sensor.timestamps) {
    const auto preceding = std::upper_bound(data.network.timestamps.begin(), data.network.timestamps.end(), t) -
                           data.network.timestamps.begin();
    eligible += static_cast<std::size_t>(preceding) >= spec.window;
  }
  EXPECT_EQ(samples.size(), eligible);
}

std::vector<AlignedSample> labelled(std::size_t n, std::size_t attacks_at_end) {
  std::vector<AlignedSample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].timestamp = static_cast<double>(i);
    out[i].label = i + attacks_at_end >= n ? 1 : 0;
  }
  return out;
}

TEST(Split, SeventyThirty) {
  const auto r = split_chronological(labelled(100, 50), 0.7);
  EXPECT_EQ(r.train.size(), 70u);
  EXPECT_EQ(r.test.size(), 30u);
  EXPECT_EQ(r.train.back().timestamp, 69.0);
  EXPECT_EQ(r.test.front().timestamp, 70.0);
}

TEST(Split, FloorRule) {
  const auto r = split_chronological(labelled(10, 5), 0.95);
  EXPECT_EQ(r.train.size(), 9u);
  EXPECT_EQ(r.test.size(), 1u);
}

TEST(Split, WarnsWhenTrainHasNoAttacks) {
  const auto r = split_chronological(labelled(10, 2), 0.5);
  ASSERT_FALSE(r.warnings.empty());
  EXPECT_NE(r.warnings.front().find("train"), std::string::npos);
}

TEST(Split, EmptySideThrows) {
  EXPECT_THROW(split_chronological(labelled(3, 1), 0.2), InvalidArgument);
  EXPECT_THROW(split_chronological(labelled(3, 1), 1.0), InvalidArgument);
  EXPECT_THROW(split_chronological(labelled(3, 1), 0.0), InvalidArgument);
}

SyntheticSpec small_spec() {
  SyntheticSpec spec;
  spec.sample_count = 1500;
  spec.missing_rate = 0.01;
  return spec;
}

TEST(Prepare, ValuesInUnitIntervalWithoutMissing) {
  const auto data = generate_synthetic(small_spec());
  ASSERT_GT(data.sensor.missing_count() + data.network.missing_count(), 0u);
  const auto prepared = prepare_dataset(data.sensor, data.network, 8, 0.7);
  for (const auto* side : {&prepared.train, &prepared.test}) {
    for (const auto& s : *side) {
      for (double v : s.sensor) EXPECT_TRUE(v >= 0.0 && v <= 1.0);
      for (double v : s.network.values()) EXPECT_TRUE(v >= 0.0 && v <= 1.0);
    }
  }
}

TEST(Prepare, IsAPureFunction) {
  const auto data = generate_synthetic(small_spec());
  const auto a = prepare_dataset(data.sensor, data.network, 8, 0.7);
  const auto b = prepare_dataset(data.sensor, data.network, 8, 0.7);
  EXPECT_EQ(a.stats, b.stats);
  ASSERT_EQ(a.test.size(), b.test.size());
  for (std::size_t i = 0; i < a.test.size(); ++i) EXPECT_EQ(a.test[i].network, b.test[i].network);
}

// Reverses the values of every row after the training period; the stats must not move.
TEST(Prepare, StatsIgnoreTestRows) {
  auto data = generate_synthetic(small_spec());
  const auto base = prepare_dataset(data.sensor, data.network, 8, 0.7);
  const double cutoff = base.train.back().timestamp;

  const auto permute_after = [&](RawModalityTable& t) {
    std::size_t first = 0;
    while (first < t.row_count() && t.timestamps[first] <= cutoff) ++first;
    for (std::size_t a = first, b = t.row_count() - 1; a < b; ++a, --b) {
      for (std::size_t f = 0; f < t.feature_count(); ++f) std::swap(t.values(a, f), t.values(b, f));
    }
    return first;
  };
  ASSERT_LT(permute_after(data.sensor), data.sensor.row_count());
  permute_after(data.network);
  const auto shuffled = prepare_dataset(data.sensor, data.network, 8, 0.7);
  EXPECT_EQ(shuffled.stats, base.stats);
}

TEST(Prepare, FittedStatsReproduceTheSplit) {
  const auto data = generate_synthetic(small_spec());
  const auto fitted = prepare_dataset(data.sensor, data.network, 8, 0.7);
  const auto reused = prepare_dataset(data.sensor, data.network, 8, 0.7, fitted.stats);
  ASSERT_EQ(fitted.test.size(), reused.test.size());
  for (std::size_t i = 0; i < fitted.test.size(); ++i) {
    EXPECT_EQ(fitted.test[i].sensor, reused.test[i].sensor);
    EXPECT_EQ(fitted.test[i].network, reused.test[i].network);
  }
}

TEST(Synthetic, SameSeedByteIdenticalFiles) {
  TempDir dir;
  SyntheticSpec spec = small_spec();
  write_synthetic(generate_synthetic(spec), spec, dir.path() / "a");
  write_synthetic(generate_synthetic(spec), spec, dir.path() / "b");
  for (const char* name : {"sensor.csv", "network.csv", "spec.json"}) {
    std::ifstream a(dir.path() / "a" / name, std::ios::binary), b(dir.path() / "b" / name, std::ios::binary);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    EXPECT_FALSE(sa.str().empty());
    EXPECT_EQ(sa.str(), sb.str()) << name;
  }
}

TEST(Synthetic, DifferentSeedsDiffer) {
  SyntheticSpec a = small_spec(), b = small_spec();
  b.seed = a.seed + 1;
  EXPECT_FALSE(generate_synthetic(a).sensor.values == generate_synthetic(b).sensor.values);
}

TEST(Synthetic, DefaultShapeAndAttackRatio) {
  const auto data = generate_synthetic(SyntheticSpec{});
  EXPECT_EQ(data.sensor.row_count(), 10000u);
  EXPECT_EQ(data.sensor.feature_count(), kSwatSensorFeatures);
  EXPECT_EQ(data.network.feature_count(), kSwatNetworkFeatures);
  const double ratio = static_cast<double>(std::count(data.sensor.labels.begin(), data.sensor.labels.end(), 1)) /
                       static_cast<double>(data.sensor.row_count());
  EXPECT_GE(ratio, 0.111);
  EXPECT_LE(ratio, 0.131);
  EXPECT_EQ(align_modalities(impute_missing(data.sensor, fit_modality_stats(data.sensor, 10000)),
                             impute_missing(data.network, fit_modality_stats(data.network, data.network.row_count())),
                             8)
                .size(),
            10000u);
}

TEST(Synthetic, InvalidSpecRejected) {
  SyntheticSpec spec;
  spec.attack_ratio = 1.0;
  EXPECT_THROW(generate_synthetic(spec), InvalidArgument);
  spec = SyntheticSpec{};
  spec.sample_count = 9;
  EXPECT_THROW(generate_synthetic(spec), InvalidArgument);
  EXPECT_THROW(synthetic_spec_from_json({{"sample_count", 100}, {"bogus", 1}}), InvalidArgument);
}

// A per-feature band detector with its margin tuned on the training split
// catches most attacks but is not perfect.
TEST(Synthetic, ThresholdBaselineFindsAttacks) {
  const auto data = generate_synthetic(SyntheticSpec{});
  const auto prepared = prepare_dataset(data.sensor, data.network, 8, 0.7);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (const auto* side : {&prepared.train, &prepared.test}) {
    for (const auto& s : *side) {
      std::vector<double> row = s.sensor;
      const auto last = s.network.row(s.network.rows() - 1);
      row.insert(row.end(), last.begin(), last.end());
      rows.push_back(std::move(row));
      labels.push_back(s.label);
    }
  }
  const auto result = oracle::threshold_sweep(rows, labels, prepared.train.size());
  EXPECT_GE(result.test_f1, 0.6) << "margin " << result.margin;
}

}  // namespace
}  // namespace mmids
