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

#include "mmids/preprocess.hpp"

#include <algorithm>

#include "mmids/error.hpp"
#include "mmids/json_io.hpp"

namespace mmids {

namespace {

void check_stats_match(const RawModalityTable& table, const ModalityStats& stats,
                       const char* op) {
  const auto& names = table.feature_names;
  for (std::size_t f = 0; f < names.size(); ++f) {
    if (f >= stats.features.size() || stats.features[f].name != names[f]) {
      throw DataError(std::string(op) + ": stats have no entry for " +
                      std::string(to_string(table.modality)) + " feature '" + names[f] + "'");
    }
  }
  if (stats.features.size() != names.size()) {
    throw DataError(std::string(op) + ": stats describe " + std::to_string(stats.features.size()) +
                    " " + std::string(to_string(table.modality)) + " features, table has " +
                    std::to_string(names.size()));
  }
}

}  // namespace

ModalityStats fit_modality_stats(const RawModalityTable& table, std::size_t train_rows) {
  table.validate();
  if (train_rows > table.row_count()) {
    throw InvalidArgument("fit_modality_stats: train_rows exceeds table length");
  }
  ModalityStats stats;
  stats.features.reserve(table.feature_count());
  for (std::size_t f = 0; f < table.feature_count(); ++f) {
    FeatureStats fs;
    fs.name = table.feature_names[f];
    double sum = 0.0;
    for (std::size_t r = 0; r < train_rows; ++r) {
      const double v = table.values(r, f);
      if (is_missing(v)) continue;
      if (fs.observed == 0) {
        fs.min = v;
        fs.max = v;
      } else {
        fs.min = std::min(fs.min, v);
        fs.max = std::max(fs.max, v);
      }
      sum += v;
      ++fs.observed;
    }
    if (fs.observed > 0) fs.mean = sum / static_cast<double>(fs.observed);
    stats.features.push_back(std::move(fs));
  }
  return stats;
}

RawModalityTable impute_missing(RawModalityTable table, const ModalityStats& stats) {
  check_stats_match(table, stats, "impute_missing");
  for (std::size_t f = 0; f < table.feature_count(); ++f) {
    const FeatureStats& fs = stats.features[f];
    if (fs.observed == 0) {
      throw DataError("cannot impute " + std::string(to_string(table.modality)) + " feature '" +
                      fs.name + "': no observed values in the training split");
    }
    for (std::size_t r = 0; r < table.row_count(); ++r) {
      double& v = table.values(r, f);
      if (is_missing(v)) v = fs.mean;
    }
  }
  return table;
}

RawModalityTable minmax_normalize(RawModalityTable table, const ModalityStats& stats) {
  check_stats_match(table, stats, "minmax_normalize");
  for (std::size_t f = 0; f < table.feature_count(); ++f) {
    const FeatureStats& fs = stats.features[f];
    const double range = fs.max - fs.min;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
      double& v = table.values(r, f);
      if (is_missing(v)) {
        throw DataError("minmax_normalize: missing value in feature '" + fs.name +
                        "' (impute first)");
      }
      v = range > 0.0 ? std::clamp((v - fs.min) / range, 0.0, 1.0) : 0.0;
    }
  }
  return table;
}

nlohmann::ordered_json stats_to_json(const PreprocessStats& stats) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (Modality m : {Modality::sensor, Modality::network}) {
    nlohmann::ordered_json features = nlohmann::ordered_json::object();
    for (const auto& fs : stats.for_modality(m).features) {
      features[fs.name] = {
          {"mean", fs.mean}, {"min", fs.min}, {"max", fs.max}, {"observed", fs.observed}};
    }
    doc[std::string(to_string(m))] = std::move(features);
  }
  return doc;
}

PreprocessStats stats_from_json(const nlohmann::ordered_json& doc) {
  PreprocessStats stats;
  try {
    if (!doc.is_object() || doc.size() != 2) {
      throw DataError("stats must contain exactly 'sensor' and 'network'");
    }
    for (Modality m : {Modality::sensor, Modality::network}) {
      const auto& features = doc.at(std::string(to_string(m)));
      ModalityStats& out = m == Modality::sensor ? stats.sensor : stats.network;
      for (const auto& [name, entry] : features.items()) {
        FeatureStats fs;
        fs.name = name;
        fs.mean = entry.at("mean").get<double>();
        fs.min = entry.at("min").get<double>();
        fs.max = entry.at("max").get<double>();
        fs.observed = entry.at("observed").get<std::size_t>();
        if (fs.min > fs.max) throw DataError("feature '" + name + "' has min > max");
        out.features.push_back(std::move(fs));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed preprocessing stats: ") + e.what());
  }
  return stats;
}

void save_stats(const PreprocessStats& stats, const std::filesystem::path& path) {
  write_json_file(stats_to_json(stats), path);
}

PreprocessStats load_stats(const std::filesystem::path& path) {
  try {
    return stats_from_json(read_json_file(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace mmids
