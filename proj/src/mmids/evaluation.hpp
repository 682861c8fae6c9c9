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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "json.hpp"

#include "mmids/model.hpp"

namespace mmids {

/// Attack is the positive class.
struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + tn + fp + fn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred);

// A zero denominator yields 0.
double precision(const ConfusionMatrix& cm);
double recall(const ConfusionMatrix& cm);
double f1_score(double precision, double recall);
double f1_score(const ConfusionMatrix& cm);

struct ReportMeta {
  std::string checkpoint;
  std::string dataset;
  std::string created_at;

  friend bool operator==(const ReportMeta&, const ReportMeta&) = default;
};

/// Accuracy is deliberately absent: on an imbalanced set it says little.
struct EvalReport {
  ConfusionMatrix confusion;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double fp_rate_pct = 0.0;  // false alarms, percent of all samples
  double fn_rate_pct = 0.0;  // evaded attacks, percent of all samples
  ReportMeta meta;

  static EvalReport from_confusion(const ConfusionMatrix& cm, ReportMeta meta = {});
  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Predicts every sample (optionally on `workers` threads) and scores the
/// result. Sample order does not affect the report.
EvalReport evaluate(const ModelParams& params, std::span<const AlignedSample> samples,
                    BranchMode mode, ReportMeta meta = {}, std::size_t workers = 1);

enum class ReportFormat { json, csv };

nlohmann::ordered_json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::ordered_json& doc);

/// JSON: one object. CSV: a header and a single row of the 9 numeric fields.
void emit_report(const EvalReport& report, const std::filesystem::path& path, ReportFormat format);
EvalReport read_report(const std::filesystem::path& path, ReportFormat format);

/// UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

}  // namespace mmids
