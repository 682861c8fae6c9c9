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

#include "mmids/evaluation.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>
#include <vector>

#include "mmids/error.hpp"
#include "mmids/json_io.hpp"
#include "mmids/table.hpp"

namespace mmids {

namespace {

constexpr const char* kCsvHeader = "tp,tn,fp,fn,precision,recall,f1,fp_rate_pct,fn_rate_pct";

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw InvalidArgument("confusion: " + std::to_string(y_true.size()) + " labels but " +
                          std::to_string(y_pred.size()) + " predictions");
  }
  if (y_true.empty()) throw InvalidArgument("confusion: no samples");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int t = y_true[i];
    const int p = y_pred[i];
    if ((t != 0 && t != 1) || (p != 0 && p != 1)) {
      throw InvalidArgument("confusion: labels must be 0 or 1 (index " + std::to_string(i) + ")");
    }
    if (t == 1) {
      ++(p == 1 ? cm.tp : cm.fn);
    } else {
      ++(p == 1 ? cm.fp : cm.tn);
    }
  }
  return cm;
}

double precision(const ConfusionMatrix& cm) { return ratio(cm.tp, cm.tp + cm.fp); }

double recall(const ConfusionMatrix& cm) { return ratio(cm.tp, cm.tp + cm.fn); }

double f1_score(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

double f1_score(const ConfusionMatrix& cm) { return f1_score(precision(cm), recall(cm)); }

EvalReport EvalReport::from_confusion(const ConfusionMatrix& cm, ReportMeta meta) {
  EvalReport r;
  r.confusion = cm;
  r.precision = mmids::precision(cm);
  r.recall = mmids::recall(cm);
  r.f1 = f1_score(r.precision, r.recall);
  r.fp_rate_pct = 100.0 * ratio(cm.fp, cm.total());
  r.fn_rate_pct = 100.0 * ratio(cm.fn, cm.total());
  r.meta = std::move(meta);
  return r;
}

EvalReport evaluate(const ModelParams& params, std::span<const AlignedSample> samples,
                    BranchMode mode, ReportMeta meta, std::size_t workers) {
  if (samples.empty()) throw InvalidArgument("evaluate: no samples");
  std::vector<int> truth(samples.size());
  std::vector<int> predicted(samples.size());
  const auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      truth[i] = samples[i].label;
      predicted[i] = predict_label(forward(params, samples[i], mode).probabilities);
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, samples.size()));
  if (workers == 1) {
    run(0, samples.size());
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (samples.size() + workers - 1) / workers;
    for (std::size_t begin = 0; begin < samples.size(); begin += chunk) {
      pool.emplace_back(run, begin, std::min(samples.size(), begin + chunk));
    }
  }
  return EvalReport::from_confusion(confusion(truth, predicted), std::move(meta));
}

nlohmann::ordered_json report_to_json(const EvalReport& r) {
  return {{"tp", r.confusion.tp},
          {"tn", r.confusion.tn},
          {"fp", r.confusion.fp},
          {"fn", r.confusion.fn},
          {"precision", r.precision},
          {"recall", r.recall},
          {"f1", r.f1},
          {"fp_rate_pct", r.fp_rate_pct},
          {"fn_rate_pct", r.fn_rate_pct},
          {"meta",
           {{"checkpoint", r.meta.checkpoint},
            {"dataset", r.meta.dataset},
            {"created_at", r.meta.created_at}}}};
}

EvalReport report_from_json(const nlohmann::ordered_json& doc) {
  try {
    EvalReport r;
    r.confusion.tp = doc.at("tp").get<std::uint64_t>();
    r.confusion.tn = doc.at("tn").get<std::uint64_t>();
    r.confusion.fp = doc.at("fp").get<std::uint64_t>();
    r.confusion.fn = doc.at("fn").get<std::uint64_t>();
    r.precision = doc.at("precision").get<double>();
    r.recall = doc.at("recall").get<double>();
    r.f1 = doc.at("f1").get<double>();
    r.fp_rate_pct = doc.at("fp_rate_pct").get<double>();
    r.fn_rate_pct = doc.at("fn_rate_pct").get<double>();
    const auto& meta = doc.at("meta");
    r.meta.checkpoint = meta.at("checkpoint").get<std::string>();
    r.meta.dataset = meta.at("dataset").get<std::string>();
    r.meta.created_at = meta.at("created_at").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
}

void emit_report(const EvalReport& report, const std::filesystem::path& path, ReportFormat format) {
  if (format == ReportFormat::json) {
    write_json_file(report_to_json(report), path);
    return;
  }
  const auto& cm = report.confusion;
  std::ostringstream out;
  out << kCsvHeader << '\n'
      << cm.tp << ',' << cm.tn << ',' << cm.fp << ',' << cm.fn << ',' << format_double(report.precision) << ','
      << format_double(report.recall) << ',' << format_double(report.f1) << ','
      << format_double(report.fp_rate_pct) << ',' << format_double(report.fn_rate_pct) << '\n';
  write_text_file(out.str(), path);
}

EvalReport read_report(const std::filesystem::path& path, ReportFormat format) {
  if (format == ReportFormat::json) return report_from_json(read_json_file(path));
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open file");
  std::string header, row;
  if (!std::getline(in, header) || header != kCsvHeader || !std::getline(in, row)) {
    throw DataError(path.string() + ": not a report CSV");
  }
  std::vector<std::string> cells;
  std::stringstream ss(row);
  for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
  if (cells.size() != 9) throw DataError(path.string() + ": report row must have 9 columns");
  const auto num = [&](std::size_t i, auto& out) {
    const auto& c = cells[i];
    const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), out);
    if (ec != std::errc() || ptr != c.data() + c.size()) {
      throw DataError(path.string() + ": cannot parse report column " + std::to_string(i + 1));
    }
  };
  EvalReport r;
  num(0, r.confusion.tp);
  num(1, r.confusion.tn);
  num(2, r.confusion.fp);
  num(3, r.confusion.fn);
  num(4, r.precision);
  num(5, r.recall);
  num(6, r.f1);
  num(7, r.fp_rate_pct);
  num(8, r.fn_rate_pct);
  return r;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace mmids
