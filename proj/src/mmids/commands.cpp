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

#include "mmids/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <thread>

#include "mmids/checkpoint.hpp"
#include "mmids/dataset.hpp"
#include "mmids/error.hpp"
#include "mmids/json_io.hpp"
#include "mmids/log.hpp"
#include "mmids/train.hpp"

namespace mmids {

namespace {

constexpr BranchMode kModes[] = {BranchMode::multi, BranchMode::sensor_only, BranchMode::network_only};

void require_output_dir(const RunConfig& config, std::string_view command) {
  if (config.output_dir.empty()) {
    throw InvalidArgument(std::string(command) + " needs an output directory ('output.dir' or --out)");
  }
}

void make_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError(dir.string() + ": cannot create directory (" + ec.message() + ")");
}

std::string loss_csv(const std::vector<double>& losses) {
  std::string out = "epoch,loss\n";
  for (std::size_t e = 0; e < losses.size(); ++e) {
    out += std::to_string(e + 1) + "," + format_double(losses[e]) + "\n";
  }
  return out;
}

nlohmann::ordered_json ablation_to_json(const AblationResult& result) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : result.rows) {
    nlohmann::ordered_json seeds = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < row.per_seed.size(); ++i) {
      auto report = report_to_json(row.per_seed[i]);
      report.erase("meta");
      seeds.push_back({{"seed", result.seeds[i]}, {"report", std::move(report)}});
    }
    rows.push_back({{"modality", std::string(to_string(row.mode))},
                    {"precision", row.precision},
                    {"recall", row.recall},
                    {"f1", row.f1},
                    {"runs", std::move(seeds)}});
  }
  return {{"seeds", result.seeds}, {"rows", std::move(rows)}};
}

std::string ablation_csv(const AblationResult& result) {
  std::string out = "modality,precision,recall,f1\n";
  for (const auto& row : result.rows) {
    out += std::string(to_string(row.mode)) + "," + format_double(row.precision) + "," +
           format_double(row.recall) + "," + format_double(row.f1) + "\n";
  }
  return out;
}

}  // namespace

std::string stats_digest(const PreprocessStats& stats) {
  const std::string text = stats_to_json(stats).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

LoadedData load_data(const RunConfig& config) {
  if (config.data) {
    const auto& d = *config.data;
    return {ingest_csv(d.sensor_csv, Modality::sensor, d.sensor_features),
            ingest_csv(d.network_csv, Modality::network, d.network_features), config.dataset_id()};
  }
  SyntheticData generated = generate_synthetic(config.synthetic);
  return {std::move(generated.sensor), std::move(generated.network), config.dataset_id()};
}

GenerateOutcome run_generate(const RunConfig& config, const std::filesystem::path& out_dir) {
  if (out_dir.empty()) throw InvalidArgument("generate needs --out");
  const SyntheticData data = generate_synthetic(config.synthetic);
  write_synthetic(data, config.synthetic, out_dir);
  GenerateOutcome out;
  out.sensor_rows = data.sensor.row_count();
  out.network_rows = data.network.row_count();
  const auto attacks = std::count(data.sensor.labels.begin(), data.sensor.labels.end(), 1);
  out.attack_fraction = static_cast<double>(attacks) / static_cast<double>(out.sensor_rows);
  return out;
}

TrainOutcome run_train(const RunConfig& config) {
  config.validate();
  require_output_dir(config, "train");
  const LoadedData data = load_data(config);
  PreparedData prepared =
      prepare_dataset(data.sensor, data.network, config.train.window, config.train.train_fraction);
  TrainResult trained = train(config.train, prepared.train);

  Checkpoint checkpoint;
  checkpoint.config = config.train;
  checkpoint.params = std::move(trained.params);
  checkpoint.metadata = {{"modality", std::string(to_string(config.train.mode))},
                         {"dataset", data.id},
                         {"train_samples", prepared.train.size()},
                         {"stats_digest", stats_digest(prepared.stats)},
                         {"final_loss", trained.epoch_losses.empty()
                                            ? nlohmann::ordered_json(nullptr)
                                            : nlohmann::ordered_json(trained.epoch_losses.back())}};

  make_dir(config.output_dir);
  save_checkpoint(checkpoint, config.checkpoint_path());
  save_stats(prepared.stats, config.checkpoint_path().parent_path() / "stats.json");
  write_text_file(loss_csv(trained.epoch_losses), config.output_dir / "loss.csv");

  TrainOutcome out;
  out.epoch_losses = std::move(trained.epoch_losses);
  out.train_samples = prepared.train.size();
  out.test_samples = prepared.test.size();
  out.warnings = std::move(prepared.warnings);
  return out;
}

EvalReport run_eval(const RunConfig& config) {
  config.validate();
  require_output_dir(config, "eval");
  const auto path = config.checkpoint_path();
  if (!std::filesystem::exists(path)) throw DataError(path.string() + ": checkpoint not found");
  const Checkpoint checkpoint = load_checkpoint(path, config.train.arch);
  const auto stats_path = path.parent_path() / "stats.json";
  const PreprocessStats stats = load_stats(stats_path);
  const auto recorded = checkpoint.metadata.find("stats_digest");
  if (recorded == checkpoint.metadata.end() || !recorded->is_string() ||
      recorded->get<std::string>() != stats_digest(stats)) {
    throw DataError(stats_path.string() + ": stats do not match checkpoint " + path.string());
  }

  const LoadedData data = load_data(config);
  const TrainConfig& trained = checkpoint.config;
  const PreparedData prepared =
      prepare_dataset(data.sensor, data.network, trained.window, trained.train_fraction, stats);

  ReportMeta meta{path.filename().string(), data.id, utc_timestamp()};
  EvalReport report = evaluate(checkpoint.params, prepared.test, trained.mode, meta, config.eval_workers);
  make_dir(config.output_dir);
  emit_report(report, config.output_dir / "report.json", ReportFormat::json);
  emit_report(report, config.output_dir / "report.csv", ReportFormat::csv);
  return report;
}

GradCheckResult run_gradcheck(const RunConfig& config, std::vector<GradCheckResult>* per_seed) {
  config.validate();
  std::vector<GradCheckResult> results;
  for (const std::uint64_t seed : config.gradcheck.seeds) {
    const TinyProblem problem = make_tiny_problem(seed);
    results.push_back(gradient_check(problem.params, problem.batch, BranchMode::multi,
                                     config.gradcheck.epsilon, config.gradcheck.tolerance));
  }
  GradCheckResult merged = merge_results(results);
  if (per_seed) *per_seed = std::move(results);
  return merged;
}

AblationResult run_ablation(const RunConfig& config) {
  config.validate();
  const LoadedData data = load_data(config);
  const PreparedData prepared =
      prepare_dataset(data.sensor, data.network, config.train.window, config.train.train_fraction);

  const auto& seeds = config.ablation.seeds;
  const std::size_t jobs = std::size(kModes) * seeds.size();
  std::vector<EvalReport> reports(jobs);
  const auto run_job = [&](std::size_t job) {
    TrainConfig tc = config.train;
    tc.mode = kModes[job / seeds.size()];
    tc.seed = seeds[job % seeds.size()];
    const TrainResult trained = train(tc, prepared.train);
    reports[job] = evaluate(trained.params, prepared.test, tc.mode, {"", data.id, ""});
    log_info(std::string(to_string(tc.mode)) + " seed " + std::to_string(tc.seed) + " f1 " +
             format_double(reports[job].f1));
  };

  const std::size_t workers = std::min(config.ablation.workers, jobs);
  if (workers <= 1) {
    for (std::size_t job = 0; job < jobs; ++job) run_job(job);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t job = w; job < jobs; job += workers) run_job(job);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  AblationResult result;
  result.seeds = seeds;
  for (std::size_t m = 0; m < std::size(kModes); ++m) {
    AblationRow row;
    row.mode = kModes[m];
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const EvalReport& r = reports[m * seeds.size() + s];
      row.precision += r.precision;
      row.recall += r.recall;
      row.f1 += r.f1;
      row.per_seed.push_back(r);
    }
    const auto n = static_cast<double>(seeds.size());
    row.precision /= n;
    row.recall /= n;
    row.f1 /= n;
    result.rows.push_back(std::move(row));
  }

  if (!config.output_dir.empty()) {
    make_dir(config.output_dir);
    write_json_file(ablation_to_json(result), config.output_dir / "ablation.json");
    write_text_file(ablation_csv(result), config.output_dir / "ablation.csv");
  }
  return result;
}

std::string format_ablation_table(const AblationResult& result) {
  std::ostringstream out;
  char line[96];
  std::snprintf(line, sizeof(line), "%-14s %9s %9s %9s\n", "model", "precision", "recall", "f1");
  out << line;
  for (const auto& row : result.rows) {
    std::snprintf(line, sizeof(line), "%-14s %9.4f %9.4f %9.4f\n", std::string(to_string(row.mode)).c_str(),
                  row.precision, row.recall, row.f1);
    out << line;
  }
  return out.str();
}

}  // namespace mmids
