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

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mmids/mmids.h"

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool quiet = false;
};

struct ConfigDeleter {
  void operator()(mmids_config* c) const { mmids_config_free(c); }
};
using ConfigPtr = std::unique_ptr<mmids_config, ConfigDeleter>;

int report_failure(mmids_status status) {
  std::fprintf(stderr, "error: %s\n", mmids_last_error());
  return static_cast<int>(status);
}

void log_to_stderr(mmids_log_level level, const char* message, void* user_data) {
  const bool quiet = *static_cast<const bool*>(user_data);
  if (level == MMIDS_LOG_WARNING) {
    std::fprintf(stderr, "warning: %s\n", message);
  } else if (!quiet) {
    std::fprintf(stderr, "%s\n", message);
  }
}

// Loads --config (or an empty config when `optional` and none was given) and
// applies the --seed and --out overrides.
mmids_status load_config(const Options& opt, bool optional, bool data_seed, ConfigPtr& out) {
  mmids_config* raw = nullptr;
  mmids_status st = MMIDS_OK;
  if (opt.config.empty()) {
    if (!optional) {
      std::fprintf(stderr, "error: --config is required\n");
      return MMIDS_ERR_INPUT;
    }
    st = mmids_config_parse("{}", nullptr, &raw);
  } else {
    st = mmids_config_load(opt.config.c_str(), &raw);
  }
  if (st != MMIDS_OK) return static_cast<mmids_status>(report_failure(st));
  out.reset(raw);
  if (opt.seed) {
    st = data_seed ? mmids_config_set_data_seed(raw, *opt.seed) : mmids_config_set_seed(raw, *opt.seed);
    if (st != MMIDS_OK) return static_cast<mmids_status>(report_failure(st));
  }
  if (!opt.out.empty() && !data_seed) {
    st = mmids_config_set_output_dir(raw, opt.out.c_str());
    if (st != MMIDS_OK) return static_cast<mmids_status>(report_failure(st));
  }
  return MMIDS_OK;
}

int cmd_generate(const Options& opt) {
  ConfigPtr cfg;
  if (const auto st = load_config(opt, true, true, cfg); st != MMIDS_OK) return st;
  if (const auto st = mmids_generate(cfg.get(), opt.out.c_str()); st != MMIDS_OK) return report_failure(st);
  std::printf("wrote sensor.csv, network.csv and spec.json to %s\n", opt.out.c_str());
  return 0;
}

int cmd_train(const Options& opt) {
  ConfigPtr cfg;
  if (const auto st = load_config(opt, false, false, cfg); st != MMIDS_OK) return st;
  double loss = 0.0;
  if (const auto st = mmids_train(cfg.get(), &loss); st != MMIDS_OK) return report_failure(st);
  if (std::isnan(loss)) {
    std::printf("trained 0 epochs; checkpoint holds the initialization\n");
  } else {
    std::printf("final loss %.6g\n", loss);
  }
  return 0;
}

int cmd_eval(const Options& opt) {
  ConfigPtr cfg;
  if (const auto st = load_config(opt, false, false, cfg); st != MMIDS_OK) return st;
  mmids_metrics m{};
  if (const auto st = mmids_eval(cfg.get(), &m); st != MMIDS_OK) return report_failure(st);
  std::printf("tp %" PRIu64 "  tn %" PRIu64 "  fp %" PRIu64 "  fn %" PRIu64 "\n", m.tp, m.tn, m.fp, m.fn);
  std::printf("precision %.4f  recall %.4f  f1 %.4f\n", m.precision, m.recall, m.f1);
  std::printf("false alarms %.2f%%  evaded attacks %.2f%%\n", m.fp_rate_pct, m.fn_rate_pct);
  return 0;
}

int cmd_gradcheck(const Options& opt) {
  ConfigPtr cfg;
  if (const auto st = load_config(opt, true, false, cfg); st != MMIDS_OK) return st;
  mmids_gradcheck* raw = nullptr;
  const mmids_status st = mmids_gradcheck_run(cfg.get(), &raw);
  if (!raw) return report_failure(st);
  std::unique_ptr<mmids_gradcheck, decltype(&mmids_gradcheck_free)> result(raw, mmids_gradcheck_free);
  const double tol = mmids_gradcheck_tolerance(raw);
  for (std::size_t i = 0; i < mmids_gradcheck_group_count(raw); ++i) {
    const double err = mmids_gradcheck_group_error(raw, i);
    std::printf("%-28s %.3e  %s\n", mmids_gradcheck_group_name(raw, i), err, err <= tol ? "ok" : "FAIL");
  }
  if (st != MMIDS_OK) return report_failure(st);
  std::printf("all groups within %.0e\n", tol);
  return 0;
}

int cmd_ablation(const Options& opt) {
  ConfigPtr cfg;
  if (const auto st = load_config(opt, false, false, cfg); st != MMIDS_OK) return st;
  mmids_ablation* raw = nullptr;
  if (const auto st = mmids_ablation_run(cfg.get(), &raw); st != MMIDS_OK) return report_failure(st);
  std::unique_ptr<mmids_ablation, decltype(&mmids_ablation_free)> result(raw, mmids_ablation_free);
  std::fputs(mmids_ablation_table(raw), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-modal intrusion detection for industrial control systems"};
  app.set_version_flag("--version", std::string(mmids_version()));
  app.require_subcommand(1);

  Options opt;
  std::uint64_t seed = 0;
  const auto add_common = [&](CLI::App* sub, bool out_required) {
    sub->add_option("--config", opt.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Seed override");
    auto* out = sub->add_option("--out", opt.out, "Output directory");
    if (out_required) out->required();
    sub->add_flag("-q,--quiet", opt.quiet, "Only print warnings and results");
  };

  auto* generate = app.add_subcommand("generate", "Write a synthetic dataset");
  add_common(generate, true);
  auto* train = app.add_subcommand("train", "Train a model and write a checkpoint");
  add_common(train, false);
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on the test split");
  add_common(eval, false);
  auto* gradcheck = app.add_subcommand("gradcheck", "Compare backprop with finite differences");
  add_common(gradcheck, false);
  auto* ablation = app.add_subcommand("ablation", "Compare multi-modal and single-modality models");
  add_common(ablation, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return MMIDS_ERR_INPUT;
  }

  for (auto* sub : app.get_subcommands()) {
    if (sub->count("--seed") > 0) opt.seed = seed;
  }
  mmids_set_log_callback(log_to_stderr, &opt.quiet);

  if (generate->parsed()) return cmd_generate(opt);
  if (train->parsed()) return cmd_train(opt);
  if (eval->parsed()) return cmd_eval(opt);
  if (gradcheck->parsed()) return cmd_gradcheck(opt);
  return cmd_ablation(opt);
}
