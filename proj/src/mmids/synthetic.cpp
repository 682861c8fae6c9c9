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

#include "mmids/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "mmids/error.hpp"
#include "mmids/json_io.hpp"
#include "mmids/rng.hpp"

namespace mmids {

namespace {

constexpr std::size_t kStages = 6;

// Tag names of the SWaT sensor export, stages 1-6.
constexpr std::array<const char*, kSwatSensorFeatures> kSwatSensorNames = {
    "FIT101", "LIT101", "MV101",  "P101",   "P102",   "AIT201", "AIT202", "AIT203", "FIT201",
    "MV201",  "P201",   "P202",   "P203",   "P204",   "P205",   "P206",   "DPIT301", "FIT301",
    "LIT301", "MV301",  "MV302",  "MV303",  "MV304",  "P301",   "P302",   "AIT401", "AIT402",
    "FIT401", "LIT401", "P401",   "P402",   "P403",   "P404",   "UV401",  "AIT501", "AIT502",
    "AIT503", "AIT504", "FIT501", "FIT502", "FIT503", "FIT504", "P501",   "P502",   "PIT501",
    "PIT502", "PIT503", "FIT601", "P601",   "P602",   "P603"};

constexpr std::array<const char*, kSwatNetworkFeatures> kNetworkNames = {
    "pkt_len",     "ttl",        "src_port",   "dst_port",    "proto",      "tcp_flags",
    "win_size",    "iat",        "modbus_func", "modbus_len", "req_count",  "resp_count",
    "bytes_in",    "bytes_out",  "retrans",    "payload_entropy"};

struct StageProcess {
  double period;
  double phase;
  double harmonic_period;
  double harmonic_phase;
  double drift;
};

struct SensorChannel {
  std::string name;
  std::size_t stage;
  bool actuator;
  double offset;
  double scale;
  double threshold;
};

struct NetworkChannel {
  std::string name;
  std::size_t stage;
  double base;
  double spread;
  double coupling;
};

struct AttackWindow {
  std::size_t begin;
  std::size_t end;  // exclusive, in sensor rows
  double sensor_strength;
  double network_strength;
  std::vector<std::pair<std::size_t, double>> sensor_targets;   // feature, direction
  std::vector<std::pair<std::size_t, double>> network_targets;
};

std::size_t stage_from_tag(const std::string& tag) {
  for (char ch : tag) {
    if (ch >= '1' && ch <= '6') return static_cast<std::size_t>(ch - '1');
  }
  return 0;
}

bool is_actuator_tag(const std::string& tag) {
  return tag.starts_with("MV") || tag.starts_with("UV") ||
         (tag.size() > 1 && tag[0] == 'P' && tag[1] >= '0' && tag[1] <= '9');
}

std::vector<std::pair<std::size_t, double>> pick_targets(SeededRng& rng, std::size_t count,
                                                         std::size_t lo, std::size_t span) {
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t k = std::min(count, lo + rng.below(span));
  // Partial Fisher-Yates: the first k entries are a uniform subset.
  for (std::size_t i = 0; i < k; ++i) std::swap(order[i], order[i + rng.below(count - i)]);
  std::vector<std::pair<std::size_t, double>> targets;
  for (std::size_t i = 0; i < k; ++i) {
    targets.emplace_back(order[i], rng.uniform() < 0.5 ? -1.0 : 1.0);
  }
  std::sort(targets.begin(), targets.end());
  return targets;
}

// A uniform subset of between lo and lo + span - 1 entries of `pool`, in pool order.
std::vector<std::pair<std::size_t, double>> pick_from(
    SeededRng& rng, const std::vector<std::pair<std::size_t, double>>& pool, std::size_t lo,
    std::size_t span) {
  const auto picked = pick_targets(rng, pool.size(), lo, span);
  std::vector<std::pair<std::size_t, double>> targets;
  for (const auto& [index, unused] : picked) targets.push_back(pool[index]);
  std::sort(targets.begin(), targets.end());
  return targets;
}

std::vector<AttackWindow> plan_attacks(const SyntheticSpec& spec, const std::vector<std::size_t>& analog,
                                       SeededRng& rng) {
  const std::size_t n = spec.sample_count;
  const auto attack_rows = static_cast<std::size_t>(std::llround(spec.attack_ratio * static_cast<double>(n)));
  std::vector<std::size_t> lengths;
  std::size_t remaining = attack_rows;
  while (remaining > 0) {
    std::size_t len = spec.min_attack_length +
                      rng.below(spec.max_attack_length - spec.min_attack_length + 1);
    len = std::min(len, remaining);
    if (remaining - len > 0 && remaining - len < spec.min_attack_length) len = remaining;
    lengths.push_back(len);
    remaining -= len;
  }
  const std::size_t windows = lengths.size();
  const std::size_t normal_rows = n - attack_rows;
  if (windows > 0 && normal_rows + 1 < windows) {
    throw InvalidArgument("synthetic spec: attack_ratio leaves too few normal rows to separate windows");
  }

  // Distribute normal rows over windows + 1 gaps; interior gaps get at least one.
  std::vector<std::size_t> gaps(windows + 1, 0);
  for (std::size_t g = 1; g < windows; ++g) gaps[g] = 1;
  const std::size_t free_rows = normal_rows - (windows > 0 ? windows - 1 : 0);
  std::vector<double> weights(windows + 1);
  for (double& w : weights) w = 0.05 + rng.uniform();
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::size_t assigned = 0;
  for (std::size_t g = 0; g <= windows; ++g) {
    const auto share = static_cast<std::size_t>(std::floor(static_cast<double>(free_rows) * weights[g] / total));
    gaps[g] += share;
    assigned += share;
  }
  gaps.back() += free_rows - assigned;

  // Each modality has a fixed set of vulnerable (analog) features, each pushed in its own direction.
  auto sensor_surface = pick_targets(rng, analog.size(), std::min(spec.sensor_attack_surface, analog.size()), 1);
  for (auto& [index, dir] : sensor_surface) index = analog[index];
  std::sort(sensor_surface.begin(), sensor_surface.end());
  const auto network_surface = pick_targets(rng, spec.network_features,
                                            std::min(spec.network_attack_surface, spec.network_features), 1);

  std::vector<AttackWindow> plan;
  std::size_t cursor = gaps[0];
  for (std::size_t w = 0; w < windows; ++w) {
    AttackWindow a;
    a.begin = cursor;
    a.end = cursor + lengths[w];
    cursor = a.end + gaps[w + 1];
    // 0: visible in both modalities, 1: hides from the network, 2: hides from sensors.
    const std::size_t mode = rng.below(3);
    a.sensor_strength = spec.sensor_attack_magnitude * (mode == 2 ? spec.stealth_factor : 1.0);
    a.network_strength = spec.network_attack_magnitude * (mode == 1 ? spec.stealth_factor : 1.0);
    a.sensor_targets = pick_from(rng, sensor_surface, 3, 4);
    a.network_targets = pick_from(rng, network_surface, 2, 3);
    plan.push_back(std::move(a));
  }
  return plan;
}

double stage_signal(const StageProcess& p, double t, double duration, double amplitude) {
  using std::numbers::pi;
  return amplitude * (std::sin(2.0 * pi * t / p.period + p.phase) +
                      0.3 * std::sin(2.0 * pi * t / p.harmonic_period + p.harmonic_phase)) +
         p.drift * (t / duration);
}

}  // namespace

void SyntheticSpec::validate() const {
  const auto bad = [](const std::string& what) { throw InvalidArgument("synthetic spec: " + what); };
  if (sample_count < 10) bad("sample_count must be at least 10");
  if (!(attack_ratio > 0.0 && attack_ratio < 1.0)) bad("attack_ratio must lie in (0, 1)");
  if (window == 0) bad("window must be at least 1");
  if (sensor_features == 0 || network_features == 0) bad("feature counts must be positive");
  if (packets_per_sample == 0) bad("packets_per_sample must be positive");
  if (min_attack_length == 0 || min_attack_length > max_attack_length) {
    bad("attack lengths must satisfy 1 <= min_attack_length <= max_attack_length");
  }
  if (!(sinusoid_amplitude >= 0.0) || !(drift_amplitude >= 0.0) || !(noise_level >= 0.0)) {
    bad("amplitudes and noise must be nonnegative");
  }
  if (!(sensor_attack_magnitude >= 0.0) || !(network_attack_magnitude >= 0.0)) {
    bad("attack magnitudes must be nonnegative");
  }
  if (sensor_attack_surface == 0 || network_attack_surface == 0) bad("attack surfaces must be positive");
  if (!(stealth_factor >= 0.0 && stealth_factor <= 1.0)) bad("stealth_factor must lie in [0, 1]");
  if (!(missing_rate >= 0.0 && missing_rate < 0.5)) bad("missing_rate must lie in [0, 0.5)");
}

nlohmann::ordered_json synthetic_spec_to_json(const SyntheticSpec& s) {
  return {{"sample_count", s.sample_count},
          {"attack_ratio", s.attack_ratio},
          {"window", s.window},
          {"seed", s.seed},
          {"sensor_features", s.sensor_features},
          {"network_features", s.network_features},
          {"packets_per_sample", s.packets_per_sample},
          {"sinusoid_amplitude", s.sinusoid_amplitude},
          {"drift_amplitude", s.drift_amplitude},
          {"noise_level", s.noise_level},
          {"sensor_attack_magnitude", s.sensor_attack_magnitude},
          {"network_attack_magnitude", s.network_attack_magnitude},
          {"stealth_factor", s.stealth_factor},
          {"sensor_attack_surface", s.sensor_attack_surface},
          {"network_attack_surface", s.network_attack_surface},
          {"min_attack_length", s.min_attack_length},
          {"max_attack_length", s.max_attack_length},
          {"missing_rate", s.missing_rate}};
}

SyntheticSpec synthetic_spec_from_json(const nlohmann::ordered_json& doc) {
  constexpr std::string_view ctx = "synthetic spec";
  reject_unknown_keys(doc,
                      {"sample_count", "attack_ratio", "window", "seed", "sensor_features",
                       "network_features", "packets_per_sample", "sinusoid_amplitude",
                       "drift_amplitude", "noise_level", "sensor_attack_magnitude",
                       "network_attack_magnitude", "stealth_factor", "sensor_attack_surface",
                       "network_attack_surface", "min_attack_length",
                       "max_attack_length", "missing_rate"},
                      ctx);
  SyntheticSpec s;
  read_optional(doc, "sample_count", s.sample_count, ctx);
  read_optional(doc, "attack_ratio", s.attack_ratio, ctx);
  read_optional(doc, "window", s.window, ctx);
  read_optional(doc, "seed", s.seed, ctx);
  read_optional(doc, "sensor_features", s.sensor_features, ctx);
  read_optional(doc, "network_features", s.network_features, ctx);
  read_optional(doc, "packets_per_sample", s.packets_per_sample, ctx);
  read_optional(doc, "sinusoid_amplitude", s.sinusoid_amplitude, ctx);
  read_optional(doc, "drift_amplitude", s.drift_amplitude, ctx);
  read_optional(doc, "noise_level", s.noise_level, ctx);
  read_optional(doc, "sensor_attack_magnitude", s.sensor_attack_magnitude, ctx);
  read_optional(doc, "network_attack_magnitude", s.network_attack_magnitude, ctx);
  read_optional(doc, "stealth_factor", s.stealth_factor, ctx);
  read_optional(doc, "sensor_attack_surface", s.sensor_attack_surface, ctx);
  read_optional(doc, "network_attack_surface", s.network_attack_surface, ctx);
  read_optional(doc, "min_attack_length", s.min_attack_length, ctx);
  read_optional(doc, "max_attack_length", s.max_attack_length, ctx);
  read_optional(doc, "missing_rate", s.missing_rate, ctx);
  s.validate();
  return s;
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  SeededRng rng(spec.seed);
  using std::numbers::pi;

  const std::size_t n = spec.sample_count;
  const std::size_t ppt = spec.packets_per_sample;
  // Whole seconds of network traffic before the first sensor row, enough that
  // every sensor row has at least `window` network rows at or before it.
  const std::size_t lead = (spec.window + ppt - 1) / ppt;
  const double duration = static_cast<double>(lead + n + 1);

  std::array<StageProcess, kStages> stages{};
  for (auto& p : stages) {
    p.period = rng.uniform(60.0, 600.0);
    p.phase = rng.uniform(0.0, 2.0 * pi);
    p.harmonic_period = rng.uniform(7.0, 40.0);
    p.harmonic_phase = rng.uniform(0.0, 2.0 * pi);
    p.drift = spec.drift_amplitude * rng.uniform(-1.0, 1.0);
  }

  const bool swat_names = spec.sensor_features == kSwatSensorFeatures;
  std::vector<SensorChannel> sensors(spec.sensor_features);
  for (std::size_t f = 0; f < sensors.size(); ++f) {
    auto& ch = sensors[f];
    ch.name = swat_names ? kSwatSensorNames[f] : "s" + std::to_string(f);
    ch.stage = swat_names ? stage_from_tag(ch.name) : f % kStages;
    ch.actuator = swat_names ? is_actuator_tag(ch.name) : f % 3 == 2;
    ch.offset = rng.uniform(0.0, 100.0);
    ch.scale = rng.uniform(0.5, 20.0);
    ch.threshold = rng.uniform(-0.5, 0.5) * spec.sinusoid_amplitude;
  }
  const bool named_network = spec.network_features == kSwatNetworkFeatures;
  std::vector<NetworkChannel> channels(spec.network_features);
  for (std::size_t g = 0; g < channels.size(); ++g) {
    auto& ch = channels[g];
    ch.name = named_network ? kNetworkNames[g] : "n" + std::to_string(g);
    ch.stage = g % kStages;
    ch.base = rng.uniform(10.0, 500.0);
    ch.spread = rng.uniform(1.0, 50.0);
    ch.coupling = rng.uniform(0.5, 1.0);
  }

  std::vector<std::size_t> analog;
  for (std::size_t f = 0; f < sensors.size(); ++f) {
    if (!sensors[f].actuator) analog.push_back(f);
  }
  const auto attacks = plan_attacks(spec, analog, rng);
  std::vector<int> labels(n, 0);
  std::vector<const AttackWindow*> active(n, nullptr);
  for (const auto& a : attacks) {
    for (std::size_t r = a.begin; r < a.end; ++r) {
      labels[r] = 1;
      active[r] = &a;
    }
  }

  SyntheticData out;
  auto& sensor = out.sensor;
  sensor.modality = Modality::sensor;
  for (const auto& ch : sensors) sensor.feature_names.push_back(ch.name);
  sensor.values = Matrix(n, spec.sensor_features);
  sensor.labels = labels;
  sensor.timestamps.resize(n);

  std::vector<double> shift(spec.sensor_features);
  for (std::size_t r = 0; r < n; ++r) {
    const double t = static_cast<double>(lead + r + 1);
    sensor.timestamps[r] = t;
    std::fill(shift.begin(), shift.end(), 0.0);
    const AttackWindow* attack = active[r];
    if (attack) {
      for (const auto& [f, dir] : attack->sensor_targets) shift[f] = dir * attack->sensor_strength;
    }
    for (std::size_t f = 0; f < sensors.size(); ++f) {
      const auto& ch = sensors[f];
      const double level = stage_signal(stages[ch.stage], t, duration, spec.sinusoid_amplitude);
      const double noise = spec.noise_level * rng.normal();
      double v;
      if (ch.actuator) {
        v = level + noise > ch.threshold ? 1.0 : 0.0;
      } else {
        v = ch.offset + ch.scale * (level + noise + shift[f] * spec.sinusoid_amplitude);
      }
      const bool missing = rng.uniform() < spec.missing_rate;
      sensor.values(r, f) = missing ? kMissing : v;
    }
  }

  auto& network = out.network;
  network.modality = Modality::network;
  for (const auto& ch : channels) network.feature_names.push_back(ch.name);
  const std::size_t intervals = lead + n;
  const std::size_t rows = intervals * ppt;
  network.values = Matrix(rows, spec.network_features);
  network.timestamps.resize(rows);
  network.labels.resize(rows);
  std::vector<double> net_shift(spec.network_features);
  for (std::size_t i = 0; i < intervals; ++i) {
    // Interval i covers (i, i + 1]; intervals at or after `lead` belong to sensor row i - lead.
    const AttackWindow* attack = i >= lead ? active[i - lead] : nullptr;
    std::fill(net_shift.begin(), net_shift.end(), 0.0);
    if (attack) {
      for (const auto& [g, dir] : attack->network_targets) net_shift[g] = dir * attack->network_strength;
    }
    for (std::size_t m = 0; m < ppt; ++m) {
      const std::size_t row = i * ppt + m;
      const double t = static_cast<double>(i) + static_cast<double>(m + 1) / static_cast<double>(ppt);
      network.timestamps[row] = t;
      network.labels[row] = attack ? 1 : 0;
      for (std::size_t g = 0; g < channels.size(); ++g) {
        const auto& ch = channels[g];
        const double level = stage_signal(stages[ch.stage], t, duration, spec.sinusoid_amplitude);
        const double jitter = 4.0 * spec.noise_level * rng.normal();
        const double v =
            ch.base + ch.spread * (ch.coupling * level + jitter + net_shift[g] * spec.sinusoid_amplitude);
        const bool missing = rng.uniform() < spec.missing_rate;
        network.values(row, g) = missing ? kMissing : v;
      }
    }
  }
  return out;
}

void write_synthetic(const SyntheticData& data, const SyntheticSpec& spec,
                     const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError(dir.string() + ": cannot create directory (" + ec.message() + ")");
  write_csv(data.sensor, dir / "sensor.csv");
  write_csv(data.network, dir / "network.csv");
  const auto attacks = std::count(data.sensor.labels.begin(), data.sensor.labels.end(), 1);
  nlohmann::ordered_json sidecar = {
      {"seed", spec.seed},
      {"spec", synthetic_spec_to_json(spec)},
      {"sensor_rows", data.sensor.row_count()},
      {"network_rows", data.network.row_count()},
      {"attack_fraction",
       static_cast<double>(attacks) / static_cast<double>(data.sensor.row_count())}};
  write_json_file(sidecar, dir / "spec.json");
}

}  // namespace mmids
