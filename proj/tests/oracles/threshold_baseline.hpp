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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

struct SweepResult {
  double margin = 0.0;
  double train_f1 = 0.0;
  double test_f1 = 0.0;
};

inline double f1_of(const std::vector<int>& truth, const std::vector<int>& flagged) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    tp += truth[i] == 1 && flagged[i] == 1;
    fp += truth[i] == 0 && flagged[i] == 1;
    fn += truth[i] == 1 && flagged[i] == 0;
  }
  return tp == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

// Per-feature band detector. Each feature gets the band [lo - m * range,
// hi + m * range] of its normal training rows; a row is flagged when any
// feature leaves its band. The margin m is picked by brute force on the
// training rows, then scored on the rest. Rows are complete feature vectors.
inline SweepResult threshold_sweep(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                                   std::size_t train_rows) {
  const std::size_t d = rows.front().size();
  std::vector<double> lo(d, INFINITY), hi(d, -INFINITY);
  for (std::size_t r = 0; r < train_rows; ++r) {
    if (labels[r] != 0) continue;
    for (std::size_t f = 0; f < d; ++f) {
      lo[f] = std::min(lo[f], rows[r][f]);
      hi[f] = std::max(hi[f], rows[r][f]);
    }
  }
  const auto flag = [&](std::size_t begin, std::size_t end, double m) {
    std::vector<int> out;
    for (std::size_t r = begin; r < end; ++r) {
      int hit = 0;
      for (std::size_t f = 0; f < d && !hit; ++f) {
        const double range = hi[f] - lo[f];
        hit = rows[r][f] < lo[f] - m * range || rows[r][f] > hi[f] + m * range;
      }
      out.push_back(hit);
    }
    return out;
  };
  const std::vector<int> train_truth(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(train_rows));
  const std::vector<int> test_truth(labels.begin() + static_cast<std::ptrdiff_t>(train_rows), labels.end());
  SweepResult best{0.0, -1.0, 0.0};
  for (int step = 0; step <= 60; ++step) {
    const double m = -0.2 + 0.02 * step;
    const double f1 = f1_of(train_truth, flag(0, train_rows, m));
    if (f1 > best.train_f1) best = {m, f1, 0.0};
  }
  best.test_f1 = f1_of(test_truth, flag(train_rows, rows.size(), best.margin));
  return best;
}

}  // namespace oracle
