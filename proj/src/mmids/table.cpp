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

#include "mmids/table.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "mmids/error.hpp"

namespace mmids {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      return cells;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

bool parse_double(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(out);
}

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
  throw DataError(path.string() + ": " + what);
}

}  // namespace

std::string_view to_string(Modality modality) {
  return modality == Modality::sensor ? "sensor" : "network";
}

std::size_t RawModalityTable::missing_count() const {
  const auto v = values.values();
  return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), is_missing));
}

void RawModalityTable::validate() const {
  if (values.rows() != timestamps.size() || values.cols() != feature_names.size()) {
    throw ShapeError(std::string(to_string(modality)) + " table: values " + values.shape() +
                     " disagree with " + std::to_string(timestamps.size()) + " timestamps and " +
                     std::to_string(feature_names.size()) + " features");
  }
  if (!labels.empty() && labels.size() != timestamps.size()) {
    throw ShapeError(std::string(to_string(modality)) + " table: label count mismatch");
  }
  if (!std::is_sorted(timestamps.begin(), timestamps.end())) {
    throw DataError(std::string(to_string(modality)) + " table: timestamps are not sorted");
  }
  for (int label : labels) {
    if (label != 0 && label != 1) throw DataError("labels must be 0 or 1");
  }
}

RawModalityTable ingest_csv(const std::filesystem::path& path, Modality modality,
                            std::size_t expected_feature_count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open file");

  std::string line;
  if (!std::getline(in, line)) fail(path, "missing header row");
  if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto header = split_cells(line);
  if (header.empty() || header.front() != "timestamp") {
    fail(path, "first column must be 'timestamp'");
  }
  const bool has_label = header.size() > 1 && header.back() == "label";
  const std::size_t feature_count = header.size() - 1 - (has_label ? 1 : 0);
  if (feature_count != expected_feature_count) {
    fail(path, "expected " + std::to_string(expected_feature_count) + " " +
                   std::string(to_string(modality)) + " feature columns, found " +
                   std::to_string(feature_count));
  }

  RawModalityTable table;
  table.modality = modality;
  std::set<std::string, std::less<>> seen;
  for (std::size_t c = 1; c <= feature_count; ++c) {
    if (header[c].empty()) fail(path, "empty feature name in header column " + std::to_string(c + 1));
    if (!seen.emplace(header[c]).second) {
      fail(path, "duplicate feature name '" + std::string(header[c]) + "'");
    }
    table.feature_names.emplace_back(header[c]);
  }

  std::vector<double> cells;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto row = split_cells(line);
    if (row.size() != header.size()) {
      fail(path, "row " + std::to_string(line_no) + " has " + std::to_string(row.size()) +
                     " cells, header has " + std::to_string(header.size()));
    }
    double ts = 0.0;
    if (!parse_double(row[0], ts)) {
      fail(path, "row " + std::to_string(line_no) + ", column 'timestamp': cannot parse '" +
                     std::string(row[0]) + "'");
    }
    if (!table.timestamps.empty() && ts < table.timestamps.back()) {
      fail(path, "row " + std::to_string(line_no) + ": timestamp " + std::string(row[0]) +
                     " precedes the previous row (timestamps must be nondecreasing)");
    }
    table.timestamps.push_back(ts);
    for (std::size_t c = 1; c <= feature_count; ++c) {
      double v = kMissing;
      if (!row[c].empty() && !parse_double(row[c], v)) {
        fail(path, "row " + std::to_string(line_no) + ", column '" + table.feature_names[c - 1] +
                       "': cannot parse '" + std::string(row[c]) + "'");
      }
      cells.push_back(v);
    }
    if (has_label) {
      const auto cell = row.back();
      if (cell != "0" && cell != "1") {
        fail(path, "row " + std::to_string(line_no) + ", column 'label': expected 0 or 1, got '" +
                       std::string(cell) + "'");
      }
      table.labels.push_back(cell == "1" ? 1 : 0);
    }
  }
  table.values = Matrix(table.timestamps.size(), feature_count, std::move(cells));
  return table;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_csv(const RawModalityTable& table, const std::filesystem::path& path) {
  table.validate();
  std::ostringstream out;
  out << "timestamp";
  for (const auto& name : table.feature_names) out << ',' << name;
  if (table.has_labels()) out << ",label";
  out << '\n';
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    out << format_double(table.timestamps[r]);
    for (double v : table.values.row(r)) {
      out << ',';
      if (!is_missing(v)) out << format_double(v);
    }
    if (table.has_labels()) out << ',' << table.labels[r];
    out << '\n';
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw DataError(path.string() + ": cannot open for writing");
  file << out.str();
  if (!file) throw DataError(path.string() + ": write failed");
}

}  // namespace mmids
