/*
 * Copyright 2026 The rffgam Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "rffgam/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace rffgam::io {
namespace {

constexpr std::size_t kMaxDroppedLines = 20;

std::vector<std::string> split(const std::string& line, char delimiter) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, delimiter)) out.push_back(field);
  if (!line.empty() && line.back() == delimiter) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\"");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* begin = t.data();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size() && std::isfinite(out);
}

}  // namespace

CsvTable read_csv(const std::string& path, char delimiter) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open data file '" + path + "'");
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) {
    throw ConfigurationError("data file '" + path + "' has no header row");
  }
  for (const std::string& name : split(line, delimiter)) {
    table.header.push_back(trim(name));
  }
  const std::size_t width = table.header.size();
  std::vector<double> data;
  Index kept = 0;
  Index line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++table.rows_read;
    const std::vector<std::string> fields = split(line, delimiter);
    bool ok = fields.size() == width;
    std::vector<double> row(width);
    for (std::size_t j = 0; ok && j < width; ++j) ok = parse_double(fields[j], row[j]);
    if (!ok) {
      ++table.rows_dropped;
      if (table.dropped_lines.size() < kMaxDroppedLines) {
        table.dropped_lines.push_back(line_no);
      }
      continue;
    }
    data.insert(data.end(), row.begin(), row.end());
    ++kept;
  }
  table.values.resize(kept, static_cast<Index>(width));
  for (Index i = 0; i < kept; ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      table.values(i, static_cast<Index>(j)) =
          data[static_cast<std::size_t>(i) * width + j];
    }
  }
  return table;
}

std::vector<Index> column_indices(const std::vector<std::string>& header,
                                  const std::vector<std::string>& names) {
  std::vector<Index> out;
  for (const std::string& name : names) {
    Index found = -1;
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] == name) {
        found = static_cast<Index>(j);
        break;
      }
    }
    if (found < 0) throw ConfigurationError("column '" + name + "' not found");
    out.push_back(found);
  }
  return out;
}

Dataset to_dataset(const CsvTable& table, const std::string& path,
                   const std::string& target,
                   const std::vector<std::string>& features) {
  Dataset ds;
  ds.path = path;
  ds.target_name = target;
  const Index target_col = column_indices(table.header, {target}).front();
  std::vector<Index> cols;
  if (features.empty()) {
    for (std::size_t j = 0; j < table.header.size(); ++j) {
      if (static_cast<Index>(j) != target_col) {
        cols.push_back(static_cast<Index>(j));
        ds.feature_names.push_back(table.header[j]);
      }
    }
  } else {
    cols = column_indices(table.header, features);
    for (Index c : cols) {
      if (c == target_col) {
        throw ConfigurationError("target column '" + target +
                                 "' cannot also be a feature");
      }
    }
    ds.feature_names = features;
  }
  if (cols.empty()) throw ConfigurationError("no feature columns in '" + path + "'");
  ds.x = select_cols(table.values, cols);
  ds.y = table.values.col(target_col);
  ds.rows_read = table.rows_read;
  ds.rows_kept = table.values.rows();
  ds.rows_dropped = table.rows_dropped;
  return ds;
}

Dataset read_dataset(const std::string& path, const std::string& target,
                     char delimiter, const std::vector<std::string>& features) {
  return to_dataset(read_csv(path, delimiter), path, target, features);
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Matrix& values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigurationError("cannot open '" + path + "' for writing");
  for (std::size_t j = 0; j < header.size(); ++j) {
    out << (j ? "," : "") << header[j];
  }
  out << '\n';
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) {
      out << (j ? "," : "") << format_double(values(i, j));
    }
    out << '\n';
  }
  if (!out) throw ConfigurationError("failed writing '" + path + "'");
}

}  // namespace rffgam::io
