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

#ifndef RFFGAM_IO_HPP_
#define RFFGAM_IO_HPP_

#include <string>
#include <vector>

#include "rffgam/common.hpp"

namespace rffgam::io {

// Numeric table read from a delimited text file with a header row. Rows with
// a missing or unparseable field are dropped, never imputed.
struct CsvTable {
  std::vector<std::string> header;
  Matrix values;
  Index rows_read = 0;
  Index rows_dropped = 0;
  // 1-based line numbers of dropped rows (first few only).
  std::vector<Index> dropped_lines;
};

CsvTable read_csv(const std::string& path, char delimiter = ',');

struct Dataset {
  std::string path;
  std::vector<std::string> feature_names;
  std::string target_name;
  Matrix x;
  Vector y;
  Index rows_read = 0;
  Index rows_kept = 0;
  Index rows_dropped = 0;
};

// Splits a table into features and target. `features` selects and orders the
// feature columns; empty means every column except the target.
Dataset to_dataset(const CsvTable& table, const std::string& path,
                   const std::string& target,
                   const std::vector<std::string>& features = {});

Dataset read_dataset(const std::string& path, const std::string& target,
                     char delimiter = ',',
                     const std::vector<std::string>& features = {});

// Position of each name in `header`; throws ConfigurationError naming the
// first missing column.
std::vector<Index> column_indices(const std::vector<std::string>& header,
                                  const std::vector<std::string>& names);

// Writes a header and rows of doubles, each in its shortest round-trip form.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Matrix& values);

std::string format_double(double value);

}  // namespace rffgam::io

#endif  // RFFGAM_IO_HPP_
