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

#ifndef RFFGAM_CONFIG_HPP_
#define RFFGAM_CONFIG_HPP_

#include <map>
#include <string>
#include <vector>

#include "rffgam/mixture.hpp"

namespace rffgam::config {

// Everything a CLI run needs, read from a flat `key = value` file. Lines
// starting with '#' are comments. Unknown keys are rejected.
struct RunConfig {
  std::string data_path;
  std::string target;
  // Feature columns in order; empty means every non-target column.
  std::vector<std::string> features;
  // Columns feeding the RFF and clustering stages.
  std::vector<std::string> feature_subset;
  std::string out_dir = ".";
  char delimiter = ',';
  double train_fraction = 0.8;
  int bootstrap_resamples = 1000;
  int mc_repeats = 100;
  std::vector<Index> grid_l;
  std::vector<Index> grid_d;
  Index pd_grid_size = 50;
  bool pd_clip = true;
  // Column whose integer value defines responsibility-profile categories.
  std::string category_column;
  mixture::PipelineConfig pipeline;
};

// Parses `key = value` pairs; duplicate keys are an error.
std::map<std::string, std::string> parse_key_values(const std::string& text);

// Builds a RunConfig. `base_dir` resolves a relative data path that does not
// exist relative to the working directory.
RunConfig from_key_values(const std::map<std::string, std::string>& kv,
                          const std::string& base_dir = ".");

RunConfig load(const std::string& path);

// Resolves feature_subset names against the dataset feature names.
void bind_feature_subset(RunConfig& run,
                         const std::vector<std::string>& feature_names);

// "3..8" or "2,4,8".
std::vector<Index> parse_index_list(const std::string& text);

}  // namespace rffgam::config

#endif  // RFFGAM_CONFIG_HPP_
