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

#include "rffgam/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "rffgam/io.hpp"
#include "rffgam/serialize.hpp"

namespace rffgam::config {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* begin = value.data();
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigurationError("invalid value '" + value + "' for key '" + key + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigurationError("invalid boolean '" + value + "' for key '" + key + "'");
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigurationError("line " + std::to_string(line_no) +
                               ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw ConfigurationError("line " + std::to_string(line_no) + ": empty key");
    }
    if (!kv.emplace(key, value).second) {
      throw ConfigurationError("duplicate key '" + key + "'");
    }
  }
  return kv;
}

std::vector<Index> parse_index_list(const std::string& text) {
  std::vector<Index> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const auto lo = parse_number<Index>(text, trim(text.substr(0, dots)));
    const auto hi = parse_number<Index>(text, trim(text.substr(dots + 2)));
    if (hi < lo) throw ConfigurationError("empty range '" + text + "'");
    for (Index v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  for (const std::string& item : split_list(text)) {
    out.push_back(parse_number<Index>(text, item));
  }
  if (out.empty()) throw ConfigurationError("empty list '" + text + "'");
  return out;
}

RunConfig from_key_values(const std::map<std::string, std::string>& kv,
                          const std::string& base_dir) {
  RunConfig run;
  mixture::PipelineConfig& p = run.pipeline;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"data", [&](auto&, auto& v) { run.data_path = v; }},
      {"target", [&](auto&, auto& v) { run.target = v; }},
      {"features", [&](auto&, auto& v) { run.features = split_list(v); }},
      {"feature_subset", [&](auto&, auto& v) { run.feature_subset = split_list(v); }},
      {"out_dir", [&](auto&, auto& v) { run.out_dir = v; }},
      {"delimiter",
       [&](auto& k, auto& v) {
         if (v == "tab" || v == "\\t") {
           run.delimiter = '\t';
         } else if (v.size() == 1) {
           run.delimiter = v[0];
         } else {
           throw ConfigurationError("invalid value '" + v + "' for key '" + k + "'");
         }
       }},
      {"train_fraction", [&](auto& k, auto& v) { run.train_fraction = parse_number<double>(k, v); }},
      {"bootstrap_resamples", [&](auto& k, auto& v) { run.bootstrap_resamples = parse_number<int>(k, v); }},
      {"mc_repeats", [&](auto& k, auto& v) { run.mc_repeats = parse_number<int>(k, v); }},
      {"grid_L", [&](auto&, auto& v) { run.grid_l = parse_index_list(v); }},
      {"grid_d", [&](auto&, auto& v) { run.grid_d = parse_index_list(v); }},
      {"pd_grid_size", [&](auto& k, auto& v) { run.pd_grid_size = parse_number<Index>(k, v); }},
      {"pd_clip", [&](auto& k, auto& v) { run.pd_clip = parse_bool(k, v); }},
      {"category_column", [&](auto&, auto& v) { run.category_column = v; }},
      {"K", [&](auto& k, auto& v) { p.num_features = parse_number<Index>(k, v); }},
      {"sigma", [&](auto& k, auto& v) { p.sigma = parse_number<double>(k, v); }},
      {"lambda", [&](auto& k, auto& v) { p.lambda = parse_number<double>(k, v); }},
      {"lambda_scale", [&](auto&, auto& v) { p.lambda_scale = serialize::parse_lambda_scale(v); }},
      {"walk", [&](auto&, auto& v) { p.walk = serialize::parse_walk(v); }},
      {"delta", [&](auto& k, auto& v) { p.delta = parse_number<double>(k, v); }},
      {"resample_iters", [&](auto& k, auto& v) { p.resample_iters = parse_number<int>(k, v); }},
      {"validation_fraction", [&](auto& k, auto& v) { p.validation_fraction = parse_number<double>(k, v); }},
      {"refit_full", [&](auto& k, auto& v) { p.refit_full = parse_bool(k, v); }},
      {"d", [&](auto& k, auto& v) { p.latent_dim = parse_number<Index>(k, v); }},
      {"L", [&](auto& k, auto& v) { p.num_clusters = parse_number<Index>(k, v); }},
      {"em_tol", [&](auto& k, auto& v) { p.em_tol = parse_number<double>(k, v); }},
      {"em_max_iter", [&](auto& k, auto& v) { p.em_max_iter = parse_number<int>(k, v); }},
      {"n_knots", [&](auto& k, auto& v) { p.n_knots = parse_number<int>(k, v); }},
      {"degree", [&](auto& k, auto& v) { p.degree = parse_number<int>(k, v); }},
      {"smooth_lambda", [&](auto& k, auto& v) { p.smooth_lambda = parse_number<double>(k, v); }},
      {"gam_tol", [&](auto& k, auto& v) { p.gam_tol = parse_number<double>(k, v); }},
      {"gam_max_sweeps", [&](auto& k, auto& v) { p.gam_max_sweeps = parse_number<int>(k, v); }},
      {"min_cluster_size", [&](auto& k, auto& v) { p.min_cluster_size = parse_number<Index>(k, v); }},
      {"ablation", [&](auto&, auto& v) { p.ablation = serialize::parse_ablation(v); }},
      {"ridge_lambda", [&](auto& k, auto& v) { p.ridge_lambda = parse_number<double>(k, v); }},
      {"augment", [&](auto& k, auto& v) { p.augment = parse_bool(k, v); }},
      {"augment_locals", [&](auto& k, auto& v) { p.augment_locals = parse_bool(k, v); }},
      {"augment_n", [&](auto& k, auto& v) { p.augmentation.n_per_point = parse_number<int>(k, v); }},
      {"augment_epsilon", [&](auto& k, auto& v) { p.augmentation.epsilon = parse_number<double>(k, v); }},
      {"augment_quantile", [&](auto& k, auto& v) { p.augmentation.chi2_quantile = parse_number<double>(k, v); }},
      {"seed", [&](auto& k, auto& v) { p.seed = parse_number<std::uint64_t>(k, v); }},
  };
  for (const auto& [key, value] : kv) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigurationError("unknown config key '" + key + "'");
    try {
      it->second(key, value);
    } catch (const InvalidArgument& e) {
      throw ConfigurationError("key '" + key + "': " + e.what());
    }
  }
  for (const char* required : {"data", "target"}) {
    if (!kv.count(required)) {
      throw ConfigurationError(std::string("missing required key '") + required + "'");
    }
  }
  namespace fs = std::filesystem;
  const fs::path data(run.data_path);
  if (data.is_relative() && !fs::exists(data)) {
    run.data_path = (fs::path(base_dir) / data).lexically_normal().string();
  }
  if (!(run.train_fraction > 0.0 && run.train_fraction < 1.0)) {
    throw ConfigurationError("train_fraction must lie in (0, 1)");
  }
  if (run.bootstrap_resamples < 1) throw ConfigurationError("bootstrap_resamples must be positive");
  if (run.mc_repeats < 2) throw ConfigurationError("mc_repeats must be at least 2");
  if (run.pd_grid_size < 2) throw ConfigurationError("pd_grid_size must be at least 2");
  return run;
}

RunConfig load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string dir =
      std::filesystem::path(path).parent_path().string();
  return from_key_values(parse_key_values(buffer.str()), dir.empty() ? "." : dir);
}

void bind_feature_subset(RunConfig& run,
                         const std::vector<std::string>& feature_names) {
  run.pipeline.feature_subset.clear();
  if (run.feature_subset.empty()) return;
  std::set<Index> seen;
  for (Index idx : io::column_indices(feature_names, run.feature_subset)) {
    if (!seen.insert(idx).second) {
      throw ConfigurationError("feature_subset lists a column twice");
    }
    run.pipeline.feature_subset.push_back(idx);
  }
}

}  // namespace rffgam::config
