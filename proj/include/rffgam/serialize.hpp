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

#ifndef RFFGAM_SERIALIZE_HPP_
#define RFFGAM_SERIALIZE_HPP_

#include <string>

#include "rffgam/mixture.hpp"

namespace rffgam::serialize {

inline constexpr int kSchemaVersion = 1;

std::string to_string(mixture::AblationMode mode);
std::string to_string(rff::LambdaScale scale);
std::string to_string(rff::WalkShape shape);
mixture::AblationMode parse_ablation(const std::string& name);
rff::LambdaScale parse_lambda_scale(const std::string& name);
rff::WalkShape parse_walk(const std::string& name);

// Self-describing JSON document. Every double is written with the shortest
// decimal form that reads back to the identical value.
std::string model_to_json(const mixture::MixtureModel& model);
mixture::MixtureModel model_from_json(const std::string& text);

std::string config_to_json(const mixture::PipelineConfig& config);

void save_model(const mixture::MixtureModel& model, const std::string& path);
mixture::MixtureModel load_model(const std::string& path);

}  // namespace rffgam::serialize

#endif  // RFFGAM_SERIALIZE_HPP_
