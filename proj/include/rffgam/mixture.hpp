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

#ifndef RFFGAM_MIXTURE_HPP_
#define RFFGAM_MIXTURE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rffgam/augment.hpp"
#include "rffgam/common.hpp"
#include "rffgam/gam.hpp"
#include "rffgam/gmm.hpp"
#include "rffgam/latent.hpp"
#include "rffgam/preprocessing.hpp"
#include "rffgam/rff.hpp"
#include "rffgam/ridge.hpp"

namespace rffgam::mixture {

// kNone:            RFF -> PCA -> GMM clustering, local GAMs.
// kRawCluster:      GMM on standardized inputs, local GAMs.
// kPcaInputCluster: GMM on a d-dimensional PCA of standardized inputs.
// kLocalLinear:     RFF clustering with ridge-regularized linear local models.
enum class AblationMode { kNone, kRawCluster, kPcaInputCluster, kLocalLinear };

struct PipelineConfig {
  // Stage 1.
  Index num_features = 4000;
  double sigma = 0.0;  // <= 0 selects sqrt(p) of the clustering inputs.
  double lambda = 0.32;
  rff::LambdaScale lambda_scale = rff::LambdaScale::kPerFeature;
  rff::WalkShape walk = rff::WalkShape::kFrequencyCovariance;
  double delta = 0.3;
  int resample_iters = 50;
  // Share of the training rows held out to rank resampling iterates.
  double validation_fraction = 0.2;
  // Refit beta on all training rows with the selected frequencies.
  bool refit_full = true;
  // Stage 2.
  Index latent_dim = 2;
  Index num_clusters = 8;
  double em_tol = 1e-6;
  int em_max_iter = 500;
  // Stage 3.
  int n_knots = 30;
  int degree = 3;
  double smooth_lambda = 1.0;
  double gam_tol = 1e-7;
  int gam_max_sweeps = 100;
  // 0 selects max(50, 5 p).
  Index min_cluster_size = 0;
  AblationMode ablation = AblationMode::kNone;
  double ridge_lambda = 1e-3;
  // Columns feeding the RFF and clustering stages; empty means all.
  std::vector<Index> feature_subset;
  // Perturbation augmentation after Stage 1.
  bool augment = false;
  bool augment_locals = true;
  augment::AugmentConfig augmentation;
  std::uint64_t seed = 0;
};

void validate(const PipelineConfig& config, Index num_inputs);
Index effective_min_cluster_size(const PipelineConfig& config, Index num_inputs);

enum class LocalKind { kGam, kLinear };

struct LocalModel {
  LocalKind kind = LocalKind::kGam;
  gam::GamModel gam;
  linear::RidgeModel ridge;

  Vector predict(const Matrix& x) const;
};

struct MixtureModel {
  PipelineConfig config;
  Index num_inputs = 0;
  // Present unless clustering runs on raw inputs.
  std::optional<rff::RffModel> rff;
  latent::LatentProjector projector;
  // Standardizer of the clustering inputs for the raw/PCA-input ablations.
  Standardizer cluster_standardizer;
  gmm::GmmModel gmm;
  std::vector<LocalModel> locals;
  // Original GMM component index of each surviving component.
  std::vector<Index> kept_components;
  std::vector<Index> cluster_sizes;
  // Input schema, recorded by callers that know column names.
  std::vector<std::string> feature_names;
  std::string target_name;

  bool uses_rff() const;
  std::vector<Index> clustering_columns() const;
};

// Work shared by every (L, d) cell of a grid: the Stage-1 model, the optional
// augmented training set, and a projector with enough leading directions.
struct Stage1Result {
  std::optional<rff::RffModel> rff;
  std::vector<rff::ResampleRecord> history;
  int best_iteration = 0;
  Matrix x;
  Vector y;
  std::vector<bool> is_synthetic;
  Standardizer cluster_standardizer;
  latent::LatentProjector projector;
};

Stage1Result fit_stage1(const Matrix& x, const Vector& y,
                        const PipelineConfig& config, Index max_latent_dim);

MixtureModel train_from_stage1(const Stage1Result& stage1,
                               const PipelineConfig& config);

MixtureModel train_pipeline(const Matrix& x, const Vector& y,
                            const PipelineConfig& config);

// train_pipeline restricted to the ablation modes.
MixtureModel train_ablation(const Matrix& x, const Vector& y,
                            const PipelineConfig& config);

// Latent coordinates h(x) the GMM operates on.
Matrix latent_coordinates(const MixtureModel& model, const Matrix& x_raw);
// N x L responsibilities over the surviving components.
Matrix mixture_responsibilities(const MixtureModel& model, const Matrix& x_raw);
// N x L predictions of each local model.
Matrix local_predictions(const MixtureModel& model, const Matrix& x_raw);
Vector predict_mixture(const MixtureModel& model, const Matrix& x_raw);

struct ClusterGroup {
  Index cluster = 0;
  std::vector<Index> rows;
};

// Hard assignment of each row, grouped by surviving component. Requires a
// two-column feature subset.
std::vector<ClusterGroup> spatial_cluster_report(const MixtureModel& model,
                                                 const Matrix& x_raw);

}  // namespace rffgam::mixture

#endif  // RFFGAM_MIXTURE_HPP_
