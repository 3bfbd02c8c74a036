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

#include "rffgam/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace rffgam::mixture {
namespace {

// Seed streams derived from the run seed.
constexpr std::uint64_t kValidationStream = 101;
constexpr std::uint64_t kFrequencyStream = 102;
constexpr std::uint64_t kAugmentStream = 103;
constexpr std::uint64_t kMixtureStream = 104;

bool mode_uses_rff(AblationMode mode) {
  return mode == AblationMode::kNone || mode == AblationMode::kLocalLinear;
}

std::vector<Index> columns_for(const PipelineConfig& config, Index num_inputs) {
  if (!config.feature_subset.empty()) return config.feature_subset;
  std::vector<Index> all(static_cast<std::size_t>(num_inputs));
  std::iota(all.begin(), all.end(), Index{0});
  return all;
}

// Clustering coordinates for inputs already restricted to the clustering
// columns.
Matrix cluster_space(AblationMode mode, const std::optional<rff::RffModel>& rff,
                     const latent::LatentProjector& projector,
                     const Standardizer& standardizer, const Matrix& x_cluster) {
  switch (mode) {
    case AblationMode::kRawCluster:
      return standardizer.apply(x_cluster);
    case AblationMode::kPcaInputCluster:
      return latent::project_rows(projector, standardizer.apply(x_cluster));
    case AblationMode::kNone:
    case AblationMode::kLocalLinear:
      return latent::project_inputs(projector, *rff, x_cluster);
  }
  return {};
}

std::vector<Index> count_members(const std::vector<Index>& assign,
                                 const std::vector<bool>& use, Index num) {
  std::vector<Index> sizes(static_cast<std::size_t>(num), 0);
  for (std::size_t i = 0; i < assign.size(); ++i) {
    if (use[i]) ++sizes[static_cast<std::size_t>(assign[i])];
  }
  return sizes;
}

}  // namespace

void validate(const PipelineConfig& c, Index num_inputs) {
  auto fail = [](const std::string& what) { throw ConfigurationError(what); };
  if (num_inputs < 1) fail("dataset has no feature columns");
  for (Index j : c.feature_subset) {
    if (j < 0 || j >= num_inputs) fail("feature subset index out of range");
  }
  const Index cluster_dim = c.feature_subset.empty()
                                ? num_inputs
                                : static_cast<Index>(c.feature_subset.size());
  if (c.num_features < 1) fail("K must be positive");
  if (c.sigma < 0.0 || !std::isfinite(c.sigma)) fail("sigma must be >= 0");
  if (!(c.lambda > 0.0)) fail("lambda must be positive");
  if (!(c.delta > 0.0)) fail("delta must be positive");
  if (c.resample_iters < 0) fail("resample_iters must be >= 0");
  if (!(c.validation_fraction > 0.0 && c.validation_fraction < 1.0)) {
    fail("validation_fraction must lie in (0, 1)");
  }
  if (c.latent_dim < 1) fail("d must be positive");
  if (c.num_clusters < 1) fail("L must be positive");
  if (mode_uses_rff(c.ablation) && c.latent_dim > c.num_features) {
    fail("d must not exceed K");
  }
  if (c.ablation == AblationMode::kPcaInputCluster && c.latent_dim > cluster_dim) {
    fail("d must not exceed the number of clustering columns");
  }
  if (c.n_knots < 2) fail("n_knots must be at least 2");
  if (c.degree < 1) fail("degree must be positive");
  if (!(c.smooth_lambda > 0.0)) fail("smooth_lambda must be positive");
  if (!(c.ridge_lambda > 0.0)) fail("ridge_lambda must be positive");
  if (c.min_cluster_size < 0) fail("min_cluster_size must be >= 0");
  if (c.em_max_iter < 1 || !(c.em_tol > 0.0)) fail("invalid EM settings");
  if (c.gam_max_sweeps < 1 || !(c.gam_tol > 0.0)) fail("invalid GAM settings");
  if (c.augment) {
    if (c.augmentation.n_per_point < 1) fail("augment_n must be positive");
    if (!(c.augmentation.epsilon > 0.0)) fail("augment_epsilon must be positive");
    if (!(c.augmentation.chi2_quantile > 0.0 && c.augmentation.chi2_quantile < 1.0)) {
      fail("augment_quantile must lie in (0, 1)");
    }
  }
}

Index effective_min_cluster_size(const PipelineConfig& config, Index num_inputs) {
  if (config.min_cluster_size > 0) return config.min_cluster_size;
  return std::max<Index>(50, 5 * num_inputs);
}

Vector LocalModel::predict(const Matrix& x) const {
  return kind == LocalKind::kGam ? gam::predict_gam(gam, x)
                                 : linear::predict_ridge(ridge, x);
}

bool MixtureModel::uses_rff() const { return mode_uses_rff(config.ablation); }

std::vector<Index> MixtureModel::clustering_columns() const {
  return columns_for(config, num_inputs);
}

Stage1Result fit_stage1(const Matrix& x, const Vector& y,
                        const PipelineConfig& config, Index max_latent_dim) {
  if (x.rows() == 0) throw InvalidArgument("training set is empty");
  if (x.rows() != y.size()) throw InvalidArgument("x and y lengths differ");
  if (!x.allFinite() || !y.allFinite()) {
    throw InvalidArgument("training data must be finite");
  }
  validate(config, x.cols());
  const std::vector<Index> cols = columns_for(config, x.cols());
  const Matrix x_cluster = select_cols(x, cols);

  Stage1Result out;
  if (mode_uses_rff(config.ablation) || config.augment) {
    const std::vector<Index> perm =
        random_permutation(x.rows(), mix_seed(config.seed, kValidationStream));
    const auto n_valid = static_cast<Index>(
        std::llround(config.validation_fraction * static_cast<double>(x.rows())));
    if (n_valid < 1 || n_valid >= x.rows()) {
      throw ConfigurationError("training set too small for a validation split");
    }
    const std::vector<Index> valid(perm.begin(), perm.begin() + n_valid);
    const std::vector<Index> fit(perm.begin() + n_valid, perm.end());
    rff::TrainValidationSplit split{select_rows(x_cluster, fit),
                                    select_rows(y, fit),
                                    select_rows(x_cluster, valid),
                                    select_rows(y, valid)};
    rff::ResampleSettings settings;
    settings.num_features = config.num_features;
    settings.sigma = config.sigma;
    settings.lambda = config.lambda;
    settings.lambda_scale = config.lambda_scale;
    settings.step_size = config.delta;
    settings.iterations = config.resample_iters;
    settings.walk = config.walk;
    settings.seed = mix_seed(config.seed, kFrequencyStream);
    rff::ResampleResult result = rff::resample_frequencies(split, settings);
    out.history = result.history;
    out.best_iteration = result.best_iteration;
    if (config.refit_full) {
      out.rff = rff::fit_rff(x_cluster, y, result.model.omega,
                             result.model.sigma, config.lambda,
                             config.lambda_scale);
    } else {
      out.rff = std::move(result.model);
    }
  }

  if (config.augment) {
    augment::AugmentConfig aug = config.augmentation;
    aug.seed = mix_seed(config.seed, kAugmentStream);
    const std::vector<Index> labeler_cols =
        config.feature_subset.empty() ? std::vector<Index>{} : cols;
    augment::AugmentedData data =
        augment::augment_dataset(x, y, *out.rff, labeler_cols, aug);
    out.x = std::move(data.x);
    out.y = std::move(data.y);
    out.is_synthetic = std::move(data.is_synthetic);
  } else {
    out.x = x;
    out.y = y;
    out.is_synthetic.assign(static_cast<std::size_t>(x.rows()), false);
  }

  const Matrix stage_cluster = select_cols(out.x, cols);
  const Index d = std::max(max_latent_dim, config.latent_dim);
  switch (config.ablation) {
    case AblationMode::kNone:
    case AblationMode::kLocalLinear:
      out.projector = latent::fit_pca(*out.rff, stage_cluster, d);
      break;
    case AblationMode::kPcaInputCluster:
      out.cluster_standardizer = Standardizer::fit(stage_cluster);
      out.projector =
          latent::fit_pca(out.cluster_standardizer.apply(stage_cluster), d);
      break;
    case AblationMode::kRawCluster:
      out.cluster_standardizer = Standardizer::fit(stage_cluster);
      break;
  }
  return out;
}

MixtureModel train_from_stage1(const Stage1Result& stage1,
                               const PipelineConfig& config) {
  validate(config, stage1.x.cols());
  MixtureModel model;
  model.config = config;
  model.num_inputs = stage1.x.cols();
  if (mode_uses_rff(config.ablation)) model.rff = stage1.rff;
  model.cluster_standardizer = stage1.cluster_standardizer;
  if (config.ablation != AblationMode::kRawCluster) {
    model.projector = latent::truncate(stage1.projector, config.latent_dim);
  }
  const std::vector<Index> cols = model.clustering_columns();
  const Matrix z =
      cluster_space(config.ablation, model.rff, model.projector,
                    model.cluster_standardizer, select_cols(stage1.x, cols));

  gmm::EmSettings em;
  em.max_iter = config.em_max_iter;
  em.tol = config.em_tol;
  em.seed = mix_seed(config.seed, kMixtureStream);
  gmm::GmmModel fitted = gmm::fit_em(z, config.num_clusters, em);

  // Rows that train local models.
  std::vector<bool> local_rows(stage1.is_synthetic.size(), true);
  if (config.augment && !config.augment_locals) {
    for (std::size_t i = 0; i < local_rows.size(); ++i) {
      local_rows[i] = !stage1.is_synthetic[i];
    }
  }

  const Index min_size = effective_min_cluster_size(config, model.num_inputs);
  std::vector<Index> assign = gmm::hard_assign(fitted, z);
  std::vector<Index> sizes =
      count_members(assign, local_rows, fitted.num_components());
  std::vector<Index> keep;
  for (Index l = 0; l < fitted.num_components(); ++l) {
    if (sizes[static_cast<std::size_t>(l)] >= min_size) keep.push_back(l);
  }
  if (keep.empty()) {
    throw ConfigurationError("every cluster has fewer than " +
                             std::to_string(min_size) + " training rows");
  }
  if (static_cast<Index>(keep.size()) < fitted.num_components()) {
    fitted = gmm::select_components(fitted, keep);
    assign = gmm::hard_assign(fitted, z);
    sizes = count_members(assign, local_rows, fitted.num_components());
  }
  model.gmm = std::move(fitted);
  model.kept_components = keep;
  model.cluster_sizes = sizes;

  gam::GamConfig gam_config;
  gam_config.n_knots = config.n_knots;
  gam_config.degree = config.degree;
  gam_config.smooth_lambda = config.smooth_lambda;
  gam_config.tol = config.gam_tol;
  gam_config.max_sweeps = config.gam_max_sweeps;
  for (Index l = 0; l < model.gmm.num_components(); ++l) {
    std::vector<Index> members;
    for (std::size_t i = 0; i < assign.size(); ++i) {
      if (local_rows[i] && assign[i] == l) members.push_back(static_cast<Index>(i));
    }
    const Matrix xl = select_rows(stage1.x, members);
    const Vector yl = select_rows(stage1.y, members);
    LocalModel local;
    if (config.ablation == AblationMode::kLocalLinear) {
      local.kind = LocalKind::kLinear;
      local.ridge = linear::fit_ridge(xl, yl, config.ridge_lambda);
    } else {
      local.kind = LocalKind::kGam;
      local.gam = gam::fit_gam(xl, yl, gam_config);
    }
    model.locals.push_back(std::move(local));
  }
  return model;
}

MixtureModel train_pipeline(const Matrix& x, const Vector& y,
                            const PipelineConfig& config) {
  return train_from_stage1(fit_stage1(x, y, config, config.latent_dim), config);
}

MixtureModel train_ablation(const Matrix& x, const Vector& y,
                            const PipelineConfig& config) {
  if (config.ablation == AblationMode::kNone) {
    throw InvalidArgument("train_ablation needs an ablation mode");
  }
  return train_pipeline(x, y, config);
}

Matrix latent_coordinates(const MixtureModel& model, const Matrix& x_raw) {
  if (x_raw.cols() != model.num_inputs) {
    throw InvalidArgument("model expects " + std::to_string(model.num_inputs) +
                          " input columns, got " + std::to_string(x_raw.cols()));
  }
  return cluster_space(model.config.ablation, model.rff, model.projector,
                       model.cluster_standardizer,
                       select_cols(x_raw, model.clustering_columns()));
}

Matrix mixture_responsibilities(const MixtureModel& model, const Matrix& x_raw) {
  return gmm::responsibilities(model.gmm, latent_coordinates(model, x_raw));
}

Matrix local_predictions(const MixtureModel& model, const Matrix& x_raw) {
  if (x_raw.cols() != model.num_inputs) {
    throw InvalidArgument("model expects " + std::to_string(model.num_inputs) +
                          " input columns, got " + std::to_string(x_raw.cols()));
  }
  Matrix f(x_raw.rows(), static_cast<Index>(model.locals.size()));
  for (std::size_t l = 0; l < model.locals.size(); ++l) {
    f.col(static_cast<Index>(l)) = model.locals[l].predict(x_raw);
  }
  return f;
}

Vector predict_mixture(const MixtureModel& model, const Matrix& x_raw) {
  const Matrix gamma = mixture_responsibilities(model, x_raw);
  const Matrix f = local_predictions(model, x_raw);
  return gamma.cwiseProduct(f).rowwise().sum();
}

std::vector<ClusterGroup> spatial_cluster_report(const MixtureModel& model,
                                                 const Matrix& x_raw) {
  if (model.config.feature_subset.size() != 2) {
    throw InvalidArgument(
        "spatial report needs a feature subset of two coordinate columns");
  }
  const std::vector<Index> assign =
      gmm::hard_assign(model.gmm, latent_coordinates(model, x_raw));
  std::vector<ClusterGroup> groups(static_cast<std::size_t>(model.gmm.num_components()));
  for (std::size_t l = 0; l < groups.size(); ++l) {
    groups[l].cluster = static_cast<Index>(l);
  }
  for (std::size_t i = 0; i < assign.size(); ++i) {
    groups[static_cast<std::size_t>(assign[i])].rows.push_back(static_cast<Index>(i));
  }
  return groups;
}

}  // namespace rffgam::mixture
