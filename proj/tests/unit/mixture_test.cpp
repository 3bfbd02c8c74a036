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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rffgam/gam.hpp"
#include "rffgam/gmm.hpp"
#include "rffgam/latent.hpp"
#include "rffgam/mixture.hpp"
#include "rffgam/preprocessing.hpp"
#include "rffgam/rff.hpp"
#include "rffgam/serialize.hpp"
#include "test_support.hpp"

namespace rffgam::mixture {
namespace {

using testing::gaussian_matrix;

struct Problem {
  Matrix x;
  Vector y;
};

// Two regimes separated along the first two columns.
Problem regime_problem(Index n, std::uint64_t seed) {
  Problem p;
  p.x = gaussian_matrix(n, 3, seed);
  p.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double a = p.x(i, 0);
    const double b = p.x(i, 1);
    p.y(i) = (a + b > 0.0 ? std::sin(2.0 * a) : 0.5 * b * b) + 0.2 * p.x(i, 2);
  }
  p.y += gaussian_matrix(n, 1, seed + 1, 0.05).col(0);
  return p;
}

PipelineConfig small_config() {
  PipelineConfig c;
  c.num_features = 80;
  c.resample_iters = 2;
  c.latent_dim = 2;
  c.num_clusters = 3;
  c.n_knots = 8;
  c.min_cluster_size = 30;
  c.seed = 5;
  return c;
}

TEST(TrainPipeline, SingleClusterEqualsGlobalGam) {
  const Problem p = regime_problem(500, 1);
  PipelineConfig c = small_config();
  c.num_clusters = 1;
  const MixtureModel model = train_pipeline(p.x, p.y, c);
  gam::GamConfig gc;
  gc.n_knots = c.n_knots;
  gc.smooth_lambda = c.smooth_lambda;
  gc.tol = c.gam_tol;
  gc.max_sweeps = c.gam_max_sweeps;
  const gam::GamModel global = gam::fit_gam(p.x, p.y, gc);
  const Matrix x_test = gaussian_matrix(200, 3, 2, 1.5);
  EXPECT_LE((predict_mixture(model, x_test) - gam::predict_gam(global, x_test))
                .cwiseAbs()
                .maxCoeff(),
            1e-10);
}

TEST(PredictMixture, MatchesStepByStepComposition) {
  const Problem p = regime_problem(600, 3);
  const MixtureModel model = train_pipeline(p.x, p.y, small_config());
  const Matrix x = gaussian_matrix(5, 3, 4);
  const Vector got = predict_mixture(model, x);
  const Matrix s = rff::intermediate_features(*model.rff, x);
  for (Index i = 0; i < 5; ++i) {
    const Vector h = model.projector.v_d * (s.row(i).transpose() - model.projector.s_mean);
    const Vector gamma = gmm::responsibilities(model.gmm, h);
    double sum = 0.0;
    for (std::size_t l = 0; l < model.locals.size(); ++l) {
      sum += gamma(static_cast<Index>(l)) *
             gam::predict_gam(model.locals[l].gam, Matrix(x.row(i)))(0);
    }
    EXPECT_NEAR(got(i), sum, 1e-10);
  }
}

TEST(PredictMixture, StaysWithinLocalPredictions) {
  const Problem p = regime_problem(600, 6);
  const MixtureModel model = train_pipeline(p.x, p.y, small_config());
  const Matrix x = gaussian_matrix(1000, 3, 7, 2.5);
  const Vector pred = predict_mixture(model, x);
  const Matrix f = local_predictions(model, x);
  for (Index i = 0; i < x.rows(); ++i) {
    EXPECT_GE(pred(i), f.row(i).minCoeff() - 1e-12);
    EXPECT_LE(pred(i), f.row(i).maxCoeff() + 1e-12);
  }
}

TEST(PredictMixture, IdenticalLocalsGiveThatModel) {
  const Problem p = regime_problem(600, 8);
  MixtureModel model = train_pipeline(p.x, p.y, small_config());
  for (auto& local : model.locals) local = model.locals.front();
  const Matrix x = gaussian_matrix(50, 3, 9);
  EXPECT_LE((predict_mixture(model, x) - model.locals.front().predict(x))
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
  EXPECT_THROW(predict_mixture(model, Matrix::Zero(2, 2)), InvalidArgument);
}

TEST(TrainPipeline, ClusterSizesPartitionTrainingRows) {
  const Problem p = regime_problem(700, 10);
  const MixtureModel model = train_pipeline(p.x, p.y, small_config());
  EXPECT_EQ(model.locals.size(), static_cast<std::size_t>(model.gmm.num_components()));
  EXPECT_EQ(std::accumulate(model.cluster_sizes.begin(), model.cluster_sizes.end(),
                            Index{0}),
            700);
  const Matrix gamma = mixture_responsibilities(model, p.x);
  EXPECT_LE((gamma.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
}

TEST(TrainPipeline, SmallClustersAreDropped) {
  const Problem p = regime_problem(400, 11);
  PipelineConfig c = small_config();
  c.num_clusters = 6;
  c.min_cluster_size = 1;
  const MixtureModel all = train_pipeline(p.x, p.y, c);
  ASSERT_EQ(all.gmm.num_components(), 6);
  const Index largest =
      *std::max_element(all.cluster_sizes.begin(), all.cluster_sizes.end());
  const Index smallest =
      *std::min_element(all.cluster_sizes.begin(), all.cluster_sizes.end());
  ASSERT_LT(smallest, largest);
  // Same seed gives the same EM fit, so only the largest clusters survive.
  c.min_cluster_size = largest;
  const MixtureModel model = train_pipeline(p.x, p.y, c);
  EXPECT_LT(model.gmm.num_components(), 6);
  EXPECT_EQ(model.kept_components.size(), model.locals.size());
  EXPECT_NEAR(model.gmm.weights.sum(), 1.0, 1e-12);
  for (Index size : model.cluster_sizes) EXPECT_GE(size, 1);
  EXPECT_TRUE(predict_mixture(model, p.x).allFinite());
  c.min_cluster_size = 1000;
  EXPECT_THROW(train_pipeline(p.x, p.y, c), ConfigurationError);
}

TEST(TrainPipeline, DeterministicSerializedBytes) {
  const Problem p = regime_problem(400, 12);
  const std::string a = serialize::model_to_json(train_pipeline(p.x, p.y, small_config()));
  const std::string b = serialize::model_to_json(train_pipeline(p.x, p.y, small_config()));
  EXPECT_EQ(a, b);
  PipelineConfig other = small_config();
  other.seed = 6;
  EXPECT_NE(a, serialize::model_to_json(train_pipeline(p.x, p.y, other)));
}

TEST(TrainPipeline, FeatureSubsetDrivesClusteringOnly) {
  const Problem p = regime_problem(500, 13);
  PipelineConfig c = small_config();
  c.feature_subset = {0, 1};
  const MixtureModel model = train_pipeline(p.x, p.y, c);
  EXPECT_EQ(model.rff->dim(), 2);
  for (const auto& local : model.locals) EXPECT_EQ(local.gam.num_features(), 3);
  const Matrix z = latent_coordinates(model, p.x);
  const Matrix direct = latent::project_inputs(
      model.projector, *model.rff, select_cols(p.x, std::vector<Index>{0, 1}));
  EXPECT_EQ((z - direct).cwiseAbs().maxCoeff(), 0.0);
}

TEST(TrainAblation, EveryModeTrains) {
  const Problem p = regime_problem(500, 14);
  for (AblationMode mode : {AblationMode::kRawCluster, AblationMode::kPcaInputCluster,
                            AblationMode::kLocalLinear}) {
    PipelineConfig c = small_config();
    c.ablation = mode;
    const MixtureModel model = train_ablation(p.x, p.y, c);
    EXPECT_EQ(model.rff.has_value(), mode == AblationMode::kLocalLinear);
    for (const auto& local : model.locals) {
      EXPECT_EQ(local.kind, mode == AblationMode::kLocalLinear ? LocalKind::kLinear
                                                               : LocalKind::kGam);
    }
    EXPECT_TRUE(predict_mixture(model, p.x).allFinite());
  }
  EXPECT_THROW(train_ablation(p.x, p.y, small_config()), InvalidArgument);
}

TEST(TrainAblation, RawClusterUsesStandardizedInputs) {
  const Problem p = regime_problem(400, 15);
  PipelineConfig c = small_config();
  c.ablation = AblationMode::kRawCluster;
  const MixtureModel model = train_ablation(p.x, p.y, c);
  EXPECT_EQ(model.gmm.dim(), 3);
  const Matrix z = latent_coordinates(model, p.x);
  EXPECT_LE((z - Standardizer::fit(p.x).apply(p.x)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(TrainPipeline, AugmentationAddsSyntheticRows) {
  const Problem p = regime_problem(300, 16);
  PipelineConfig c = small_config();
  c.augment = true;
  c.augmentation.n_per_point = 2;
  const MixtureModel with_locals = train_pipeline(p.x, p.y, c);
  const Index total = std::accumulate(with_locals.cluster_sizes.begin(),
                                      with_locals.cluster_sizes.end(), Index{0});
  EXPECT_GT(total, 300);
  c.augment_locals = false;
  const MixtureModel without = train_pipeline(p.x, p.y, c);
  EXPECT_EQ(std::accumulate(without.cluster_sizes.begin(), without.cluster_sizes.end(),
                            Index{0}),
            300);
}

TEST(Validate, RejectsInconsistentConfig) {
  PipelineConfig c = small_config();
  c.latent_dim = 100;
  EXPECT_THROW(validate(c, 3), ConfigurationError);
  c = small_config();
  c.feature_subset = {0, 7};
  EXPECT_THROW(validate(c, 3), ConfigurationError);
  c = small_config();
  c.ablation = AblationMode::kPcaInputCluster;
  c.latent_dim = 4;
  EXPECT_THROW(validate(c, 3), ConfigurationError);
  c = small_config();
  c.num_clusters = 0;
  EXPECT_THROW(validate(c, 3), ConfigurationError);
  EXPECT_EQ(effective_min_cluster_size(PipelineConfig{}, 8), 50);
  EXPECT_EQ(effective_min_cluster_size(PipelineConfig{}, 20), 100);
}

TEST(SpatialClusterReport, PartitionsRowsByHardAssignment) {
  const Problem p = regime_problem(500, 17);
  PipelineConfig c = small_config();
  c.feature_subset = {0, 1};
  const MixtureModel model = train_pipeline(p.x, p.y, c);
  const std::vector<ClusterGroup> groups = spatial_cluster_report(model, p.x);
  EXPECT_EQ(static_cast<Index>(groups.size()), model.gmm.num_components());
  const std::vector<Index> assign =
      gmm::hard_assign(model.gmm, latent_coordinates(model, p.x));
  Index total = 0;
  for (const ClusterGroup& g : groups) {
    total += static_cast<Index>(g.rows.size());
    for (Index r : g.rows) EXPECT_EQ(assign[static_cast<std::size_t>(r)], g.cluster);
  }
  EXPECT_EQ(total, 500);
}

TEST(SpatialClusterReport, SingleClusterHoldsEveryRow) {
  const Problem p = regime_problem(300, 18);
  PipelineConfig c = small_config();
  c.feature_subset = {0, 1};
  c.num_clusters = 1;
  const std::vector<ClusterGroup> groups =
      spatial_cluster_report(train_pipeline(p.x, p.y, c), p.x);
  ASSERT_EQ(groups.size(), 1u);
  EXPECT_EQ(groups.front().rows.size(), 300u);
}

TEST(SpatialClusterReport, NeedsTwoCoordinateColumns) {
  const Problem p = regime_problem(300, 19);
  EXPECT_THROW(spatial_cluster_report(train_pipeline(p.x, p.y, small_config()), p.x),
               InvalidArgument);
}

}  // namespace
}  // namespace rffgam::mixture
