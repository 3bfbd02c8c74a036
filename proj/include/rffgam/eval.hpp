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

#ifndef RFFGAM_EVAL_HPP_
#define RFFGAM_EVAL_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rffgam/common.hpp"
#include "rffgam/mixture.hpp"

namespace rffgam::eval {

using Predictor = std::function<Vector(const Matrix&)>;

double rmse(const Vector& pred, const Vector& truth);

struct BootstrapInterval {
  double rmse = 0.0;
  // Empirical quantiles of the resampled RMSEs.
  double q_low = 0.0;
  double q_high = 0.0;
  // (q_high - q_low) / 2, the "+-" figure of a results table.
  double half_width = 0.0;
};

// Resamples the residuals with replacement `resamples` times and reports the
// spread of the resampled RMSE.
BootstrapInterval bootstrap_ci(const Vector& residuals, int resamples = 1000,
                               double level = 0.95, std::uint64_t seed = 0);

struct DataSplit {
  Matrix x_train;
  Vector y_train;
  Matrix x_test;
  Vector y_test;
  std::vector<Index> train_rows;
  std::vector<Index> test_rows;
};

// Random split with floor(train_fraction * N) training rows.
DataSplit train_test_split(const Matrix& x, const Vector& y,
                           double train_fraction, std::uint64_t seed);

struct EvalReport {
  std::string label;
  std::string protocol;
  double train_rmse = 0.0;
  double test_rmse = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double runtime_seconds = 0.0;
  Index n_train = 0;
  Index n_test = 0;
};

// Test RMSE with a bootstrap band of +- half_width around it.
EvalReport evaluate(const std::string& label, const Predictor& predict,
                    const DataSplit& split, double runtime_seconds,
                    int resamples = 1000, std::uint64_t seed = 0);

// Fits on (x_train, y_train) with the given seed and predicts x_test.
using FitPredict = std::function<Vector(const Matrix& x_train,
                                        const Vector& y_train,
                                        const Matrix& x_test,
                                        std::uint64_t seed)>;

struct MonteCarloResult {
  std::vector<double> rmses;
  int failures = 0;
  std::vector<std::string> failure_messages;
  double mean = 0.0;
  // 1.96 * sample standard deviation / sqrt(successful runs).
  double half_width = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

MonteCarloResult monte_carlo_cv(const Matrix& x, const Vector& y,
                                const FitPredict& fit_predict, int repeats,
                                double train_fraction, std::uint64_t seed);
MonteCarloResult monte_carlo_cv(const Matrix& x, const Vector& y,
                                const mixture::PipelineConfig& config,
                                int repeats, double train_fraction,
                                std::uint64_t seed);

struct GridCell {
  Index num_clusters = 0;
  Index latent_dim = 0;
  bool ok = false;
  double rmse = 0.0;
  std::string error;
};

struct GridResult {
  std::vector<GridCell> cells;
  const GridCell* best() const;
};

// Trains every (L, d) pair on one split. The Stage-1 model is shared by all
// cells, so each cell equals a standalone train_pipeline run with the same
// seed.
GridResult grid_search(const DataSplit& split,
                       const mixture::PipelineConfig& base,
                       const std::vector<Index>& l_values,
                       const std::vector<Index>& d_values);

struct PdCurve {
  Index feature = 0;
  Vector grid;
  Vector pd;
};

// Average prediction over all rows of `x` with column j set to each grid
// value. The grid is evenly spaced over the [1%, 99%] quantile range of the
// feature, or over its full range when `clip` is false.
PdCurve partial_dependence(const Predictor& predict, const Matrix& x, Index j,
                           Index grid_size = 50, bool clip = true);

// Same averaging on an explicit grid.
PdCurve partial_dependence_at(const Predictor& predict, const Matrix& x,
                              Index j, const Vector& grid);

struct ResponsibilityProfile {
  std::vector<long long> categories;
  // One row per category present in the data, one column per component.
  Matrix mean;
  // Requested categories with no rows.
  std::vector<long long> omitted;
};

// Mean responsibility per category. When `wanted` is empty the categories
// are the sorted distinct values of `category`.
ResponsibilityProfile responsibility_profile(
    const Matrix& gamma, const std::vector<long long>& category,
    const std::vector<long long>& wanted = {});

}  // namespace rffgam::eval

#endif  // RFFGAM_EVAL_HPP_
