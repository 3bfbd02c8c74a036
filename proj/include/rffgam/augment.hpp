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

#ifndef RFFGAM_AUGMENT_HPP_
#define RFFGAM_AUGMENT_HPP_

#include <cstdint>
#include <vector>

#include "rffgam/common.hpp"
#include "rffgam/rff.hpp"

namespace rffgam::augment {

struct AugmentConfig {
  int n_per_point = 10;
  // Variance of the Gaussian perturbation in standardized units.
  double epsilon = 0.05;
  double chi2_quantile = 0.99;
  std::uint64_t seed = 0;
};

struct AugmentedData {
  // Original rows first, in their original order, then accepted synthetic rows.
  Matrix x;
  Vector y;
  std::vector<bool> is_synthetic;
  Index num_original = 0;
  Index num_candidates = 0;
  Index num_accepted = 0;
  double threshold = 0.0;
};

// Regularized lower incomplete gamma function P(a, x).
double regularized_lower_gamma(double a, double x);

// Inverse CDF of the chi-squared distribution with `dof` degrees of freedom.
double chi2_threshold(int dof, double quantile);

// Squared Mahalanobis distances of the rows of `z` under (mean, cov).
Vector mahalanobis_squared(const Matrix& z, const Vector& mean,
                           const Matrix& cov);

// Perturbs each standardized row of `x` n_per_point times, keeps candidates
// inside the chi-squared Mahalanobis ellipsoid of the standardized inputs and
// labels them with `labeler`. `labeler_columns` selects the labeler's inputs
// out of the columns of `x`; empty means all columns.
AugmentedData augment_dataset(const Matrix& x, const Vector& y,
                              const rff::RffModel& labeler,
                              const std::vector<Index>& labeler_columns,
                              const AugmentConfig& config);

}  // namespace rffgam::augment

#endif  // RFFGAM_AUGMENT_HPP_
