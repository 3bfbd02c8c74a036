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

#ifndef RFFGAM_GMM_HPP_
#define RFFGAM_GMM_HPP_

#include <cstdint>
#include <vector>

#include "rffgam/common.hpp"

namespace rffgam::gmm {

struct GmmModel {
  Vector weights;
  std::vector<Vector> means;
  // Full, symmetric positive-definite.
  std::vector<Matrix> covariances;

  Index num_components() const { return weights.size(); }
  Index dim() const { return means.empty() ? 0 : means.front().size(); }
};

struct EmSettings {
  int max_iter = 500;
  // Stop when the log-likelihood gain falls below tol * |log-likelihood|.
  double tol = 1e-6;
  std::uint64_t seed = 0;
};

struct EmTrace {
  GmmModel model;
  // Log-likelihood after each completed EM iteration.
  std::vector<double> log_likelihood;
  int iterations = 0;
  bool converged = false;
};

// Ridge added to every covariance estimate: 1e-6 * trace(S) / d.
inline constexpr double kCovarianceRidge = 1e-6;

EmTrace fit_em_traced(const Matrix& z, Index num_components,
                      const EmSettings& settings);
GmmModel fit_em(const Matrix& z, Index num_components,
                const EmSettings& settings);

// Posterior responsibilities of a single point, normalized in log space.
Vector responsibilities(const GmmModel& model, const Vector& z);
// N x L responsibilities, one row per point.
Matrix responsibilities(const GmmModel& model, const Matrix& z);

// Total log-likelihood sum_i log sum_l pi_l N(z_i; mu_l, Sigma_l).
double log_likelihood(const GmmModel& model, const Matrix& z);

// Index of the largest responsibility per row; ties go to the lowest index.
std::vector<Index> hard_assign(const GmmModel& model, const Matrix& z);

// Keeps the listed components and renormalizes their weights.
GmmModel select_components(const GmmModel& model,
                           const std::vector<Index>& keep);

}  // namespace rffgam::gmm

#endif  // RFFGAM_GMM_HPP_
