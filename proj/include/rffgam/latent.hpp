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

#ifndef RFFGAM_LATENT_HPP_
#define RFFGAM_LATENT_HPP_

#include "rffgam/common.hpp"
#include "rffgam/rff.hpp"

namespace rffgam::latent {

// The latent map h(s) = V_d (s - s_mean).
struct LatentProjector {
  Vector s_mean;
  // d x K, orthonormal rows.
  Matrix v_d;
  // Non-increasing, length d.
  Vector singular_values;

  Index dim() const { return v_d.rows(); }
  Index num_features() const { return v_d.cols(); }
};

// Number of leading directions always extracted before truncation to d. Doing
// so makes a projector for d bitwise equal to the d-prefix of a projector for
// any larger d up to this count.
inline constexpr Index kLeadingComponents = 16;

// PCA of the rows of `s`. Small problems use a thin SVD of the centered
// matrix; large ones an eigen-decomposition of the K x K Gram matrix.
LatentProjector fit_pca(const Matrix& s, Index d);

// Same decomposition for s = intermediate_features(model, x_raw), streamed in
// row blocks so the N x K feature matrix is never materialized.
LatentProjector fit_pca(const rff::RffModel& model, const Matrix& x_raw,
                        Index d);

// First d directions of an existing projector.
LatentProjector truncate(const LatentProjector& projector, Index d);

Vector project(const LatentProjector& projector, const Vector& s);
// Row-wise projection of an N x K feature matrix.
Matrix project_rows(const LatentProjector& projector, const Matrix& s);
// h(x) for raw inputs, evaluated in row blocks.
Matrix project_inputs(const LatentProjector& projector,
                      const rff::RffModel& model, const Matrix& x_raw);

struct FrequencyAnalysis {
  // p x p, columns are principal directions.
  Matrix principal_directions;
  Vector weighted_eigenvalues;
  double kde_bandwidth = 0.0;
  // Normalized KDE weight of each frequency sample.
  Vector weights;
};

// Scott's rule for an isotropic Gaussian kernel:
// K^{-1/(p+4)} * sqrt(trace(Cov) / p).
double scott_bandwidth(const rff::FrequencyMatrix& omega);

// Gaussian KDE density at each sample, normalized to sum to one.
Vector kde_weights(const rff::FrequencyMatrix& omega, double bandwidth);

// Eigen-decomposition of the KDE-weighted second moment of the frequencies
// about their weighted mean.
FrequencyAnalysis weighted_frequency_pca(const rff::FrequencyMatrix& omega,
                                         double bandwidth);
FrequencyAnalysis weighted_frequency_pca(const rff::FrequencyMatrix& omega);

}  // namespace rffgam::latent

#endif  // RFFGAM_LATENT_HPP_
