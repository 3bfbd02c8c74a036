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

#ifndef RFFGAM_RFF_HPP_
#define RFFGAM_RFF_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "rffgam/common.hpp"
#include "rffgam/preprocessing.hpp"

namespace rffgam::rff {

// K x p matrix of frequency vectors, one per row, in radians per
// standardized input unit.
class FrequencyMatrix {
 public:
  FrequencyMatrix() = default;
  explicit FrequencyMatrix(Matrix omega);

  const Matrix& omega() const { return omega_; }
  Index count() const { return omega_.rows(); }
  Index dim() const { return omega_.cols(); }

 private:
  Matrix omega_;
};

// How the configured Tikhonov parameter enters the normal equations.
//   kAbsolute:     (Phi^H Phi + lambda I) beta = Phi^H y
//   kPerFeature:   lambda is scaled by K, the scaling under which the
//                  normalized feature map e^{i w.x}/sqrt(K) reproduces kernel
//                  ridge regression with the same lambda.
//   kPerSample:    lambda is scaled by the number of fitted rows.
enum class LambdaScale { kAbsolute, kPerFeature, kPerSample };

// Shape of the random-walk perturbation applied to resampled frequencies.
//   kIsotropic:            step * N(0, I)
//   kFrequencyCovariance:  step * N(0, C) with C the empirical covariance of
//                          the resampled frequencies.
enum class WalkShape { kIsotropic, kFrequencyCovariance };

struct RffModel {
  FrequencyMatrix omega;
  ComplexVector beta;
  double sigma = 1.0;
  double lambda = 1.0;
  Standardizer standardizer;
  double y_mean = 0.0;

  Index num_features() const { return omega.count(); }
  Index dim() const { return omega.dim(); }
};

struct TrainValidationSplit {
  Matrix x_train;
  Vector y_train;
  Matrix x_valid;
  Vector y_valid;
};

struct ResampleRecord {
  int iteration = 0;
  double train_rmse = 0.0;
  double valid_rmse = 0.0;
};

struct ResampleSettings {
  Index num_features = 4000;
  // Kernel bandwidth; values <= 0 select sqrt(p).
  double sigma = 0.0;
  double lambda = 0.32;
  LambdaScale lambda_scale = LambdaScale::kPerFeature;
  double step_size = 0.3;
  int iterations = 50;
  WalkShape walk = WalkShape::kFrequencyCovariance;
  std::uint64_t seed = 0;
  // Called after every fit, e.g. for progress reporting.
  std::function<void(const ResampleRecord&)> on_iteration;
};


struct ResampleResult {
  RffModel model;
  int best_iteration = 0;
  std::vector<ResampleRecord> history;
  // Frequencies exactly as drawn before any resampling.
  FrequencyMatrix initial_frequencies;
};

double default_sigma(Index p);

// Draws K i.i.d. rows from N(0, sigma^-2 I), the spectral density of the
// Gaussian kernel exp(-|x - x'|^2 / (2 sigma^2)).
FrequencyMatrix sample_frequencies(Index p, Index num_features, double sigma,
                                   std::uint64_t seed);

// Phi(i, k) = exp(i w_k . x_i). `x_std` must already be standardized.
ComplexMatrix build_design_matrix(const Matrix& x_std,
                                  const FrequencyMatrix& omega);

// Solves (Phi^H Phi + lambda I) beta = Phi^H y with a Hermitian
// positive-definite factorization.
ComplexVector fit_coefficients(const ComplexMatrix& phi, const Vector& y,
                               double lambda);

// Same system as fit_coefficients, assembled block-wise from the inputs so the
// N x K design matrix is never held in memory. Summation order is fixed.
ComplexVector fit_coefficients_blocked(const Matrix& x_std,
                                       const FrequencyMatrix& omega,
                                       const Vector& y, double lambda);

double effective_lambda(double lambda, LambdaScale scale, Index rows,
                        Index num_features);

// Fits beta on fixed frequencies. Inputs are raw; the standardizer and the
// response offset are estimated from `x`/`y`.
RffModel fit_rff(const Matrix& x, const Vector& y, const FrequencyMatrix& omega,
                 double sigma, double lambda, LambdaScale scale);

// Iterative frequency refinement: fit, resample rows with probability
// proportional to |beta_k|^2, jitter by a Gaussian random walk, refit. Returns
// the iterate with the lowest validation RMSE.
ResampleResult resample_frequencies(const TrainValidationSplit& data,
                                    const ResampleSettings& settings);

// y_mean + Re(Phi beta) on standardized inputs.
Vector predict_rff(const RffModel& model, const Matrix& x_raw);

// S(i, k) = Re(beta_k exp(i w_k . x_i)) on standardized inputs.
Matrix intermediate_features(const RffModel& model, const Matrix& x_raw);

}  // namespace rffgam::rff

#endif  // RFFGAM_RFF_HPP_
