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

#ifndef RFFGAM_RIDGE_HPP_
#define RFFGAM_RIDGE_HPP_

#include "rffgam/common.hpp"
#include "rffgam/preprocessing.hpp"

namespace rffgam::linear {

// l2-regularized linear model on z-scored inputs:
// y = intercept + coef . z(x).
struct RidgeModel {
  Standardizer standardizer;
  Vector coef;
  double intercept = 0.0;
  double lambda = 1e-3;
};

RidgeModel fit_ridge(const Matrix& x, const Vector& y, double lambda);
Vector predict_ridge(const RidgeModel& model, const Matrix& x);

}  // namespace rffgam::linear

#endif  // RFFGAM_RIDGE_HPP_
