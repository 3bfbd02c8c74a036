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

#ifndef RFFGAM_KERNEL_RIDGE_HPP_
#define RFFGAM_KERNEL_RIDGE_HPP_

#include "rffgam/common.hpp"

namespace rffgam::rff {

// exp(-|a - b|^2 / (2 sigma^2))
double gaussian_kernel(const Eigen::Ref<const Vector>& a,
                       const Eigen::Ref<const Vector>& b, double sigma);

// Dense kernel ridge regression with the Gaussian kernel. Solves
// (Xi + lambda I) eta = y on the N x N kernel matrix, so it is only meant for
// small reference problems.
class KernelRidge {
 public:
  static KernelRidge fit(const Matrix& x, const Vector& y, double sigma,
                         double lambda);

  Vector predict(const Matrix& x) const;
  const Vector& coefficients() const { return eta_; }

 private:
  Matrix x_;
  Vector eta_;
  double sigma_ = 1.0;
};

}  // namespace rffgam::rff

#endif  // RFFGAM_KERNEL_RIDGE_HPP_
