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

#include "rffgam/kernel_ridge.hpp"

#include <cmath>

namespace rffgam::rff {

double gaussian_kernel(const Eigen::Ref<const Vector>& a,
                       const Eigen::Ref<const Vector>& b, double sigma) {
  return std::exp(-(a - b).squaredNorm() / (2.0 * sigma * sigma));
}

KernelRidge KernelRidge::fit(const Matrix& x, const Vector& y, double sigma,
                             double lambda) {
  if (x.rows() != y.size() || x.rows() == 0) {
    throw InvalidArgument("kernel ridge needs matching, non-empty x and y");
  }
  if (!(sigma > 0.0) || !(lambda > 0.0)) {
    throw InvalidArgument("kernel ridge needs positive sigma and lambda");
  }
  const Index n = x.rows();
  Matrix xi(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j <= i; ++j) {
      xi(i, j) = gaussian_kernel(x.row(i).transpose(), x.row(j).transpose(), sigma);
      xi(j, i) = xi(i, j);
    }
  }
  xi.diagonal().array() += lambda;
  Eigen::LLT<Matrix> llt(xi);
  if (llt.info() != Eigen::Success) {
    throw NumericalFailure("kernel ridge system is not positive definite");
  }
  KernelRidge out;
  out.x_ = x;
  out.eta_ = llt.solve(y);
  out.sigma_ = sigma;
  if (!out.eta_.allFinite()) {
    throw NumericalFailure("kernel ridge produced non-finite coefficients");
  }
  return out;
}

Vector KernelRidge::predict(const Matrix& x) const {
  if (x.cols() != x_.cols()) {
    throw InvalidArgument("kernel ridge input dimension mismatch");
  }
  Vector out(x.rows());
  for (Index i = 0; i < x.rows(); ++i) {
    double acc = 0.0;
    for (Index j = 0; j < x_.rows(); ++j) {
      acc += eta_(j) * gaussian_kernel(x.row(i).transpose(),
                                       x_.row(j).transpose(), sigma_);
    }
    out(i) = acc;
  }
  return out;
}

}  // namespace rffgam::rff
