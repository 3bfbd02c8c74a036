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

#include "rffgam/preprocessing.hpp"

#include <cmath>
#include <string>

namespace rffgam {

Standardizer Standardizer::fit(const Matrix& x) {
  if (x.rows() == 0 || x.cols() == 0) {
    throw InvalidArgument("cannot standardize an empty matrix");
  }
  if (!x.allFinite()) {
    throw InvalidArgument("non-finite value in standardizer input");
  }
  Standardizer s;
  const double n = static_cast<double>(x.rows());
  s.mean = x.colwise().mean().transpose();
  s.scale.resize(x.cols());
  for (Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - s.mean(j)).square().sum() / n;
    const double sd = std::sqrt(var);
    s.scale(j) = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
  if (x.cols() != dim()) {
    throw InvalidArgument("standardizer expects " + std::to_string(dim()) +
                          " columns, got " + std::to_string(x.cols()));
  }
  return (x.rowwise() - mean.transpose()).array().rowwise() /
         scale.transpose().array();
}

Matrix Standardizer::invert(const Matrix& z) const {
  if (z.cols() != dim()) {
    throw InvalidArgument("standardizer expects " + std::to_string(dim()) +
                          " columns, got " + std::to_string(z.cols()));
  }
  Matrix x = z.array().rowwise() * scale.transpose().array();
  x.rowwise() += mean.transpose();
  return x;
}

}  // namespace rffgam
