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

#include "rffgam/ridge.hpp"

#include <string>

namespace rffgam::linear {

RidgeModel fit_ridge(const Matrix& x, const Vector& y, double lambda) {
  if (x.rows() != y.size() || x.rows() == 0) {
    throw InvalidArgument("ridge regression needs matching, non-empty x and y");
  }
  if (!(lambda > 0.0)) throw InvalidArgument("ridge lambda must be positive");
  RidgeModel model;
  model.lambda = lambda;
  model.standardizer = Standardizer::fit(x);
  const Matrix z = model.standardizer.apply(x);
  model.intercept = y.mean();
  Matrix lhs = z.transpose() * z;
  lhs.diagonal().array() += lambda;
  Eigen::LLT<Matrix> llt(lhs);
  if (llt.info() != Eigen::Success) {
    throw NumericalFailure("ridge normal equations are not positive definite");
  }
  model.coef = llt.solve(z.transpose() * (y.array() - model.intercept).matrix());
  return model;
}

Vector predict_ridge(const RidgeModel& model, const Matrix& x) {
  if (x.cols() != model.coef.size()) {
    throw InvalidArgument("ridge model expects " +
                          std::to_string(model.coef.size()) + " columns");
  }
  return (model.standardizer.apply(x) * model.coef).array() + model.intercept;
}

}  // namespace rffgam::linear
