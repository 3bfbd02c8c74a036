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

#ifndef RFFGAM_GAM_HPP_
#define RFFGAM_GAM_HPP_

#include <vector>

#include "rffgam/common.hpp"

namespace rffgam::gam {

// One additive component. A feature whose quantile knots collapse to fewer
// than two interior knots falls back to a linear term, and a feature with a
// single distinct value contributes nothing.
enum class TermKind { kSpline, kLinear, kConstant };

struct SplineBasis {
  Index feature_index = 0;
  TermKind kind = TermKind::kSpline;
  Vector interior_knots;
  double lower = 0.0;
  double upper = 1.0;
  int degree = 3;
  // Centering offset of a linear term: phi(x) = x - center.
  double center = 0.0;

  // Q_j; 1 for a linear term and 0 for a constant one.
  Index n_basis() const;
  // Basis row at x, after clamping x to [lower, upper].
  Vector evaluate(double x) const;
  // M x Q_j basis matrix for a column of inputs.
  Matrix design(const Eigen::Ref<const Vector>& x) const;
  // Full knot sequence with boundary knots repeated degree + 1 times.
  Vector knot_sequence() const;
};

// Interior knots at the i / (n_knots + 1) quantiles of `x_col`, duplicates and
// knots on the boundary removed.
SplineBasis build_spline_basis(const Vector& x_col, int n_knots, int degree = 3);

// D^T D with D the (Q - 2) x Q second-difference operator.
Matrix penalty_matrix(Index n_basis);
Matrix penalty_matrix(const SplineBasis& basis);

struct GamConfig {
  int n_knots = 30;
  int degree = 3;
  double smooth_lambda = 1.0;
  double tol = 1e-7;
  int max_sweeps = 100;
};

struct GamModel {
  double alpha = 0.0;
  std::vector<SplineBasis> bases;
  std::vector<Vector> theta;
  double smooth_lambda = 1.0;
  bool converged = false;
  int sweeps = 0;

  Index num_features() const { return static_cast<Index>(bases.size()); }
};

struct GamFit {
  GamModel model;
  // Training-set fitted values at the final iterate.
  Vector fitted;
  // Penalized residual sum of squares after each sweep.
  std::vector<double> objective;
};

// Term for feature j with the degradation rules applied.
SplineBasis build_term(const Vector& x_col, Index feature_index,
                       const GamConfig& config);

GamFit fit_gam_traced(const Matrix& x, const Vector& y, const GamConfig& config);
GamModel fit_gam(const Matrix& x, const Vector& y, const GamConfig& config);

Vector predict_gam(const GamModel& model, const Matrix& x);
// g_j evaluated at the given values of feature j.
Vector component(const GamModel& model, Index j, const Vector& values);

}  // namespace rffgam::gam

#endif  // RFFGAM_GAM_HPP_
