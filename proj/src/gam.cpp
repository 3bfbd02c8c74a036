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

#include "rffgam/gam.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rffgam::gam {
namespace {

// Linear-interpolation quantile of sorted data.
double quantile_sorted(const std::vector<double>& sorted, double level) {
  const double pos = level * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<double> sorted_copy(const Vector& x) {
  std::vector<double> v(x.data(), x.data() + x.size());
  std::sort(v.begin(), v.end());
  return v;
}

Index count_distinct(const std::vector<double>& sorted) {
  Index n = sorted.empty() ? 0 : 1;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] != sorted[i - 1]) ++n;
  }
  return n;
}

double penalized_objective(const Vector& residual, const GamModel& model,
                           const std::vector<Matrix>& penalties) {
  double value = residual.squaredNorm();
  for (std::size_t j = 0; j < model.bases.size(); ++j) {
    if (model.bases[j].kind == TermKind::kSpline) {
      value += model.smooth_lambda *
               model.theta[j].dot(penalties[j] * model.theta[j]);
    }
  }
  return value;
}

}  // namespace

Index SplineBasis::n_basis() const {
  switch (kind) {
    case TermKind::kSpline:
      return interior_knots.size() + degree + 1;
    case TermKind::kLinear:
      return 1;
    case TermKind::kConstant:
      return 0;
  }
  return 0;
}

Vector SplineBasis::knot_sequence() const {
  const Index m = interior_knots.size();
  Vector t(m + 2 * (degree + 1));
  t.head(degree + 1).setConstant(lower);
  t.segment(degree + 1, m) = interior_knots;
  t.tail(degree + 1).setConstant(upper);
  return t;
}

Vector SplineBasis::evaluate(double x) const {
  const double xc = std::clamp(x, lower, upper);
  if (kind == TermKind::kConstant) return Vector(0);
  if (kind == TermKind::kLinear) return Vector::Constant(1, xc - center);

  const Vector t = knot_sequence();
  const Index q = n_basis();
  // Knot span with t[span] <= x < t[span + 1]; the right boundary belongs to
  // the last non-empty span.
  Index span = degree;
  while (span < q - 1 && xc >= t(span + 1)) ++span;

  // Cox-de Boor triangle for the degree + 1 non-zero functions.
  Vector n = Vector::Zero(degree + 1);
  Vector left(degree + 1);
  Vector right(degree + 1);
  n(0) = 1.0;
  for (int r = 1; r <= degree; ++r) {
    left(r) = xc - t(span + 1 - r);
    right(r) = t(span + r) - xc;
    double saved = 0.0;
    for (int s = 0; s < r; ++s) {
      const double denom = right(s + 1) + left(r - s);
      const double temp = denom != 0.0 ? n(s) / denom : 0.0;
      n(s) = saved + right(s + 1) * temp;
      saved = left(r - s) * temp;
    }
    n(r) = saved;
  }
  Vector row = Vector::Zero(q);
  row.segment(span - degree, degree + 1) = n;
  return row;
}

Matrix SplineBasis::design(const Eigen::Ref<const Vector>& x) const {
  Matrix b(x.size(), n_basis());
  for (Index i = 0; i < x.size(); ++i) b.row(i) = evaluate(x(i)).transpose();
  return b;
}

SplineBasis build_spline_basis(const Vector& x_col, int n_knots, int degree) {
  if (n_knots < 2) throw InvalidArgument("need at least two interior knots");
  if (degree < 1) throw InvalidArgument("spline degree must be positive");
  if (!x_col.allFinite()) throw InvalidArgument("feature is not finite");
  const std::vector<double> sorted = sorted_copy(x_col);
  if (count_distinct(sorted) < degree + 1) {
    throw InvalidArgument("feature has fewer than " +
                          std::to_string(degree + 1) + " distinct values");
  }
  SplineBasis basis;
  basis.degree = degree;
  basis.lower = sorted.front();
  basis.upper = sorted.back();
  std::vector<double> knots;
  for (int i = 1; i <= n_knots; ++i) {
    const double k =
        quantile_sorted(sorted, static_cast<double>(i) / (n_knots + 1.0));
    if (k <= basis.lower || k >= basis.upper) continue;
    if (!knots.empty() && k <= knots.back()) continue;
    knots.push_back(k);
  }
  basis.interior_knots =
      Eigen::Map<const Vector>(knots.data(), static_cast<Index>(knots.size()));
  return basis;
}

Matrix penalty_matrix(Index n_basis) {
  if (n_basis < 3) {
    throw InvalidArgument("second-difference penalty needs at least 3 coefficients");
  }
  Matrix d = Matrix::Zero(n_basis - 2, n_basis);
  for (Index r = 0; r < n_basis - 2; ++r) {
    d(r, r) = 1.0;
    d(r, r + 1) = -2.0;
    d(r, r + 2) = 1.0;
  }
  return d.transpose() * d;
}

Matrix penalty_matrix(const SplineBasis& basis) {
  return penalty_matrix(basis.n_basis());
}

SplineBasis build_term(const Vector& x_col, Index feature_index,
                       const GamConfig& config) {
  const std::vector<double> sorted = sorted_copy(x_col);
  const Index distinct = count_distinct(sorted);
  SplineBasis term;
  term.feature_index = feature_index;
  term.degree = config.degree;
  term.lower = sorted.front();
  term.upper = sorted.back();
  if (distinct >= config.degree + 1) {
    SplineBasis spline = build_spline_basis(x_col, config.n_knots, config.degree);
    if (spline.interior_knots.size() >= 2) {
      spline.feature_index = feature_index;
      return spline;
    }
  }
  if (distinct >= 2) {
    term.kind = TermKind::kLinear;
    term.center = x_col.mean();
  } else {
    term.kind = TermKind::kConstant;
  }
  return term;
}

GamFit fit_gam_traced(const Matrix& x, const Vector& y, const GamConfig& config) {
  const Index n = x.rows();
  const Index p = x.cols();
  if (n != y.size()) throw InvalidArgument("x and y lengths differ");
  if (p < 1) throw InvalidArgument("GAM needs at least one feature");
  if (n <= p * config.degree) {
    throw InvalidArgument("too few rows (" + std::to_string(n) +
                          ") for an additive model on " + std::to_string(p) +
                          " features");
  }
  if (!(config.smooth_lambda > 0.0)) {
    throw InvalidArgument("smoothing parameter must be positive");
  }
  if (config.n_knots < 2) throw InvalidArgument("need at least two knots");
  if (!x.allFinite() || !y.allFinite()) {
    throw InvalidArgument("GAM inputs must be finite");
  }

  GamFit fit;
  GamModel& model = fit.model;
  model.smooth_lambda = config.smooth_lambda;
  model.alpha = y.mean();

  std::vector<Matrix> designs(static_cast<std::size_t>(p));
  std::vector<Matrix> penalties(static_cast<std::size_t>(p));
  std::vector<Eigen::LLT<Matrix>> solvers(static_cast<std::size_t>(p));
  std::vector<Vector> f(static_cast<std::size_t>(p), Vector::Zero(n));
  for (Index j = 0; j < p; ++j) {
    const auto js = static_cast<std::size_t>(j);
    model.bases.push_back(build_term(x.col(j), j, config));
    const SplineBasis& term = model.bases.back();
    designs[js] = term.design(x.col(j));
    model.theta.push_back(Vector::Zero(term.n_basis()));
    if (term.kind == TermKind::kSpline) {
      penalties[js] = penalty_matrix(term);
      Matrix lhs = designs[js].transpose() * designs[js] +
                   config.smooth_lambda * penalties[js];
      solvers[js].compute(lhs);
      if (solvers[js].info() != Eigen::Success) {
        throw NumericalFailure("penalized spline system for feature " +
                               std::to_string(j) + " is not positive definite");
      }
    }
  }

  Vector residual = y.array() - model.alpha;
  for (int sweep = 0; sweep < config.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Index j = 0; j < p; ++j) {
      const auto js = static_cast<std::size_t>(j);
      const SplineBasis& term = model.bases[js];
      if (term.kind == TermKind::kConstant) continue;
      const Vector partial = residual + f[js];
      Vector theta;
      if (term.kind == TermKind::kSpline) {
        theta = solvers[js].solve(designs[js].transpose() * partial);
        // B 1 = 1, so shifting all coefficients shifts g_j by a constant.
        theta.array() -= (designs[js] * theta).mean();
      } else {
        const double denom = designs[js].col(0).squaredNorm();
        theta = Vector::Constant(1, designs[js].col(0).dot(partial) / denom);
      }
      max_change = std::max(
          max_change, (theta - model.theta[js]).cwiseAbs().maxCoeff());
      model.theta[js] = theta;
      f[js] = designs[js] * theta;
      residual = partial - f[js];
    }
    ++model.sweeps;
    fit.objective.push_back(penalized_objective(residual, model, penalties));
    if (max_change < config.tol) {
      model.converged = true;
      break;
    }
  }
  if (!model.converged) {
    for (const Vector& t : model.theta) {
      if (!t.allFinite()) throw NumericalFailure("backfitting diverged");
    }
  }
  fit.fitted = Vector::Constant(n, model.alpha);
  for (Index j = 0; j < p; ++j) fit.fitted += f[static_cast<std::size_t>(j)];
  return fit;
}

GamModel fit_gam(const Matrix& x, const Vector& y, const GamConfig& config) {
  return fit_gam_traced(x, y, config).model;
}

Vector component(const GamModel& model, Index j, const Vector& values) {
  if (j < 0 || j >= model.num_features()) {
    throw InvalidArgument("feature index out of range");
  }
  const auto js = static_cast<std::size_t>(j);
  if (model.bases[js].kind == TermKind::kConstant) {
    return Vector::Zero(values.size());
  }
  return model.bases[js].design(values) * model.theta[js];
}

Vector predict_gam(const GamModel& model, const Matrix& x) {
  if (x.cols() != model.num_features()) {
    throw InvalidArgument("GAM expects " + std::to_string(model.num_features()) +
                          " columns, got " + std::to_string(x.cols()));
  }
  Vector out = Vector::Constant(x.rows(), model.alpha);
  for (Index j = 0; j < x.cols(); ++j) out += component(model, j, x.col(j));
  return out;
}

}  // namespace rffgam::gam
