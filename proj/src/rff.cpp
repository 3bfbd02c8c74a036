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

#include "rffgam/rff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace rffgam::rff {
namespace {

constexpr Index kRowBlock = 1024;

void check_dims(const Matrix& x, const FrequencyMatrix& omega) {
  if (x.cols() != omega.dim()) {
    throw InvalidArgument("input has " + std::to_string(x.cols()) +
                          " columns but frequencies have dimension " +
                          std::to_string(omega.dim()));
  }
}

// Phase matrix Theta = X Omega^T for a row block.
Matrix phases(const Matrix& x_std, const FrequencyMatrix& omega, Index begin,
              Index rows) {
  return x_std.middleRows(begin, rows) * omega.omega().transpose();
}

// Real part of (beta_k e^{i theta}) = Re(beta) cos(theta) - Im(beta) sin(theta).
Vector real_response(const Matrix& x_std, const RffModel& model) {
  const Vector re = model.beta.real();
  const Vector im = model.beta.imag();
  Vector out(x_std.rows());
  for (Index begin = 0; begin < x_std.rows(); begin += kRowBlock) {
    const Index rows = std::min(kRowBlock, x_std.rows() - begin);
    const Matrix theta = phases(x_std, model.omega, begin, rows);
    out.segment(begin, rows) =
        theta.array().cos().matrix() * re - theta.array().sin().matrix() * im;
  }
  return out;
}

double rmse_of(const Vector& pred, const Vector& truth) {
  return std::sqrt((pred - truth).squaredNorm() /
                   static_cast<double>(truth.size()));
}

// Draws `count` indices with probability proportional to `weights` by
// inverting the cumulative distribution.
std::vector<Index> weighted_draw(const Vector& weights, Index count,
                                 std::mt19937_64& rng) {
  std::vector<double> cumulative(static_cast<std::size_t>(weights.size()));
  double total = 0.0;
  for (Index k = 0; k < weights.size(); ++k) {
    total += weights(k);
    cumulative[static_cast<std::size_t>(k)] = total;
  }
  std::vector<Index> out(static_cast<std::size_t>(count));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (auto& idx : out) {
    if (!(total > 0.0)) {
      idx = static_cast<Index>(rng() % static_cast<std::uint64_t>(weights.size()));
      continue;
    }
    const double u = uniform(rng) * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    idx = std::min<Index>(static_cast<Index>(it - cumulative.begin()),
                          weights.size() - 1);
  }
  return out;
}

Matrix walk_factor(const Matrix& omega, WalkShape shape) {
  const Index p = omega.cols();
  if (shape == WalkShape::kIsotropic) return Matrix::Identity(p, p);
  const Vector mean = omega.colwise().mean().transpose();
  const Matrix centered = omega.rowwise() - mean.transpose();
  Matrix cov = centered.transpose() * centered /
               static_cast<double>(std::max<Index>(omega.rows() - 1, 1));
  const double ridge = 1e-12 * std::max(cov.trace() / static_cast<double>(p), 1.0);
  cov.diagonal().array() += ridge;
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) return Matrix::Identity(p, p);
  return llt.matrixL();
}

}  // namespace

FrequencyMatrix::FrequencyMatrix(Matrix omega) : omega_(std::move(omega)) {
  if (omega_.rows() < 1 || omega_.cols() < 1) {
    throw InvalidArgument("frequency matrix needs K >= 1 and p >= 1");
  }
  if (!omega_.allFinite()) {
    throw InvalidArgument("frequency matrix contains non-finite entries");
  }
}

double default_sigma(Index p) { return std::sqrt(static_cast<double>(p)); }

FrequencyMatrix sample_frequencies(Index p, Index num_features, double sigma,
                                   std::uint64_t seed) {
  if (num_features < 1) {
    throw InvalidArgument("number of Fourier features must be positive");
  }
  if (p < 1) throw InvalidArgument("input dimension must be positive");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("kernel bandwidth must be positive");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0 / sigma);
  Matrix omega(num_features, p);
  for (Index k = 0; k < num_features; ++k) {
    for (Index j = 0; j < p; ++j) omega(k, j) = normal(rng);
  }
  return FrequencyMatrix(std::move(omega));
}

ComplexMatrix build_design_matrix(const Matrix& x_std,
                                  const FrequencyMatrix& omega) {
  check_dims(x_std, omega);
  const Matrix theta = x_std * omega.omega().transpose();
  ComplexMatrix phi(theta.rows(), theta.cols());
  for (Index k = 0; k < theta.cols(); ++k) {
    for (Index i = 0; i < theta.rows(); ++i) {
      phi(i, k) = std::polar(1.0, theta(i, k));
    }
  }
  return phi;
}

namespace {

ComplexVector solve_hermitian(ComplexMatrix& gram, const ComplexVector& rhs,
                              double lambda) {
  gram.diagonal().array() += lambda;
  Eigen::LLT<ComplexMatrix, Eigen::Lower> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw NumericalFailure(
        "Cholesky factorization of the regularized Gram matrix failed");
  }
  ComplexVector beta = llt.solve(rhs);
  if (!beta.allFinite()) {
    throw NumericalFailure("non-finite coefficients from normal equations");
  }
  return beta;
}

// Push-through form for N < K: beta = Phi^H (Phi Phi^H + lambda I)^{-1} y,
// algebraically equal to the K x K normal equations but solved at size N.
ComplexVector solve_dual(const Matrix& c, const Matrix& s, const Vector& y,
                         double lambda) {
  const Index n = c.rows();
  Matrix real_part = c * c.transpose() + s * s.transpose();
  Matrix cross = s * c.transpose();
  ComplexMatrix gram(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = j; i < n; ++i) {
      gram(i, j) = {real_part(i, j), cross(i, j) - cross(j, i)};
    }
  }
  const ComplexVector alpha =
      solve_hermitian(gram, y.cast<std::complex<double>>(), lambda);
  const Vector ar = alpha.real();
  const Vector ai = alpha.imag();
  ComplexVector beta(c.cols());
  beta.real() = c.transpose() * ar + s.transpose() * ai;
  beta.imag() = c.transpose() * ai - s.transpose() * ar;
  return beta;
}

}  // namespace

ComplexVector fit_coefficients(const ComplexMatrix& phi, const Vector& y,
                               double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("Tikhonov parameter must be positive");
  }
  if (phi.rows() < 1) throw InvalidArgument("need at least one row");
  if (phi.rows() != y.size()) {
    throw InvalidArgument("design matrix and response lengths differ");
  }
  if (!phi.allFinite() || !y.allFinite()) {
    throw InvalidArgument("non-finite input to coefficient fit");
  }
  if (phi.rows() < phi.cols()) {
    return solve_dual(phi.real(), phi.imag(), y, lambda);
  }
  ComplexMatrix gram = ComplexMatrix::Zero(phi.cols(), phi.cols());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(phi.adjoint());
  const ComplexVector rhs = phi.adjoint() * y.cast<std::complex<double>>();
  return solve_hermitian(gram, rhs, lambda);
}

ComplexVector fit_coefficients_blocked(const Matrix& x_std,
                                       const FrequencyMatrix& omega,
                                       const Vector& y, double lambda) {
  check_dims(x_std, omega);
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("Tikhonov parameter must be positive");
  }
  if (x_std.rows() < 1) throw InvalidArgument("need at least one row");
  if (x_std.rows() != y.size()) {
    throw InvalidArgument("input and response lengths differ");
  }
  if (!x_std.allFinite() || !y.allFinite()) {
    throw InvalidArgument("non-finite input to coefficient fit");
  }
  // With Phi = C + iS, Phi^H Phi = (C^T C + S^T S) + i (C^T S - S^T C).
  // Accumulating the real blocks is markedly faster than a complex rank
  // update and needs no N x K complex buffer.
  const Index num_features = omega.count();
  if (x_std.rows() < num_features) {
    const Matrix theta = x_std * omega.omega().transpose();
    return solve_dual(theta.array().cos().matrix(), theta.array().sin().matrix(),
                      y, lambda);
  }
  Matrix real_part = Matrix::Zero(num_features, num_features);
  Matrix cross = Matrix::Zero(num_features, num_features);
  Vector rhs_re = Vector::Zero(num_features);
  Vector rhs_im = Vector::Zero(num_features);
  for (Index begin = 0; begin < x_std.rows(); begin += kRowBlock) {
    const Index rows = std::min(kRowBlock, x_std.rows() - begin);
    const Matrix theta = phases(x_std, omega, begin, rows);
    const Matrix c = theta.array().cos().matrix();
    const Matrix s = theta.array().sin().matrix();
    real_part.selfadjointView<Eigen::Lower>().rankUpdate(c.transpose());
    real_part.selfadjointView<Eigen::Lower>().rankUpdate(s.transpose());
    cross.noalias() += c.transpose() * s;
    rhs_re.noalias() += c.transpose() * y.segment(begin, rows);
    rhs_im.noalias() -= s.transpose() * y.segment(begin, rows);
  }
  ComplexMatrix gram(num_features, num_features);
  for (Index l = 0; l < num_features; ++l) {
    for (Index k = l; k < num_features; ++k) {
      gram(k, l) = {real_part(k, l), cross(k, l) - cross(l, k)};
    }
  }
  real_part.resize(0, 0);
  cross.resize(0, 0);
  ComplexVector rhs(num_features);
  rhs.real() = rhs_re;
  rhs.imag() = rhs_im;
  return solve_hermitian(gram, rhs, lambda);
}

double effective_lambda(double lambda, LambdaScale scale, Index rows,
                        Index num_features) {
  switch (scale) {
    case LambdaScale::kAbsolute:
      return lambda;
    case LambdaScale::kPerFeature:
      return lambda * static_cast<double>(num_features);
    case LambdaScale::kPerSample:
      return lambda * static_cast<double>(rows);
  }
  return lambda;
}

RffModel fit_rff(const Matrix& x, const Vector& y, const FrequencyMatrix& omega,
                 double sigma, double lambda, LambdaScale scale) {
  if (x.rows() != y.size()) {
    throw InvalidArgument("input and response lengths differ");
  }
  RffModel model;
  model.omega = omega;
  model.sigma = sigma;
  model.lambda = lambda;
  model.standardizer = Standardizer::fit(x);
  model.y_mean = y.mean();
  const Matrix z = model.standardizer.apply(x);
  const Vector centered = y.array() - model.y_mean;
  model.beta = fit_coefficients_blocked(
      z, omega, centered,
      effective_lambda(lambda, scale, x.rows(), omega.count()));
  return model;
}

ResampleResult resample_frequencies(const TrainValidationSplit& data,
                                    const ResampleSettings& settings) {
  if (data.x_valid.rows() == 0) {
    throw InvalidArgument("validation split is empty");
  }
  if (data.x_train.rows() == 0) throw InvalidArgument("training split is empty");
  if (data.x_valid.cols() != data.x_train.cols()) {
    throw InvalidArgument("train and validation column counts differ");
  }
  if (settings.iterations < 0) {
    throw InvalidArgument("iteration count must be non-negative");
  }
  if (!(settings.step_size > 0.0)) {
    throw InvalidArgument("random walk step size must be positive");
  }
  const Index p = data.x_train.cols();
  const double sigma =
      settings.sigma > 0.0 ? settings.sigma : default_sigma(p);

  ResampleResult result;
  result.initial_frequencies =
      sample_frequencies(p, settings.num_features, sigma, settings.seed);

  const Standardizer standardizer = Standardizer::fit(data.x_train);
  const Matrix z_train = standardizer.apply(data.x_train);
  const Matrix z_valid = standardizer.apply(data.x_valid);
  const double y_mean = data.y_train.mean();
  const Vector y_centered = data.y_train.array() - y_mean;
  const double lambda_eff =
      effective_lambda(settings.lambda, settings.lambda_scale,
                       data.x_train.rows(), settings.num_features);

  std::mt19937_64 rng(mix_seed(settings.seed, 1));
  std::normal_distribution<double> normal(0.0, 1.0);

  Matrix omega = result.initial_frequencies.omega();
  double best_rmse = std::numeric_limits<double>::infinity();
  for (int it = 0; it <= settings.iterations; ++it) {
    RffModel candidate;
    candidate.omega = FrequencyMatrix(omega);
    candidate.sigma = sigma;
    candidate.lambda = settings.lambda;
    candidate.standardizer = standardizer;
    candidate.y_mean = y_mean;
    candidate.beta =
        fit_coefficients_blocked(z_train, candidate.omega, y_centered, lambda_eff);

    ResampleRecord record;
    record.iteration = it;
    record.train_rmse =
        rmse_of(real_response(z_train, candidate), y_centered);
    record.valid_rmse = rmse_of(real_response(z_valid, candidate).array() + y_mean,
                                data.y_valid);
    result.history.push_back(record);
    if (settings.on_iteration) settings.on_iteration(record);
    if (record.valid_rmse < best_rmse) {
      best_rmse = record.valid_rmse;
      result.best_iteration = it;
      result.model = candidate;
    }
    if (it == settings.iterations) break;

    const Vector weights = candidate.beta.cwiseAbs2();
    const std::vector<Index> picks =
        weighted_draw(weights, settings.num_features, rng);
    Matrix next = select_rows(omega, picks);
    const Matrix factor = walk_factor(next, settings.walk);
    Matrix noise(next.rows(), p);
    for (Index k = 0; k < noise.rows(); ++k) {
      for (Index j = 0; j < p; ++j) noise(k, j) = normal(rng);
    }
    next.noalias() += settings.step_size * noise * factor.transpose();
    omega = std::move(next);
  }
  return result;
}

Vector predict_rff(const RffModel& model, const Matrix& x_raw) {
  if (x_raw.cols() != model.standardizer.dim()) {
    throw InvalidArgument("model expects " +
                          std::to_string(model.standardizer.dim()) +
                          " input columns, got " + std::to_string(x_raw.cols()));
  }
  const Matrix z = model.standardizer.apply(x_raw);
  return real_response(z, model).array() + model.y_mean;
}

Matrix intermediate_features(const RffModel& model, const Matrix& x_raw) {
  if (x_raw.cols() != model.standardizer.dim()) {
    throw InvalidArgument("model expects " +
                          std::to_string(model.standardizer.dim()) +
                          " input columns, got " + std::to_string(x_raw.cols()));
  }
  const Matrix z = model.standardizer.apply(x_raw);
  const Eigen::RowVectorXd re = model.beta.real().transpose();
  const Eigen::RowVectorXd im = model.beta.imag().transpose();
  Matrix s(z.rows(), model.num_features());
  for (Index begin = 0; begin < z.rows(); begin += kRowBlock) {
    const Index rows = std::min(kRowBlock, z.rows() - begin);
    const Matrix theta = phases(z, model.omega, begin, rows);
    s.middleRows(begin, rows) =
        (theta.array().cos().rowwise() * re.array() -
         theta.array().sin().rowwise() * im.array())
            .matrix();
  }
  return s;
}

}  // namespace rffgam::rff
