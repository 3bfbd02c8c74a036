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

#include "rffgam/latent.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <lapacke.h>

namespace rffgam::latent {
namespace {

constexpr Index kRowBlock = 1024;
// Above this many entries the centered matrix is not decomposed directly.
constexpr double kDenseSvdLimit = 4.0e6;

void check_target_dim(Index d, Index n, Index k) {
  if (d < 1 || d > std::min(n, k)) {
    throw InvalidArgument("PCA dimension " + std::to_string(d) +
                          " outside [1, " + std::to_string(std::min(n, k)) + "]");
  }
}

Index leading_count(Index d, Index n, Index k) {
  return std::min(std::max(d, kLeadingComponents), std::min(n, k));
}

// Flips each row so that its largest-magnitude entry is positive.
void fix_signs(Matrix& rows) {
  for (Index r = 0; r < rows.rows(); ++r) {
    Index arg = 0;
    rows.row(r).cwiseAbs().maxCoeff(&arg);
    if (rows(r, arg) < 0.0) rows.row(r) *= -1.0;
  }
}

// Top `m` eigenpairs of a symmetric matrix whose lower triangle is filled.
// Returns eigenvalues descending and eigenvectors as rows.
void top_eigenpairs(Matrix gram, Index m, Vector& values, Matrix& vectors) {
  const auto n = static_cast<lapack_int>(gram.rows());
  const auto count = static_cast<lapack_int>(m);
  lapack_int found = 0;
  Vector w(gram.rows());
  Matrix z(gram.rows(), m);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(m));
  const lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', 'I', 'L', n, gram.data(), n, 0.0, 0.0,
      n - count + 1, n, 0.0, &found, w.data(), z.data(), n, support.data());
  if (info != 0 || found != count) {
    throw NumericalFailure("symmetric eigen-decomposition failed (info " +
                           std::to_string(info) + ")");
  }
  values.resize(m);
  vectors.resize(m, gram.rows());
  for (Index r = 0; r < m; ++r) {
    values(r) = w(m - 1 - r);
    vectors.row(r) = z.col(m - 1 - r).transpose();
  }
}

LatentProjector from_gram(Matrix gram, Vector mean, Index n, Index d) {
  const Index m = leading_count(d, n, gram.rows());
  Vector values;
  Matrix vectors;
  top_eigenpairs(std::move(gram), m, values, vectors);
  fix_signs(vectors);
  LatentProjector full;
  full.s_mean = std::move(mean);
  full.v_d = std::move(vectors);
  full.singular_values = values.cwiseMax(0.0).cwiseSqrt();
  return truncate(full, d);
}

}  // namespace

LatentProjector fit_pca(const Matrix& s, Index d) {
  check_target_dim(d, s.rows(), s.cols());
  if (!s.allFinite()) throw InvalidArgument("feature matrix is not finite");
  const Vector mean = s.colwise().mean().transpose();
  const Matrix centered = s.rowwise() - mean.transpose();
  if (static_cast<double>(s.rows()) * static_cast<double>(s.cols()) >
      kDenseSvdLimit) {
    Matrix gram = Matrix::Zero(s.cols(), s.cols());
    gram.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose());
    return from_gram(std::move(gram), mean, s.rows(), d);
  }
  Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw NumericalFailure("singular value decomposition failed");
  }
  const Index m = leading_count(d, s.rows(), s.cols());
  LatentProjector full;
  full.s_mean = mean;
  full.v_d = svd.matrixV().leftCols(m).transpose();
  fix_signs(full.v_d);
  full.singular_values = svd.singularValues().head(m);
  return truncate(full, d);
}

LatentProjector fit_pca(const rff::RffModel& model, const Matrix& x_raw,
                        Index d) {
  const Index n = x_raw.rows();
  const Index k = model.num_features();
  check_target_dim(d, n, k);
  Vector mean = Vector::Zero(k);
  for (Index begin = 0; begin < n; begin += kRowBlock) {
    const Index rows = std::min(kRowBlock, n - begin);
    mean += rff::intermediate_features(model, x_raw.middleRows(begin, rows))
                .colwise()
                .sum()
                .transpose();
  }
  mean /= static_cast<double>(n);
  Matrix gram = Matrix::Zero(k, k);
  for (Index begin = 0; begin < n; begin += kRowBlock) {
    const Index rows = std::min(kRowBlock, n - begin);
    const Matrix block =
        rff::intermediate_features(model, x_raw.middleRows(begin, rows))
            .rowwise() -
        mean.transpose();
    gram.selfadjointView<Eigen::Lower>().rankUpdate(block.transpose());
  }
  return from_gram(std::move(gram), std::move(mean), n, d);
}

LatentProjector truncate(const LatentProjector& projector, Index d) {
  if (d < 1 || d > projector.dim()) {
    throw InvalidArgument("cannot truncate projector of dimension " +
                          std::to_string(projector.dim()) + " to " +
                          std::to_string(d));
  }
  LatentProjector out;
  out.s_mean = projector.s_mean;
  out.v_d = projector.v_d.topRows(d);
  out.singular_values = projector.singular_values.head(d);
  return out;
}

Vector project(const LatentProjector& projector, const Vector& s) {
  if (s.size() != projector.num_features()) {
    throw InvalidArgument("feature vector has length " +
                          std::to_string(s.size()) + ", projector expects " +
                          std::to_string(projector.num_features()));
  }
  return projector.v_d * (s - projector.s_mean);
}

Matrix project_rows(const LatentProjector& projector, const Matrix& s) {
  if (s.cols() != projector.num_features()) {
    throw InvalidArgument("feature matrix has " + std::to_string(s.cols()) +
                          " columns, projector expects " +
                          std::to_string(projector.num_features()));
  }
  return (s.rowwise() - projector.s_mean.transpose()) *
         projector.v_d.transpose();
}

Matrix project_inputs(const LatentProjector& projector,
                      const rff::RffModel& model, const Matrix& x_raw) {
  if (model.num_features() != projector.num_features()) {
    throw InvalidArgument("projector and RFF model disagree on K");
  }
  Matrix z(x_raw.rows(), projector.dim());
  for (Index begin = 0; begin < x_raw.rows(); begin += kRowBlock) {
    const Index rows = std::min(kRowBlock, x_raw.rows() - begin);
    z.middleRows(begin, rows) = project_rows(
        projector,
        rff::intermediate_features(model, x_raw.middleRows(begin, rows)));
  }
  return z;
}

double scott_bandwidth(const rff::FrequencyMatrix& omega) {
  const Matrix& w = omega.omega();
  const auto k = static_cast<double>(w.rows());
  const auto p = static_cast<double>(w.cols());
  const Matrix centered = w.rowwise() - w.colwise().mean();
  const double variance =
      centered.squaredNorm() / std::max(k - 1.0, 1.0) / p;
  const double h = std::pow(k, -1.0 / (p + 4.0)) * std::sqrt(variance);
  return h > 0.0 ? h : 1.0;
}

Vector kde_weights(const rff::FrequencyMatrix& omega, double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw InvalidArgument("KDE bandwidth must be positive");
  }
  const Matrix& w = omega.omega();
  const Index k = w.rows();
  const Vector norms = w.rowwise().squaredNorm();
  const double scale = -0.5 / (bandwidth * bandwidth);
  constexpr Index kBlock = 256;
  Vector density(k);
  for (Index begin = 0; begin < k; begin += kBlock) {
    const Index rows = std::min(kBlock, k - begin);
    Matrix dist = -2.0 * w.middleRows(begin, rows) * w.transpose();
    dist.colwise() += norms.segment(begin, rows);
    dist.rowwise() += norms.transpose();
    density.segment(begin, rows) =
        (dist.array().max(0.0) * scale).exp().rowwise().sum();
  }
  return density / density.sum();
}

FrequencyAnalysis weighted_frequency_pca(const rff::FrequencyMatrix& omega,
                                         double bandwidth) {
  const Matrix& w = omega.omega();
  if (w.rows() < w.cols() + 1) {
    throw InvalidArgument("weighted frequency PCA needs at least p + 1 samples");
  }
  FrequencyAnalysis out;
  out.kde_bandwidth = bandwidth;
  out.weights = kde_weights(omega, bandwidth);
  const Vector mean = w.transpose() * out.weights;
  const Matrix centered = w.rowwise() - mean.transpose();
  const Matrix moment =
      centered.transpose() * out.weights.asDiagonal() * centered;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(moment);
  if (eig.info() != Eigen::Success) {
    throw NumericalFailure("eigen-decomposition of frequency moment failed");
  }
  const Index p = w.cols();
  out.principal_directions.resize(p, p);
  out.weighted_eigenvalues.resize(p);
  for (Index j = 0; j < p; ++j) {
    out.weighted_eigenvalues(j) = std::max(eig.eigenvalues()(p - 1 - j), 0.0);
    out.principal_directions.col(j) = eig.eigenvectors().col(p - 1 - j);
  }
  Matrix rows = out.principal_directions.transpose();
  fix_signs(rows);
  out.principal_directions = rows.transpose();
  return out;
}

FrequencyAnalysis weighted_frequency_pca(const rff::FrequencyMatrix& omega) {
  return weighted_frequency_pca(omega, scott_bandwidth(omega));
}

}  // namespace rffgam::latent
