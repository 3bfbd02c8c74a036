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

#include "rffgam/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace rffgam::gmm {
namespace {

constexpr int kLloydIterations = 100;

struct Factorized {
  std::vector<Matrix> chol;
  std::vector<double> log_norm;
};

Factorized factorize(const GmmModel& model) {
  const auto d = static_cast<double>(model.dim());
  Factorized out;
  for (const Matrix& cov : model.covariances) {
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success) {
      throw NumericalFailure("mixture covariance is not positive definite");
    }
    Matrix l = llt.matrixL();
    const double log_det = 2.0 * l.diagonal().array().log().sum();
    out.log_norm.push_back(-0.5 * (d * std::log(2.0 * std::numbers::pi) + log_det));
    out.chol.push_back(std::move(l));
  }
  return out;
}

// N x L matrix of log(pi_l) + log N(z_i; mu_l, Sigma_l).
Matrix log_joint(const GmmModel& model, const Matrix& z) {
  if (z.cols() != model.dim()) {
    throw InvalidArgument("points have dimension " + std::to_string(z.cols()) +
                          ", mixture has " + std::to_string(model.dim()));
  }
  const Factorized f = factorize(model);
  Matrix out(z.rows(), model.num_components());
  for (Index l = 0; l < model.num_components(); ++l) {
    const Matrix diff = (z.rowwise() - model.means[l].transpose()).transpose();
    const Matrix white =
        f.chol[l].triangularView<Eigen::Lower>().solve(diff);
    const double log_weight = model.weights(l) > 0.0
                                  ? std::log(model.weights(l))
                                  : -std::numeric_limits<double>::infinity();
    out.col(l) = (log_weight + f.log_norm[l] -
                  0.5 * white.colwise().squaredNorm().array())
                     .transpose();
  }
  return out;
}

// Normalizes rows of `logp` in place into responsibilities and returns the
// per-row log normalizers.
Vector normalize_rows(Matrix& logp) {
  Vector lse(logp.rows());
  for (Index i = 0; i < logp.rows(); ++i) {
    const double m = logp.row(i).maxCoeff();
    logp.row(i) = (logp.row(i).array() - m).exp();
    const double total = logp.row(i).sum();
    logp.row(i) /= total;
    lse(i) = m + std::log(total);
  }
  return lse;
}

double ridge_for(const Matrix& cov, double fallback) {
  const double r = kCovarianceRidge * cov.trace() / static_cast<double>(cov.rows());
  return r > fallback * 1e-6 ? r : fallback;
}

Matrix scatter(const Matrix& z, const Vector& mean, const Vector& weight,
               double total) {
  const Matrix centered = z.rowwise() - mean.transpose();
  return centered.transpose() * weight.asDiagonal() * centered / total;
}

GmmModel initialize(const Matrix& z, Index num_components, std::uint64_t seed,
                    double fallback_ridge) {
  const Index n = z.rows();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  // k-means++ seeding.
  std::vector<Index> chosen;
  chosen.push_back(static_cast<Index>(rng() % static_cast<std::uint64_t>(n)));
  Vector nearest = (z.rowwise() - z.row(chosen[0])).rowwise().squaredNorm();
  while (static_cast<Index>(chosen.size()) < num_components) {
    const double total = nearest.sum();
    Index pick = 0;
    if (total > 0.0) {
      const double target = uniform(rng) * total;
      double acc = 0.0;
      pick = n - 1;
      for (Index i = 0; i < n; ++i) {
        acc += nearest(i);
        if (acc > target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Index>(rng() % static_cast<std::uint64_t>(n));
    }
    chosen.push_back(pick);
    nearest = nearest.cwiseMin(
        (z.rowwise() - z.row(pick)).rowwise().squaredNorm());
  }
  Matrix centers = select_rows(z, chosen);

  // Lloyd refinement.
  std::vector<Index> label(static_cast<std::size_t>(n), -1);
  for (int it = 0; it < kLloydIterations; ++it) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      Index best = 0;
      (centers.rowwise() - z.row(i)).rowwise().squaredNorm().minCoeff(&best);
      if (label[static_cast<std::size_t>(i)] != best) {
        label[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed) break;
    Matrix sums = Matrix::Zero(num_components, z.cols());
    Vector counts = Vector::Zero(num_components);
    for (Index i = 0; i < n; ++i) {
      sums.row(label[static_cast<std::size_t>(i)]) += z.row(i);
      counts(label[static_cast<std::size_t>(i)]) += 1.0;
    }
    for (Index l = 0; l < num_components; ++l) {
      if (counts(l) > 0.0) centers.row(l) = sums.row(l) / counts(l);
    }
  }

  const Vector global_mean = z.colwise().mean().transpose();
  const Matrix global_cov =
      scatter(z, global_mean, Vector::Ones(n), static_cast<double>(n));
  GmmModel model;
  model.weights.resize(num_components);
  for (Index l = 0; l < num_components; ++l) {
    Vector member = Vector::Zero(n);
    for (Index i = 0; i < n; ++i) {
      if (label[static_cast<std::size_t>(i)] == l) member(i) = 1.0;
    }
    const double count = member.sum();
    const Vector mean = centers.row(l).transpose();
    Matrix cov = count >= 2.0 ? scatter(z, mean, member, count) : global_cov;
    cov.diagonal().array() += ridge_for(cov, fallback_ridge);
    model.weights(l) = std::max(count, 1.0);
    model.means.push_back(mean);
    model.covariances.push_back(std::move(cov));
  }
  model.weights /= model.weights.sum();
  return model;
}

GmmModel maximize(const Matrix& z, const Matrix& resp, const GmmModel& previous,
                  double fallback_ridge) {
  const auto n = static_cast<double>(z.rows());
  GmmModel model;
  model.weights.resize(resp.cols());
  for (Index l = 0; l < resp.cols(); ++l) {
    const Vector gamma = resp.col(l);
    const double mass = gamma.sum();
    model.weights(l) = mass / n;
    if (mass < 1e-12 * n) {
      model.means.push_back(previous.means[l]);
      model.covariances.push_back(previous.covariances[l]);
      continue;
    }
    const Vector mean = z.transpose() * gamma / mass;
    Matrix cov = scatter(z, mean, gamma, mass);
    cov.diagonal().array() += ridge_for(cov, fallback_ridge);
    model.means.push_back(mean);
    model.covariances.push_back(std::move(cov));
  }
  model.weights /= model.weights.sum();
  return model;
}

}  // namespace

EmTrace fit_em_traced(const Matrix& z, Index num_components,
                      const EmSettings& settings) {
  if (num_components < 1) {
    throw InvalidArgument("number of mixture components must be positive");
  }
  if (z.rows() < num_components) {
    throw InvalidArgument("need at least as many points (" +
                          std::to_string(z.rows()) + ") as components (" +
                          std::to_string(num_components) + ")");
  }
  if (z.cols() < 1 || !z.allFinite()) {
    throw InvalidArgument("mixture input must be finite with d >= 1");
  }
  const Vector mean = z.colwise().mean().transpose();
  const Matrix global_cov = scatter(z, mean, Vector::Ones(z.rows()),
                                    static_cast<double>(z.rows()));
  double fallback = kCovarianceRidge * global_cov.trace() /
                    static_cast<double>(z.cols());
  if (!(fallback > 0.0)) fallback = kCovarianceRidge;

  EmTrace trace;
  trace.model = initialize(z, num_components, settings.seed, fallback);
  Matrix resp = log_joint(trace.model, z);
  double ll = normalize_rows(resp).sum();
  trace.log_likelihood.push_back(ll);
  for (int it = 0; it < settings.max_iter; ++it) {
    trace.model = maximize(z, resp, trace.model, fallback);
    resp = log_joint(trace.model, z);
    const double next = normalize_rows(resp).sum();
    trace.log_likelihood.push_back(next);
    ++trace.iterations;
    if (!std::isfinite(next)) {
      throw NumericalFailure("mixture log-likelihood became non-finite");
    }
    if (next - ll < settings.tol * std::abs(ll)) {
      trace.converged = true;
      break;
    }
    ll = next;
  }
  return trace;
}

GmmModel fit_em(const Matrix& z, Index num_components,
                const EmSettings& settings) {
  return fit_em_traced(z, num_components, settings).model;
}

Matrix responsibilities(const GmmModel& model, const Matrix& z) {
  Matrix resp = log_joint(model, z);
  normalize_rows(resp);
  return resp;
}

Vector responsibilities(const GmmModel& model, const Vector& z) {
  return responsibilities(model, Matrix(z.transpose())).row(0).transpose();
}

double log_likelihood(const GmmModel& model, const Matrix& z) {
  Matrix resp = log_joint(model, z);
  return normalize_rows(resp).sum();
}

std::vector<Index> hard_assign(const GmmModel& model, const Matrix& z) {
  const Matrix resp = responsibilities(model, z);
  std::vector<Index> out(static_cast<std::size_t>(z.rows()));
  for (Index i = 0; i < resp.rows(); ++i) {
    Index best = 0;
    for (Index l = 1; l < resp.cols(); ++l) {
      if (resp(i, l) > resp(i, best)) best = l;
    }
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

GmmModel select_components(const GmmModel& model,
                           const std::vector<Index>& keep) {
  if (keep.empty()) throw InvalidArgument("cannot keep zero components");
  GmmModel out;
  out.weights.resize(static_cast<Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const Index l = keep[i];
    if (l < 0 || l >= model.num_components()) {
      throw InvalidArgument("component index out of range");
    }
    out.weights(static_cast<Index>(i)) = model.weights(l);
    out.means.push_back(model.means[static_cast<std::size_t>(l)]);
    out.covariances.push_back(model.covariances[static_cast<std::size_t>(l)]);
  }
  const double total = out.weights.sum();
  if (!(total > 0.0)) throw InvalidArgument("kept components have zero weight");
  out.weights /= total;
  return out;
}

}  // namespace rffgam::gmm
