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

#include "rffgam/augment.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "rffgam/preprocessing.hpp"

namespace rffgam::augment {
namespace {

constexpr int kMaxTerms = 1000;
constexpr double kEps = 1e-16;

double lower_gamma_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxTerms; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper tail Q(a, x) by the modified Lentz continued fraction.
double upper_gamma_fraction(double a, double x) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxTerms; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_lower_gamma(double a, double x) {
  if (!(a > 0.0)) throw InvalidArgument("gamma shape must be positive");
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) return lower_gamma_series(a, x);
  return 1.0 - upper_gamma_fraction(a, x);
}

double chi2_threshold(int dof, double quantile) {
  if (dof < 1) throw InvalidArgument("degrees of freedom must be positive");
  if (!(quantile > 0.0 && quantile < 1.0)) {
    throw InvalidArgument("quantile must lie in (0, 1)");
  }
  const double a = 0.5 * dof;
  auto cdf = [a](double t) { return regularized_lower_gamma(a, 0.5 * t); };
  double lo = 0.0;
  double hi = std::max(1.0, static_cast<double>(dof));
  while (cdf(hi) < quantile) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-12 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) < quantile) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Vector mahalanobis_squared(const Matrix& z, const Vector& mean,
                           const Matrix& cov) {
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw NumericalFailure("covariance for Mahalanobis distance is singular");
  }
  const Matrix diff = (z.rowwise() - mean.transpose()).transpose();
  return llt.matrixL().solve(diff).colwise().squaredNorm().transpose();
}

AugmentedData augment_dataset(const Matrix& x, const Vector& y,
                              const rff::RffModel& labeler,
                              const std::vector<Index>& labeler_columns,
                              const AugmentConfig& config) {
  if (config.n_per_point < 0) {
    throw InvalidArgument("perturbations per point must be non-negative");
  }
  if (!(config.epsilon > 0.0)) {
    throw InvalidArgument("perturbation variance must be positive");
  }
  if (x.rows() != y.size() || x.rows() < 2) {
    throw InvalidArgument("augmentation needs at least two labelled rows");
  }
  const Index n = x.rows();
  const Index p = x.cols();
  const Standardizer standardizer = Standardizer::fit(x);
  const Matrix z = standardizer.apply(x);
  const Vector mean = z.colwise().mean().transpose();
  const Matrix centered = z.rowwise() - mean.transpose();
  Matrix cov = centered.transpose() * centered / static_cast<double>(n - 1);
  if (Eigen::LLT<Matrix>(cov).info() != Eigen::Success) {
    cov.diagonal().array() += 1e-8;
  }

  AugmentedData out;
  out.num_original = n;
  out.threshold = chi2_threshold(static_cast<int>(p), config.chi2_quantile);
  const double step = std::sqrt(config.epsilon);

  const Index total = n * config.n_per_point;
  Matrix candidates(total, p);
  for (Index i = 0; i < n; ++i) {
    std::mt19937_64 rng(mix_seed(config.seed, static_cast<std::uint64_t>(i)));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int r = 0; r < config.n_per_point; ++r) {
      const Index row = i * config.n_per_point + r;
      for (Index j = 0; j < p; ++j) {
        candidates(row, j) = z(i, j) + step * normal(rng);
      }
    }
  }
  out.num_candidates = total;
  const Vector dist = mahalanobis_squared(candidates, mean, cov);
  std::vector<Index> keep;
  for (Index r = 0; r < total; ++r) {
    if (dist(r) <= out.threshold) keep.push_back(r);
  }
  out.num_accepted = static_cast<Index>(keep.size());

  const Matrix synthetic = standardizer.invert(select_rows(candidates, keep));
  const Vector labels =
      labeler_columns.empty()
          ? rff::predict_rff(labeler, synthetic)
          : rff::predict_rff(labeler, select_cols(synthetic, labeler_columns));

  out.x.resize(n + out.num_accepted, p);
  out.x.topRows(n) = x;
  out.x.bottomRows(out.num_accepted) = synthetic;
  out.y.resize(n + out.num_accepted);
  out.y.head(n) = y;
  out.y.tail(out.num_accepted) = labels;
  out.is_synthetic.assign(static_cast<std::size_t>(n + out.num_accepted), false);
  for (Index r = n; r < n + out.num_accepted; ++r) {
    out.is_synthetic[static_cast<std::size_t>(r)] = true;
  }
  return out;
}

}  // namespace rffgam::augment
