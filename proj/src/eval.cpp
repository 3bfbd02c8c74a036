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

#include "rffgam/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace rffgam::eval {
namespace {

double quantile(std::vector<double> values, double level) {
  std::sort(values.begin(), values.end());
  const double pos = level * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

}  // namespace

double rmse(const Vector& pred, const Vector& truth) {
  if (pred.size() != truth.size()) {
    throw InvalidArgument("prediction and truth lengths differ");
  }
  if (pred.size() == 0) throw InvalidArgument("RMSE of an empty vector");
  return std::sqrt((pred - truth).squaredNorm() / static_cast<double>(pred.size()));
}

BootstrapInterval bootstrap_ci(const Vector& residuals, int resamples,
                               double level, std::uint64_t seed) {
  if (residuals.size() == 0) throw InvalidArgument("no residuals to resample");
  if (resamples < 1) throw InvalidArgument("need at least one resample");
  if (!(level > 0.0 && level < 1.0)) {
    throw InvalidArgument("confidence level must lie in (0, 1)");
  }
  const Index n = residuals.size();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> pick(0, n - 1);
  std::vector<double> stats(static_cast<std::size_t>(resamples));
  for (double& s : stats) {
    double acc = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double r = residuals(pick(rng));
      acc += r * r;
    }
    s = std::sqrt(acc / static_cast<double>(n));
  }
  BootstrapInterval out;
  out.rmse = std::sqrt(residuals.squaredNorm() / static_cast<double>(n));
  const double tail = 0.5 * (1.0 - level);
  out.q_low = quantile(stats, tail);
  out.q_high = quantile(stats, 1.0 - tail);
  out.half_width = 0.5 * (out.q_high - out.q_low);
  return out;
}

DataSplit train_test_split(const Matrix& x, const Vector& y,
                           double train_fraction, std::uint64_t seed) {
  if (x.rows() != y.size()) throw InvalidArgument("x and y lengths differ");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgument("train fraction must lie in (0, 1)");
  }
  const auto n_train = static_cast<Index>(
      std::floor(train_fraction * static_cast<double>(x.rows())));
  if (n_train < 1 || n_train >= x.rows()) {
    throw InvalidArgument("split leaves an empty train or test set");
  }
  const std::vector<Index> perm = random_permutation(x.rows(), seed);
  DataSplit s;
  s.train_rows.assign(perm.begin(), perm.begin() + n_train);
  s.test_rows.assign(perm.begin() + n_train, perm.end());
  s.x_train = select_rows(x, s.train_rows);
  s.y_train = select_rows(y, s.train_rows);
  s.x_test = select_rows(x, s.test_rows);
  s.y_test = select_rows(y, s.test_rows);
  return s;
}

EvalReport evaluate(const std::string& label, const Predictor& predict,
                    const DataSplit& split, double runtime_seconds,
                    int resamples, std::uint64_t seed) {
  EvalReport r;
  r.label = label;
  r.protocol = "single split, bootstrap over test residuals";
  r.n_train = split.x_train.rows();
  r.n_test = split.x_test.rows();
  r.train_rmse = rmse(predict(split.x_train), split.y_train);
  const Vector residual = predict(split.x_test) - split.y_test;
  const BootstrapInterval ci = bootstrap_ci(residual, resamples, 0.95, seed);
  r.test_rmse = ci.rmse;
  r.ci_low = ci.rmse - ci.half_width;
  r.ci_high = ci.rmse + ci.half_width;
  r.runtime_seconds = runtime_seconds;
  return r;
}

MonteCarloResult monte_carlo_cv(const Matrix& x, const Vector& y,
                                const FitPredict& fit_predict, int repeats,
                                double train_fraction, std::uint64_t seed) {
  if (repeats < 2) throw InvalidArgument("Monte Carlo CV needs at least 2 repeats");
  MonteCarloResult out;
  for (int r = 0; r < repeats; ++r) {
    const auto stream = static_cast<std::uint64_t>(r);
    try {
      const DataSplit split =
          train_test_split(x, y, train_fraction, mix_seed(seed, 2 * stream));
      const Vector pred = fit_predict(split.x_train, split.y_train, split.x_test,
                                      mix_seed(seed, 2 * stream + 1));
      out.rmses.push_back(rmse(pred, split.y_test));
    } catch (const std::exception& e) {
      ++out.failures;
      out.failure_messages.push_back("run " + std::to_string(r) + ": " + e.what());
    }
  }
  const auto n = static_cast<double>(out.rmses.size());
  if (out.rmses.empty()) return out;
  double sum = 0.0;
  for (double v : out.rmses) sum += v;
  out.mean = sum / n;
  if (out.rmses.size() > 1) {
    double ss = 0.0;
    for (double v : out.rmses) ss += (v - out.mean) * (v - out.mean);
    out.half_width = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  out.ci_low = out.mean - out.half_width;
  out.ci_high = out.mean + out.half_width;
  return out;
}

MonteCarloResult monte_carlo_cv(const Matrix& x, const Vector& y,
                                const mixture::PipelineConfig& config,
                                int repeats, double train_fraction,
                                std::uint64_t seed) {
  const FitPredict fit = [&config](const Matrix& xt, const Vector& yt,
                                   const Matrix& xs, std::uint64_t run_seed) {
    mixture::PipelineConfig c = config;
    c.seed = run_seed;
    return mixture::predict_mixture(mixture::train_pipeline(xt, yt, c), xs);
  };
  return monte_carlo_cv(x, y, fit, repeats, train_fraction, seed);
}

const GridCell* GridResult::best() const {
  const GridCell* out = nullptr;
  for (const GridCell& c : cells) {
    if (c.ok && (out == nullptr || c.rmse < out->rmse)) out = &c;
  }
  return out;
}

GridResult grid_search(const DataSplit& split,
                       const mixture::PipelineConfig& base,
                       const std::vector<Index>& l_values,
                       const std::vector<Index>& d_values) {
  if (l_values.empty() || d_values.empty()) {
    throw InvalidArgument("grid search needs non-empty L and d ranges");
  }
  const Index max_d = *std::max_element(d_values.begin(), d_values.end());
  const mixture::Stage1Result stage1 =
      mixture::fit_stage1(split.x_train, split.y_train, base, max_d);
  GridResult result;
  for (Index l : l_values) {
    for (Index d : d_values) {
      GridCell cell;
      cell.num_clusters = l;
      cell.latent_dim = d;
      try {
        mixture::PipelineConfig c = base;
        c.num_clusters = l;
        c.latent_dim = d;
        const mixture::MixtureModel model = mixture::train_from_stage1(stage1, c);
        cell.rmse = rmse(mixture::predict_mixture(model, split.x_test), split.y_test);
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      result.cells.push_back(cell);
    }
  }
  return result;
}

PdCurve partial_dependence_at(const Predictor& predict, const Matrix& x,
                              Index j, const Vector& grid) {
  if (j < 0 || j >= x.cols()) throw InvalidArgument("feature index out of range");
  if (x.rows() == 0) throw InvalidArgument("partial dependence needs data");
  PdCurve curve;
  curve.feature = j;
  curve.grid = grid;
  curve.pd.resize(grid.size());
  Matrix work = x;
  for (Index g = 0; g < grid.size(); ++g) {
    work.col(j).setConstant(grid(g));
    curve.pd(g) = predict(work).mean();
  }
  return curve;
}

PdCurve partial_dependence(const Predictor& predict, const Matrix& x, Index j,
                           Index grid_size, bool clip) {
  if (j < 0 || j >= x.cols()) throw InvalidArgument("feature index out of range");
  if (grid_size < 2) throw InvalidArgument("grid needs at least two points");
  std::vector<double> col(x.col(j).data(), x.col(j).data() + x.rows());
  const double lo = clip ? quantile(col, 0.01) : *std::min_element(col.begin(), col.end());
  const double hi = clip ? quantile(col, 0.99) : *std::max_element(col.begin(), col.end());
  return partial_dependence_at(predict, x, j,
                               Vector::LinSpaced(grid_size, lo, hi));
}

ResponsibilityProfile responsibility_profile(
    const Matrix& gamma, const std::vector<long long>& category,
    const std::vector<long long>& wanted) {
  if (static_cast<Index>(category.size()) != gamma.rows()) {
    throw InvalidArgument("one category per responsibility row is required");
  }
  std::map<long long, std::pair<Vector, Index>> acc;
  for (Index i = 0; i < gamma.rows(); ++i) {
    auto [it, fresh] = acc.try_emplace(category[static_cast<std::size_t>(i)],
                                       Vector::Zero(gamma.cols()), 0);
    it->second.first += gamma.row(i).transpose();
    ++it->second.second;
  }
  std::vector<long long> cats = wanted;
  if (cats.empty()) {
    for (const auto& [c, unused] : acc) cats.push_back(c);
  }
  if (cats.empty()) throw InvalidArgument("no categories to profile");
  ResponsibilityProfile out;
  std::vector<Vector> rows;
  for (long long c : cats) {
    const auto it = acc.find(c);
    if (it == acc.end()) {
      out.omitted.push_back(c);
      continue;
    }
    out.categories.push_back(c);
    rows.push_back(it->second.first / static_cast<double>(it->second.second));
  }
  out.mean.resize(static_cast<Index>(rows.size()), gamma.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.mean.row(static_cast<Index>(r)) = rows[r].transpose();
  }
  return out;
}

}  // namespace rffgam::eval
