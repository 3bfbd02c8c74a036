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

// Independent reference computations shared by the unit and acceptance
// suites. None of these call the solver paths they are compared against.

#ifndef RFFGAM_TESTS_ORACLES_HPP_
#define RFFGAM_TESTS_ORACLES_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

#include "rffgam/common.hpp"
#include "rffgam/gam.hpp"
#include "rffgam/kernel_ridge.hpp"
#include "rffgam/rff.hpp"

namespace rffgam::testing {

// (PhiᴴPhi + λI)⁻¹Phiᴴy by explicit inversion.
inline ComplexVector dense_inverse_coefficients(const ComplexMatrix& phi,
                                                const Vector& y, double lambda) {
  const ComplexMatrix a =
      phi.adjoint() * phi +
      lambda * ComplexMatrix::Identity(phi.cols(), phi.cols());
  return a.inverse() * (phi.adjoint() * y.cast<std::complex<double>>());
}

// Fitted values of the centered additive problem from its KKT system, using
// the bases and penalty weight of an already fitted model.
inline Vector joint_fitted_values(const Matrix& x, const Vector& y,
                                  const gam::GamModel& model) {
  const Index n = x.rows();
  std::vector<Matrix> blocks;
  Index q = 0;
  for (const gam::SplineBasis& basis : model.bases) {
    blocks.push_back(basis.design(x.col(basis.feature_index)));
    q += blocks.back().cols();
  }
  const auto p = static_cast<Index>(blocks.size());
  Matrix b(n, q);
  Matrix pen = Matrix::Zero(q, q);
  Matrix c = Matrix::Zero(p, q);
  Index offset = 0;
  for (Index j = 0; j < p; ++j) {
    const Matrix& bj = blocks[static_cast<std::size_t>(j)];
    b.middleCols(offset, bj.cols()) = bj;
    if (model.bases[static_cast<std::size_t>(j)].kind == gam::TermKind::kSpline) {
      pen.block(offset, offset, bj.cols(), bj.cols()) =
          model.smooth_lambda * gam::penalty_matrix(bj.cols());
    }
    c.block(j, offset, 1, bj.cols()) = bj.colwise().sum();
    offset += bj.cols();
  }
  const double alpha = y.mean();
  Matrix kkt = Matrix::Zero(q + p, q + p);
  kkt.topLeftCorner(q, q) = b.transpose() * b + pen;
  kkt.topRightCorner(q, p) = c.transpose();
  kkt.bottomLeftCorner(p, q) = c;
  Vector rhs = Vector::Zero(q + p);
  rhs.head(q) = b.transpose() * (y.array() - alpha).matrix();
  const Vector sol = kkt.fullPivLu().solve(rhs);
  return (b * sol.head(q)).array() + alpha;
}

// Least-squares slope of log(mean max |k̂ - k|) against log K, where k̂ is the
// Monte Carlo kernel estimate from K sampled frequencies.
inline double kernel_error_slope(const Matrix& x, double sigma,
                                 const std::vector<Index>& counts, int repeats) {
  const Index n = x.rows();
  Matrix kernel(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      kernel(i, j) = rff::gaussian_kernel(x.row(i).transpose(), x.row(j).transpose(),
                                     sigma);
    }
  }
  std::vector<double> log_k;
  std::vector<double> log_err;
  for (Index k : counts) {
    double err = 0.0;
    for (int r = 0; r < repeats; ++r) {
      const ComplexMatrix phi = rff::build_design_matrix(
          x, rff::sample_frequencies(x.cols(), k, sigma,
                                     static_cast<std::uint64_t>(1000 * k + r)));
      const Matrix approx =
          (phi * phi.adjoint()).real() / static_cast<double>(k);
      err += (approx - kernel).cwiseAbs().maxCoeff();
    }
    log_k.push_back(std::log(static_cast<double>(k)));
    log_err.push_back(std::log(err / repeats));
  }
  double mk = 0.0;
  double me = 0.0;
  for (std::size_t i = 0; i < log_k.size(); ++i) {
    mk += log_k[i];
    me += log_err[i];
  }
  mk /= static_cast<double>(log_k.size());
  me /= static_cast<double>(log_k.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < log_k.size(); ++i) {
    sxy += (log_k[i] - mk) * (log_err[i] - me);
    sxx += (log_k[i] - mk) * (log_k[i] - mk);
  }
  return sxy / sxx;
}

}  // namespace rffgam::testing

#endif  // RFFGAM_TESTS_ORACLES_HPP_
