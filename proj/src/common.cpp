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

#include "rffgam/common.hpp"

#include <numeric>
#include <random>

namespace rffgam {

Matrix select_rows(const Matrix& m, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), m.cols());
  for (Index i = 0; i < out.rows(); ++i) {
    out.row(i) = m.row(rows[static_cast<std::size_t>(i)]);
  }
  return out;
}

Vector select_rows(const Vector& v, const std::vector<Index>& rows) {
  Vector out(static_cast<Index>(rows.size()));
  for (Index i = 0; i < out.size(); ++i) {
    out(i) = v(rows[static_cast<std::size_t>(i)]);
  }
  return out;
}

Matrix select_cols(const Matrix& m, const std::vector<Index>& cols) {
  Matrix out(m.rows(), static_cast<Index>(cols.size()));
  for (Index j = 0; j < out.cols(); ++j) {
    const Index c = cols[static_cast<std::size_t>(j)];
    if (c < 0 || c >= m.cols()) {
      throw InvalidArgument("column index " + std::to_string(c) +
                            " out of range");
    }
    out.col(j) = m.col(c);
  }
  return out;
}

std::vector<Index> random_permutation(Index n, std::uint64_t seed) {
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::mt19937_64 rng(seed);
  for (Index i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<Index> pick(0, i);
    std::swap(perm[static_cast<std::size_t>(i)],
              perm[static_cast<std::size_t>(pick(rng))]);
  }
  return perm;
}

}  // namespace rffgam
