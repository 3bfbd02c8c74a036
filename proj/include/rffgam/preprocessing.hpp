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

#ifndef RFFGAM_PREPROCESSING_HPP_
#define RFFGAM_PREPROCESSING_HPP_

#include "rffgam/common.hpp"

namespace rffgam {

// Per-column z-score transform fitted on training inputs. Columns with zero
// spread keep a unit scale so the transform stays invertible.
struct Standardizer {
  Vector mean;
  Vector scale;

  static Standardizer fit(const Matrix& x);

  Index dim() const { return mean.size(); }
  Matrix apply(const Matrix& x) const;
  Matrix invert(const Matrix& z) const;
};

}  // namespace rffgam

#endif  // RFFGAM_PREPROCESSING_HPP_
