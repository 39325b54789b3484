// Copyright 2026 the domainsiam authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>

#include "domainsiam/tensor.hpp"

namespace domainsiam {

struct GridPoint {
  double row = 0.0;
  double col = 0.0;
};

/// Gaussian soft-label map: values(r, c) = exp(-|(r, c) - center|^2 / (2 sigma^2)).
struct LabelMap {
  GridPoint center;
  double sigma = 1.0;
  Grid values;

  std::size_t height() const noexcept { return values.height(); }
  std::size_t width() const noexcept { return values.width(); }
};

/// Throws InvalidArgument for empty grids, sigma <= 0 or a center outside
/// [0, height-1] x [0, width-1].
LabelMap gaussian_label(std::size_t height, std::size_t width, GridPoint center, double sigma);

/// Tracker default: 0.1 * sqrt(w * h), sizes in feature cells.
double default_label_sigma(double target_w_cells, double target_h_cells, double factor = 0.1);

}  // namespace domainsiam
