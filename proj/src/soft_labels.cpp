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

#include "domainsiam/soft_labels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "domainsiam/error.hpp"

namespace domainsiam {

LabelMap gaussian_label(std::size_t height, std::size_t width, GridPoint center, double sigma) {
  if (height == 0 || width == 0) throw InvalidArgument("label map must be non-empty");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("sigma must be positive");
  if (!(center.row >= 0.0 && center.row <= static_cast<double>(height - 1) &&
        center.col >= 0.0 && center.col <= static_cast<double>(width - 1))) {
    throw InvalidArgument("label center outside the grid");
  }
  LabelMap map{center, sigma, Grid(height, width)};
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (std::size_t r = 0; r < height; ++r) {
    const double dr = static_cast<double>(r) - center.row;
    for (std::size_t c = 0; c < width; ++c) {
      const double dc = static_cast<double>(c) - center.col;
      // Far cells would underflow to 0; labels stay strictly positive.
      map.values(r, c) = std::max(std::exp(-(dr * dr + dc * dc) * inv),
                                  std::numeric_limits<double>::min());
    }
  }
  return map;
}

double default_label_sigma(double target_w_cells, double target_h_cells, double factor) {
  if (!(target_w_cells > 0.0 && target_h_cells > 0.0)) {
    throw InvalidArgument("target size must be positive");
  }
  return factor * std::sqrt(target_w_cells * target_h_cells);
}

}  // namespace domainsiam
