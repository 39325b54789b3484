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

#include "domainsiam/tensor.hpp"

#include "domainsiam/error.hpp"

namespace domainsiam {

Grid FeatureMap::channel(std::size_t ch) const {
  if (ch >= channels_) throw InvalidArgument("channel index out of range");
  Grid g(height_, width_);
  for (std::size_t r = 0; r < height_; ++r)
    for (std::size_t c = 0; c < width_; ++c) g(r, c) = at(r, c, ch);
  return g;
}

void FeatureMap::set_channel(std::size_t ch, const Grid& g) {
  if (ch >= channels_) throw InvalidArgument("channel index out of range");
  if (g.height() != height_ || g.width() != width_) throw InvalidArgument("grid shape mismatch");
  for (std::size_t r = 0; r < height_; ++r)
    for (std::size_t c = 0; c < width_; ++c) at(r, c, ch) = g(r, c);
}

FeatureMap FeatureMap::select(std::span<const std::size_t> channels) const {
  FeatureMap out(height_, width_, channels.size(), stride_);
  for (std::size_t k = 0; k < channels.size(); ++k) {
    if (channels[k] >= channels_) throw InvalidArgument("selected channel out of range");
  }
  for (std::size_t cell = 0; cell < cells(); ++cell) {
    for (std::size_t k = 0; k < channels.size(); ++k) {
      out.data_[cell * channels.size() + k] = data_[cell * channels_ + channels[k]];
    }
  }
  return out;
}

}  // namespace domainsiam
