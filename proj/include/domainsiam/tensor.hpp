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
#include <span>
#include <vector>

namespace domainsiam {

/// Row-major H x W grid of doubles.
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t height, std::size_t width, double fill = 0.0)
      : height_(height), width_(width), data_(height * width, fill) {}

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * width_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * width_ + c]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  std::span<const double> row(std::size_t r) const noexcept {
    return std::span<const double>(data_).subspan(r * width_, width_);
  }

  bool operator==(const Grid&) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> data_;
};

/// H x W x C tensor, channel-last: the C values of one cell are contiguous.
/// `stride` is how many input pixels one feature cell steps over.
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(std::size_t height, std::size_t width, std::size_t channels, std::size_t stride = 1)
      : height_(height),
        width_(width),
        channels_(channels),
        stride_(stride),
        data_(height * width * channels, 0.0) {}

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t stride() const noexcept { return stride_; }
  std::size_t cells() const noexcept { return height_ * width_; }

  double& at(std::size_t r, std::size_t c, std::size_t ch) noexcept {
    return data_[(r * width_ + c) * channels_ + ch];
  }
  double at(std::size_t r, std::size_t c, std::size_t ch) const noexcept {
    return data_[(r * width_ + c) * channels_ + ch];
  }

  std::span<const double> cell(std::size_t r, std::size_t c) const noexcept {
    return std::span<const double>(data_).subspan((r * width_ + c) * channels_, channels_);
  }
  /// One image row across all channels, length width * channels.
  std::span<const double> row(std::size_t r) const noexcept {
    return std::span<const double>(data_).subspan(r * width_ * channels_, width_ * channels_);
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  Grid channel(std::size_t ch) const;
  void set_channel(std::size_t ch, const Grid& g);

  /// Copy restricted to the listed channels, in list order.
  FeatureMap select(std::span<const std::size_t> channels) const;

  bool operator==(const FeatureMap&) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t channels_ = 0;
  std::size_t stride_ = 1;
  std::vector<double> data_;
};

/// Grayscale image, pixels in [0, 1].
using Frame = Grid;

}  // namespace domainsiam
