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
#include <cstdint>
#include <functional>

#include "domainsiam/tensor.hpp"

namespace domainsiam {

/// Image coordinates: x is the column, y the row; pixel centres sit on integers.
struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline constexpr std::size_t kTemplateSize = 127;
inline constexpr std::size_t kSearchSize = 255;

/// Square crop of side `crop_size` centred at `center`, bilinearly resampled
/// to out_size x out_size. Samples falling outside the frame take the mean of
/// the in-frame samples. Throws InvalidArgument if no sample lands in-frame.
Frame extract_patch(const Frame& frame, Point center, double crop_size, std::size_t out_size);

enum class ExtractorKind { raw, gradients, random_filters };

struct ExtractorSpec {
  ExtractorKind kind = ExtractorKind::gradients;
  std::size_t filter_count = 8;
  std::size_t filter_size = 5;
  std::uint64_t seed = 0;
  std::size_t stride = 4;

  void validate() const;
  /// Pixel step between feature cells; raw is always 1.
  std::size_t effective_stride() const;
  /// Patch-pixel coordinate of the centre of feature cell 0.
  double origin() const;
  std::size_t channels() const;
};

/// raw: the patch itself (C = 1, stride 1).
/// gradients: horizontal and vertical central differences (C = 2), averaged
///   over stride x stride blocks.
/// random_filters: valid cross-correlation with `filter_count` seeded
///   zero-mean unit-norm filters, sampled every `stride` pixels.
FeatureMap extract_features(const Frame& patch, const ExtractorSpec& spec);

/// Maps a patch to a feature map; a substitute for a learned backbone.
using FeatureExtractor = std::function<FeatureMap(const Frame&)>;

FeatureExtractor make_extractor(const ExtractorSpec& spec);

}  // namespace domainsiam
