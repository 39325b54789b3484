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

// Template tracker built on ridge-selected channels.
//
// init crops a 127x127 template around the target, trains the ridge
// regression network against a Gaussian label centred on it, ranks the
// feature channels by their pooled input gradients and keeps the top k.
// step crops 255x255 search regions over a small scale pyramid, correlates
// the selected channels against the stored template, moves to the strongest
// peak and interpolates the scale toward the winning pyramid level.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "domainsiam/features.hpp"
#include "domainsiam/loss.hpp"
#include "domainsiam/ridge.hpp"
#include "domainsiam/tensor.hpp"

namespace domainsiam {

/// Centre-format box in image pixels.
struct BBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  bool operator==(const BBox&) const = default;
};

struct TrackerConfig {
  double scale_base = 1.0375;
  std::vector<int> scale_exponents = {-2, 0, 2};
  double scale_lerp = 0.435;
  std::size_t top_k = 100;
  double label_sigma_factor = 0.1;
  ExtractorSpec extractor;
  /// alpha and a drive both training (unless train.alpha_schedule is linear)
  /// and channel scoring.
  LossParams loss;
  TrainConfig train;
  NetShape net;
  double lambda = 1e-4;
  std::uint64_t seed = 0;
  bool subcell_refinement = true;
  bool cosine_window = false;
  /// Multiplies responses of off-centre pyramid levels; 1 disables it.
  double scale_penalty = 1.0;

  void validate() const;
  /// scale_base^s for each exponent, in exponent order.
  std::vector<double> scale_factors() const;
};

struct ResponsePeak {
  std::size_t scale_index = 0;
  std::size_t row = 0;
  std::size_t col = 0;
  double score = 0.0;
};

struct ResponseMap {
  std::vector<Grid> per_scale;
  ResponsePeak best;
};

/// Global maximum over all scales and cells; ties go to the lower scale index,
/// then the lower row, then the lower column.
ResponsePeak best_peak(std::span<const Grid> per_scale);

struct TrackState {
  Point center;
  /// Box size at scale 1 (the initial box).
  double target_w = 0.0;
  double target_h = 0.0;
  double scale = 1.0;
  /// Side of the template crop at scale 1, image pixels.
  double template_crop = 0.0;
  FeatureMap template_features;  // restricted to `selected`
  std::vector<std::size_t> selected;
  ChannelScores scores;
  RidgeNet net;  // the trained scoring net
  TrackerConfig config;
  FeatureExtractor extractor;

  BBox box() const { return {center.x, center.y, target_w * scale, target_h * scale}; }
  /// Field-wise equality, ignoring the extractor callable.
  bool same_as(const TrackState& other) const;
};

/// Valid (no padding) cross-correlation summed over all channels.
/// Output is (Hs - Ht + 1) x (Ws - Wt + 1).
Grid correlate(const FeatureMap& tmpl, const FeatureMap& search);

/// Same, restricted to the listed channels of both maps.
Grid correlate(const FeatureMap& tmpl, const FeatureMap& search,
               std::span<const std::size_t> selected);

/// Throws InvalidArgument for a box under 2 px on a side or one that misses
/// the frame. An empty `extractor` means make_extractor(cfg.extractor).
TrackState init(const Frame& frame, const BBox& box, const TrackerConfig& cfg,
                FeatureExtractor extractor = {});

struct StepResult {
  TrackState state;
  BBox box;
  ResponseMap response;
};

/// Throws LostTarget when the current or updated box no longer overlaps the
/// frame; `state` is left untouched.
StepResult step(const TrackState& state, const Frame& frame);

/// (1 - lerp) * scale + lerp * scale * factor.
double interpolate_scale(double scale, double factor, double lerp);

}  // namespace domainsiam
