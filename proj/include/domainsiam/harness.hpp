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

// Evaluation harness: synthetic sequences, tracking metrics, the loss
// convergence benchmark and channel-score reports.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "domainsiam/features.hpp"
#include "domainsiam/loss.hpp"
#include "domainsiam/tensor.hpp"
#include "domainsiam/tracker.hpp"

namespace domainsiam {

// ---------------------------------------------------------------------------
// Synthetic sequences

struct Motion {
  enum class Kind { still, linear, sinusoidal };
  Kind kind = Kind::still;
  double vx = 0.0;  // px per frame
  double vy = 0.0;
  double amplitude = 0.0;  // px, horizontal
  double period = 32.0;    // frames
};

struct Occlusion {
  std::size_t start = 0;
  std::size_t length = 0;
  /// Fraction of the target width covered, from its left edge.
  double fraction = 0.5;
};

struct SyntheticSpec {
  std::size_t frames = 64;
  std::size_t frame_height = 128;
  std::size_t frame_width = 128;
  double target_w = 32.0;
  double target_h = 32.0;
  /// First-frame centre; unset means the trajectory is centred in the frame.
  std::optional<Point> start;
  Motion motion;
  /// Relative size change per frame: size_t = size_0 * (1 + drift)^t.
  double scale_drift = 0.0;
  double noise_std = 0.02;
  std::optional<Occlusion> occlusion;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Sequence {
  std::vector<Frame> frames;
  std::vector<BBox> truth;
};

/// Textured square over a smooth background. Throws InvalidSpec when the
/// target would leave the frame.
Sequence synth_sequence(const SyntheticSpec& spec);

/// Ground-truth centre of frame t without rendering.
BBox synth_truth(const SyntheticSpec& spec, std::size_t t);

// ---------------------------------------------------------------------------
// Tracking metrics

/// Corner-format rectangle: top-left (x, y) and size.
struct Rect {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
};

Rect to_rect(const BBox& b);
BBox to_bbox(const Rect& r);
double iou(const Rect& a, const Rect& b);
double iou(const BBox& a, const BBox& b);

struct TrackMetrics {
  std::size_t first_frame = 1;  // sequence index of predicted[0]
  std::vector<BBox> predicted;  // one per evaluated frame
  std::vector<BBox> truth;
  std::vector<double> center_error;
  std::vector<double> iou;
  double mean_iou = 0.0;
  double success_rate = 0.0;  // fraction of frames with IoU >= 0.5
  double fps = 0.0;
  /// Frame index where LostTarget was raised, if any.
  std::optional<std::size_t> lost_at;
};

/// Metrics over aligned predicted/truth boxes; frames flagged `lost` score 0.
TrackMetrics evaluate_boxes(std::span<const BBox> predicted, std::span<const BBox> truth,
                            std::optional<std::size_t> lost_from = std::nullopt);

/// Initialises on frame 0 with the ground-truth box and evaluates frames
/// 1..n-1. A lost target is recorded, not rethrown. Throws InvalidArgument
/// for sequences shorter than two frames.
TrackMetrics run_tracking(const Sequence& seq, const TrackerConfig& cfg,
                          FeatureExtractor extractor = {});

// ---------------------------------------------------------------------------
// Loss convergence benchmark

enum class BenchLossKind { proposed, l2, l1 };

struct BenchLoss {
  std::string name;
  BenchLossKind kind = BenchLossKind::proposed;
  LossParams params;  // proposed only
};

/// Imbalanced regression batch: `foreground` hard samples with targets near 1
/// and the rest easy background samples with targets near 0, fitted by a
/// linear model on Gaussian features.
struct BenchInstance {
  std::size_t samples = 8;
  std::size_t foreground = 1;
  std::size_t dims = 8;
  double fg_low = 0.9;
  double fg_high = 1.0;
  double bg_low = 0.0;
  double bg_high = 0.1;
  /// Start from the exact interpolating weights (zero residual) instead of 0.
  bool zero_residual_init = false;
  std::uint64_t seed = 0;

  void validate() const;
};

struct BenchOptimizer {
  double lr = 0.003;
  double momentum = 0.9;
  std::size_t max_iters = 3000;
  /// Converged once loss <= threshold * initial loss.
  double threshold = 0.05;

  void validate() const;
};

struct BenchCurve {
  std::string name;
  std::vector<double> loss;  // loss before each update, max_iters + 1 entries
  /// First iteration at or below the threshold; -1 if never reached.
  long long iterations_to_threshold = -1;
};

struct BenchResult {
  std::vector<BenchCurve> curves;
};

std::vector<BenchLoss> default_bench_losses();

/// Throws InvalidArgument for fewer than two loss kinds.
BenchResult loss_bench(const BenchInstance& instance, std::span<const BenchLoss> losses,
                       const BenchOptimizer& optimizer);

// ---------------------------------------------------------------------------
// Channel inspection

struct ChannelRow {
  std::size_t channel = 0;
  double score = 0.0;
  std::size_t rank = 0;  // 1-based
  bool selected = false;
};

/// One row per channel of an initialised state, ordered by rank.
std::vector<ChannelRow> channel_rows(const TrackState& state);

/// init() followed by channel_rows().
std::vector<ChannelRow> inspect_channels(const Frame& frame, const BBox& box,
                                         const TrackerConfig& cfg,
                                         FeatureExtractor extractor = {});

// ---------------------------------------------------------------------------
// CSV renderings

std::string truth_csv(std::span<const BBox> truth);
std::vector<BBox> parse_truth_csv(const std::string& text);
std::string metrics_csv(const TrackMetrics& m);
std::string metrics_summary_csv(const TrackMetrics& m);
std::string curves_csv(const BenchResult& r);
std::string bench_summary_csv(const BenchResult& r);
std::string channels_csv(std::span<const ChannelRow> rows);

}  // namespace domainsiam
