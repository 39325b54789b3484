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

// Ridge regression of feature maps onto soft-label maps.
//
// Two solvers for the same objective  sum (W*X - Y)^2 + lambda ||W||^2:
//  - closed_form: the normal-equation solution (X^T X + lambda I)^{-1} X^T Y,
//    used as an oracle;
//  - train_net: a small convolutional regression network fitted by momentum
//    gradient descent under the weighted robust loss.
// The trained network's input gradients, globally average-pooled per channel,
// rank channels by how strongly the regression depends on them.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "domainsiam/loss.hpp"
#include "domainsiam/soft_labels.hpp"
#include "domainsiam/tensor.hpp"

namespace domainsiam {

struct RidgeLinearModel {
  std::vector<double> weights;
  double lambda = 0.0;
};

/// X is N x D (rows are samples), Y has N entries. Throws SingularSystem when
/// X^T X + lambda I is not positive definite to working precision.
RidgeLinearModel closed_form(const Grid& X, std::span<const double> Y, double lambda);

/// sum_n (X w - Y)_n^2 + lambda * ||w||^2.
double ridge_objective(const RidgeLinearModel& model, const Grid& X, std::span<const double> Y,
                       double lambda);

/// Same-padded 2-D convolution (cross-correlation) layer.
/// Weights are laid out [out][kr][kc][in] so that one output channel's kernel
/// is a contiguous vector matching a channel-last input patch.
struct ConvLayer {
  std::size_t kernel = 1;  // odd
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  bool has_bias = true;
  std::vector<double> weights;
  std::vector<double> biases;  // out_channels entries; zero and frozen without bias

  std::size_t patch_size() const noexcept { return kernel * kernel * in_channels; }
  std::span<const double> filter(std::size_t out) const noexcept {
    return std::span<const double>(weights).subspan(out * patch_size(), patch_size());
  }
};

struct NetShape {
  std::size_t layers = 2;  // 1 or 2
  std::size_t kernel1 = 3;
  std::size_t hidden = 32;
  std::size_t kernel2 = 1;
  bool bias = true;
};

/// One or two conv layers with identity activation ending in one channel.
struct RidgeNet {
  std::vector<ConvLayer> layers;
  double lambda = 1e-4;

  std::size_t in_channels() const { return layers.front().in_channels; }
  /// Sum of squared kernel weights; biases are not regularised.
  double weight_norm_sq() const;
  void validate() const;
  bool operator==(const RidgeNet&) const;
};

/// Kernel entries from uniform(-s, s), s = 1/sqrt(fan_in); zero biases.
RidgeNet make_net(std::size_t in_channels, const NetShape& shape, double lambda,
                  std::uint64_t seed);

/// Output has the spatial shape of `features`. Throws InvalidArgument when the
/// channel count does not match the first layer.
Grid net_forward(const RidgeNet& net, const FeatureMap& features);

/// sum over cells of (prediction - Y)^2 + lambda * ||W||^2.
double ridge_objective(const RidgeNet& net, const FeatureMap& features, const Grid& target,
                       double lambda);

/// Objective minimised by the trainer:
///   sum over cells of L(prediction - Y, alpha; y = Y) + (lambda / 2) ||W||^2.
/// With alpha = 2 and a = 0 this is exactly half of ridge_objective.
double robust_objective(const RidgeNet& net, const FeatureMap& features, const Grid& target,
                        const LossParams& loss);

struct AlphaSchedule {
  enum class Kind { fixed, linear };
  Kind kind = Kind::fixed;
  double start = 1.0;
  double end = 1.0;

  static AlphaSchedule fixed(double alpha) { return {Kind::fixed, alpha, alpha}; }
  static AlphaSchedule linear(double from, double to) { return {Kind::linear, from, to}; }

  double at(std::size_t epoch, std::size_t epochs) const;
};

struct TrainConfig {
  std::size_t epochs = 70;
  std::size_t batch_size = 8;
  std::size_t steps_per_epoch = 10;
  double momentum = 0.9;
  double lr_start = 1e-3;
  double lr_end = 1e-8;
  AlphaSchedule alpha_schedule = AlphaSchedule::fixed(1.0);
  double a = 1.0;
  /// Batch members are cyclic shifts of the template by up to this many cells.
  std::size_t max_shift = 4;
  std::uint64_t seed = 0;

  void validate() const;
  /// lr_start * (lr_end / lr_start)^{epoch / (epochs - 1)}.
  double learning_rate(std::size_t epoch) const;
};

struct TrainResult {
  RidgeNet net;
  /// Batch objective before each update, one entry per step.
  std::vector<double> loss_history;
  /// Learning rate used in each epoch.
  std::vector<double> learning_rates;
};

/// `loss` supplies branch tolerances; alpha and a come from `cfg`. Throws
/// Divergence when the objective becomes non-finite.
TrainResult train_net(RidgeNet net, const FeatureMap& features, const Grid& target,
                      const LossParams& loss, const TrainConfig& cfg);
TrainResult train_net(RidgeNet net, const FeatureMap& features, const LabelMap& target,
                      const LossParams& loss, const TrainConfig& cfg);

/// d robust_objective / d features, one value per input cell and channel.
FeatureMap input_gradient(const RidgeNet& net, const FeatureMap& features, const Grid& target,
                          const LossParams& loss);

struct ChannelScores {
  std::vector<double> scores;
  /// Channel indices by descending |score|, ties to the lower index.
  std::vector<std::size_t> ranking;

  static ChannelScores from_scores(std::vector<double> scores);
};

/// scores[i] = spatial mean of d robust_objective / d F_i.
ChannelScores channel_scores(const RidgeNet& net, const FeatureMap& features, const Grid& target,
                             const LossParams& loss);

/// First k channels of the ranking. Throws InvalidArgument unless 1 <= k <= C.
std::vector<std::size_t> select_top_k(const ChannelScores& scores, std::size_t k);

// "DSRN" container: magic, u32 version, shape header, f64 lambda, then
// little-endian f64 weights and biases layer by layer.
inline constexpr std::uint32_t kNetFormatVersion = 1;
void write_net(const RidgeNet& net, std::ostream& out);
RidgeNet read_net(std::istream& in);
void save_net(const RidgeNet& net, const std::filesystem::path& path);
RidgeNet load_net(const std::filesystem::path& path);

}  // namespace domainsiam
