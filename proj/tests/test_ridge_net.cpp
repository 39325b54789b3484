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


#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "domainsiam/error.hpp"
#include "domainsiam/ridge.hpp"
#include "domainsiam/soft_labels.hpp"
#include "support.hpp"

namespace domainsiam {
namespace {

using testing::close;
using testing::Gen;

// Direct same-padded cross-correlation, one output value at a time.
FeatureMap naive_conv(const ConvLayer& l, const FeatureMap& in) {
  const int h = static_cast<int>(in.height()), w = static_cast<int>(in.width());
  const int k = static_cast<int>(l.kernel), pad = k / 2;
  FeatureMap out(in.height(), in.width(), l.out_channels);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      for (std::size_t o = 0; o < l.out_channels; ++o) {
        double acc = l.biases[o];
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < k; ++j) {
            const int rr = r + i - pad, cc = c + j - pad;
            if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
            for (std::size_t q = 0; q < l.in_channels; ++q) {
              acc += l.weights[((o * k + i) * k + j) * l.in_channels + q] * in.at(rr, cc, q);
            }
          }
        out.at(r, c, o) = acc;
      }
  return out;
}

Grid naive_forward(const RidgeNet& net, const FeatureMap& f) {
  FeatureMap x = f;
  for (const auto& l : net.layers) x = naive_conv(l, x);
  return x.channel(0);
}

RidgeNet linear_net(std::size_t channels, std::vector<double> weights, bool bias = false) {
  RidgeNet net;
  net.lambda = 0.0;
  net.layers.push_back({1, channels, 1, bias, std::move(weights), {0.0}});
  return net;
}

LossParams l2_unweighted() {
  LossParams p;
  p.alpha = 2.0;
  p.a = 0.0;
  return p;
}

TrainConfig quadratic_config(double lr, std::size_t epochs, std::size_t steps) {
  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.steps_per_epoch = steps;
  cfg.lr_start = lr;
  cfg.lr_end = lr * 0.1;
  cfg.alpha_schedule = AlphaSchedule::fixed(2.0);
  cfg.a = 0.0;
  return cfg;
}

// Features in [0, 1] and a convex combination of channels keep targets in [0, 1].
struct Planted {
  FeatureMap features;
  Grid target;
  std::vector<double> weights;
};

Planted planted_instance(Gen& g, std::size_t h, std::size_t w, std::size_t c) {
  Planted p{FeatureMap(h, w, c), Grid(h, w), std::vector<double>(c)};
  for (double& v : p.features.values()) v = g.real(0.0, 1.0);
  double total = 0.0;
  for (double& v : p.weights) total += (v = g.real(0.1, 1.0));
  for (double& v : p.weights) v /= total;
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t col = 0; col < w; ++col) {
      double y = 0.0;
      for (std::size_t q = 0; q < c; ++q) y += p.weights[q] * p.features.at(r, col, q);
      p.target(r, col) = y;
    }
  return p;
}

TEST(NetForward, ZeroNetGivesZeroMap) {
  Gen g(51);
  RidgeNet net = make_net(3, NetShape{}, 1e-4, 7);
  for (auto& l : net.layers) {
    std::fill(l.weights.begin(), l.weights.end(), 0.0);
    std::fill(l.biases.begin(), l.biases.end(), 0.0);
  }
  const Grid out = net_forward(net, g.features(6, 5, 3));
  EXPECT_EQ(out.height(), 6u);
  EXPECT_EQ(out.width(), 5u);
  for (double v : out.values()) EXPECT_EQ(v, 0.0);
}

TEST(NetForward, IdentityOneByOne) {
  Gen g(52);
  const FeatureMap f = g.features(7, 4, 1);
  EXPECT_EQ(net_forward(linear_net(1, {1.0}), f), f.channel(0));
}

TEST(NetForward, MatchesNaiveConvolution) {
  Gen g(53);
  for (int trial = 0; trial < 10; ++trial) {
    NetShape shape;
    shape.layers = g.coin() ? 1 : 2;
    shape.kernel1 = 2 * g.index(0, 2) + 1;
    shape.kernel2 = 2 * g.index(0, 1) + 1;
    shape.hidden = g.index(1, 6);
    shape.bias = g.coin();
    const std::size_t c = g.index(1, 4);
    RidgeNet net = make_net(c, shape, 1e-3, trial);
    for (auto& l : net.layers)
      for (double& b : l.biases) b = l.has_bias ? g.normal() : 0.0;
    const FeatureMap f = g.features(g.index(1, 9), g.index(1, 9), c);
    const Grid fast = net_forward(net, f);
    const Grid ref = naive_forward(net, f);
    ASSERT_EQ(fast.height(), f.height());
    ASSERT_EQ(fast.width(), f.width());
    for (std::size_t i = 0; i < fast.size(); ++i) {
      EXPECT_NEAR(fast.values()[i], ref.values()[i], 1e-12) << "trial " << trial;
    }
  }
}

TEST(NetForward, RejectsChannelMismatch) {
  Gen g(54);
  const RidgeNet net = make_net(3, NetShape{}, 1e-4, 1);
  EXPECT_THROW(net_forward(net, g.features(4, 4, 2)), InvalidArgument);
}

TEST(MakeNet, ShapeAndInitialisation) {
  const RidgeNet net = make_net(5, NetShape{}, 1e-4, 3);
  ASSERT_EQ(net.layers.size(), 2u);
  EXPECT_EQ(net.layers[0].kernel, 3u);
  EXPECT_EQ(net.layers[0].out_channels, 32u);
  EXPECT_EQ(net.layers[1].kernel, 1u);
  EXPECT_EQ(net.layers[1].out_channels, 1u);
  const double s = 1.0 / std::sqrt(45.0);
  for (double v : net.layers[0].weights) EXPECT_LE(std::abs(v), s);
  for (double b : net.layers[0].biases) EXPECT_EQ(b, 0.0);
  EXPECT_TRUE(make_net(5, NetShape{}, 1e-4, 3) == net);
  EXPECT_FALSE(make_net(5, NetShape{}, 1e-4, 4) == net);
  NetShape even;
  even.kernel1 = 2;
  EXPECT_THROW(make_net(5, even, 1e-4, 0), InvalidArgument);
  EXPECT_THROW(make_net(0, NetShape{}, 1e-4, 0), InvalidArgument);
}

TEST(NetObjective, RidgeAndRobustForms) {
  Gen g(55);
  const RidgeNet zero = [] {
    RidgeNet n = linear_net(2, {0.0, 0.0});
    n.lambda = 0.3;
    return n;
  }();
  const FeatureMap f = g.features(3, 4, 2);
  const Grid y = g.grid(3, 4, 0.0, 1.0);
  double y2 = 0.0;
  for (double v : y.values()) y2 += v * v;
  EXPECT_DOUBLE_EQ(ridge_objective(zero, f, y, 0.3), y2);

  RidgeNet net = make_net(2, NetShape{}, 0.05, 9);
  EXPECT_NEAR(robust_objective(net, f, y, l2_unweighted()),
              0.5 * ridge_objective(net, f, y, net.lambda), 1e-12);

  // Brute force: per-cell loss plus half the weight penalty.
  const Grid pred = naive_forward(net, f);
  double brute = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    brute += eval_loss({pred.values()[i] - y.values()[i], y.values()[i]}, LossParams{});
  }
  brute += 0.5 * net.lambda * net.weight_norm_sq();
  EXPECT_NEAR(robust_objective(net, f, y, LossParams{}), brute, 1e-12);
  EXPECT_THROW(ridge_objective(net, f, Grid(2, 2), 0.0), InvalidArgument);
}

TEST(TrainNet, RecoversPlantedLinearModel) {
  Gen g(56);
  const Planted p = planted_instance(g, 8, 8, 3);
  RidgeNet net = make_net(3, NetShape{1, 1, 0, 1, false}, 0.0, 2);
  const double initial = robust_objective(net, p.features, p.target, l2_unweighted());
  const TrainResult r = train_net(net, p.features, p.target, LossParams{},
                                  quadratic_config(0.02, 30, 50));
  const double final_obj = robust_objective(r.net, p.features, p.target, l2_unweighted());
  EXPECT_LE(final_obj, 1e-4 * initial);
  for (std::size_t q = 0; q < 3; ++q) EXPECT_NEAR(r.net.layers[0].weights[q], p.weights[q], 1e-3);
}

TEST(TrainNet, MatchesClosedFormOnLinearNet) {
  Gen g(57);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t d = g.index(2, 8);
    const std::size_t h = 4, w = g.index(2 * d / 4 + 1, 8);
    FeatureMap f(h, w, d);
    for (double& v : f.values()) v = g.normal();
    Grid y(h, w);
    for (double& v : y.values()) v = g.real(0.05, 1.0);
    const double lambda = g.real(0.01, 1.0);

    // Oracle: dense solve of (X^T X + lambda I) w = X^T y.
    Eigen::MatrixXd x(h * w, d);
    Eigen::VectorXd yy(h * w);
    for (std::size_t cell = 0; cell < h * w; ++cell) {
      for (std::size_t q = 0; q < d; ++q) x(cell, q) = f.values()[cell * d + q];
      yy(cell) = y.values()[cell];
    }
    const Eigen::MatrixXd hess = x.transpose() * x + lambda * Eigen::MatrixXd::Identity(d, d);
    const Eigen::VectorXd ref = hess.ldlt().solve(x.transpose() * yy);

    RidgeNet net = make_net(d, NetShape{1, 1, 0, 1, false}, lambda, trial);
    const double lr = 1.0 / hess.trace();
    const TrainResult r = train_net(net, f, y, LossParams{}, quadratic_config(lr, 40, 50));
    for (std::size_t q = 0; q < d; ++q) {
      EXPECT_NEAR(r.net.layers[0].weights[q], ref(q), 1e-3) << "trial " << trial;
    }
  }
}

TEST(TrainNet, DegenerateScheduleUsesOneRate) {
  Gen g(58);
  const Planted p = planted_instance(g, 5, 5, 2);
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.lr_start = cfg.lr_end = 1e-3;
  cfg.steps_per_epoch = 4;
  const TrainResult r = train_net(make_net(2, NetShape{}, 1e-4, 0), p.features, p.target,
                                  LossParams{}, cfg);
  ASSERT_EQ(r.learning_rates.size(), 1u);
  EXPECT_EQ(r.learning_rates[0], 1e-3);
  EXPECT_EQ(r.loss_history.size(), 4u);
}

TEST(TrainNet, GeometricAnnealing) {
  TrainConfig cfg;  // 1e-3 -> 1e-8 over 70 epochs
  EXPECT_EQ(cfg.learning_rate(0), 1e-3);
  EXPECT_NEAR(cfg.learning_rate(69), 1e-8, 1e-20);
  const double ratio = cfg.learning_rate(1) / cfg.learning_rate(0);
  for (std::size_t e = 1; e + 1 < cfg.epochs; ++e) {
    EXPECT_TRUE(close(cfg.learning_rate(e + 1) / cfg.learning_rate(e), ratio, 1e-12)) << e;
  }
  EXPECT_NEAR(ratio, std::pow(1e-5, 1.0 / 69.0), 1e-15);
}

TEST(TrainNet, DeterministicHistory) {
  Gen g(59);
  const Planted p = planted_instance(g, 9, 9, 3);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.seed = 11;
  const auto a = train_net(make_net(3, NetShape{}, 1e-4, 1), p.features, p.target, LossParams{}, cfg);
  const auto b = train_net(make_net(3, NetShape{}, 1e-4, 1), p.features, p.target, LossParams{}, cfg);
  EXPECT_EQ(a.loss_history, b.loss_history);
  EXPECT_TRUE(a.net == b.net);
  cfg.seed = 12;
  const auto c = train_net(make_net(3, NetShape{}, 1e-4, 1), p.features, p.target, LossParams{}, cfg);
  EXPECT_NE(a.loss_history, c.loss_history);
}

TEST(TrainNet, EpochMeansDecreaseOnConvexProblem) {
  Gen g(60);
  for (int trial = 0; trial < 5; ++trial) {
    const Planted p = planted_instance(g, 8, 8, 4);
    TrainConfig cfg = quadratic_config(0.005, 20, 10);
    cfg.seed = trial;
    const TrainResult r = train_net(make_net(4, NetShape{1, 1, 0, 1, true}, 1e-3, trial),
                                    p.features, p.target, LossParams{}, cfg);
    ASSERT_FALSE(r.loss_history.empty());
    std::vector<double> means;
    for (std::size_t e = 0; e < cfg.epochs; ++e) {
      const auto first = r.loss_history.begin() + static_cast<std::ptrdiff_t>(e * cfg.steps_per_epoch);
      means.push_back(std::accumulate(first, first + 10, 0.0) / 10.0);
    }
    for (std::size_t e = 1; e + 1 < means.size(); ++e) {
      EXPECT_LE(means[e + 1], means[e] * (1 + 1e-12)) << "trial " << trial << " epoch " << e;
    }
    for (double v : r.loss_history) EXPECT_TRUE(std::isfinite(v));
  }
}

TEST(TrainNet, DivergenceReportsIteration) {
  Gen g(61);
  const Planted p = planted_instance(g, 6, 6, 2);
  TrainConfig cfg = quadratic_config(1e6, 5, 10);
  try {
    train_net(make_net(2, NetShape{}, 1e-4, 0), p.features, p.target, LossParams{}, cfg);
    FAIL() << "expected divergence";
  } catch (const Divergence& e) {
    EXPECT_LT(e.iteration(), 50u);
  }
}

TEST(TrainNet, RejectsInvalidConfig) {
  Gen g(62);
  const Planted p = planted_instance(g, 4, 4, 2);
  const RidgeNet net = make_net(2, NetShape{}, 1e-4, 0);
  TrainConfig cfg;
  cfg.epochs = 0;
  EXPECT_THROW(train_net(net, p.features, p.target, LossParams{}, cfg), InvalidArgument);
  cfg = TrainConfig{};
  cfg.lr_end = 1e-2;  // above lr_start
  EXPECT_THROW(train_net(net, p.features, p.target, LossParams{}, cfg), InvalidArgument);
  cfg = TrainConfig{};
  EXPECT_THROW(train_net(net, p.features, Grid(3, 4), LossParams{}, cfg), InvalidArgument);
}

TEST(AlphaSchedule, LinearEndpoints) {
  const AlphaSchedule s = AlphaSchedule::linear(2.0, 0.0);
  EXPECT_EQ(s.at(0, 11), 2.0);
  EXPECT_EQ(s.at(10, 11), 0.0);
  EXPECT_DOUBLE_EQ(s.at(5, 11), 1.0);
  EXPECT_EQ(AlphaSchedule::fixed(0.7).at(3, 9), 0.7);
}

TEST(ChannelScores, MatchFiniteDifferences) {
  Gen g(63);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t c = g.index(1, 5);
    const FeatureMap f = g.features(6, 7, c);
    const LabelMap label = gaussian_label(6, 7, {2.5, 3.0}, 1.5);
    RidgeNet net = make_net(c, NetShape{}, 0.01, trial);
    LossParams loss;
    loss.alpha = g.real(-2.0, 1.8);
    loss.a = g.real(0.0, 1.0);
    const ChannelScores s = channel_scores(net, f, label.values, loss);
    ASSERT_EQ(s.scores.size(), c);
    for (std::size_t ch = 0; ch < c; ++ch) {
      const auto objective = [&](double eps) {
        FeatureMap p = f;
        for (std::size_t cell = 0; cell < p.cells(); ++cell) p.values()[cell * c + ch] += eps;
        return robust_objective(net, p, label.values, loss);
      };
      const double h = 1e-5;
      const double fd = (objective(h) - objective(-h)) / (2 * h) / static_cast<double>(f.cells());
      EXPECT_TRUE(close(s.scores[ch], fd, 1e-4, 1e-9))
          << "trial " << trial << " ch " << ch << ": " << s.scores[ch] << " vs " << fd;
    }
  }
}

TEST(ChannelScores, InputGradientMatchesFiniteDifferencePerCell) {
  Gen g(64);
  const FeatureMap f = g.features(5, 5, 2);
  const Grid y = g.grid(5, 5, 0.0, 1.0);
  const RidgeNet net = make_net(2, NetShape{2, 3, 4, 3, true}, 0.01, 5);
  const FeatureMap grad = input_gradient(net, f, y, LossParams{});
  for (std::size_t i = 0; i < f.values().size(); i += 3) {
    FeatureMap hi = f, lo = f;
    hi.values()[i] += 1e-6;
    lo.values()[i] -= 1e-6;
    const double fd = (robust_objective(net, hi, y, LossParams{}) -
                       robust_objective(net, lo, y, LossParams{})) / 2e-6;
    EXPECT_TRUE(close(grad.values()[i], fd, 1e-5, 1e-8)) << i;
  }
}

TEST(ChannelScores, DisconnectedChannelScoresZero) {
  Gen g(65);
  FeatureMap f = g.features(6, 6, 3);
  for (std::size_t cell = 0; cell < f.cells(); ++cell) f.values()[cell * 3 + 1] = 0.0;
  RidgeNet net = make_net(3, NetShape{}, 1e-4, 4);
  ConvLayer& l = net.layers[0];
  for (std::size_t o = 0; o < l.out_channels; ++o)
    for (std::size_t k = 0; k < l.kernel * l.kernel; ++k) l.weights[o * l.patch_size() + k * 3 + 1] = 0.0;
  const Grid y = g.grid(6, 6, 0.0, 1.0);
  const ChannelScores s = channel_scores(net, f, y, LossParams{});
  EXPECT_EQ(s.scores[1], 0.0);
  EXPECT_NE(s.scores[0], 0.0);
}

TEST(ChannelScores, PlantedChannelRanksFirst) {
  const LabelMap label = gaussian_label(9, 9, {4, 4}, 1.5);
  for (std::size_t planted = 0; planted < 4; ++planted) {
    FeatureMap f(9, 9, 4);
    f.set_channel(planted, label.values);
    RidgeNet net = make_net(4, NetShape{1, 1, 0, 1, false}, 1e-2, planted);
    const TrainResult r = train_net(net, f, label, LossParams{}, quadratic_config(0.05, 30, 20));
    const ChannelScores s = channel_scores(r.net, f, label.values, LossParams{});
    EXPECT_EQ(s.ranking[0], planted);
  }
}

TEST(ChannelScores, RankingIsAPermutationSortedByMagnitude) {
  Gen g(66);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> scores(g.index(1, 20));
    for (double& v : scores) v = g.coin() ? g.normal() : std::round(g.normal());
    const ChannelScores s = ChannelScores::from_scores(scores);
    std::vector<std::size_t> sorted = s.ranking;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) ASSERT_EQ(sorted[i], i);
    for (std::size_t m = 0; m + 1 < s.ranking.size(); ++m) {
      const double a = std::abs(scores[s.ranking[m]]), b = std::abs(scores[s.ranking[m + 1]]);
      ASSERT_GE(a, b);
      if (a == b) ASSERT_LT(s.ranking[m], s.ranking[m + 1]);
    }
    // Uniform positive scaling leaves the ranking unchanged.
    std::vector<double> scaled = scores;
    const double k = g.real(0.01, 100.0);
    for (double& v : scaled) v *= k;
    EXPECT_EQ(ChannelScores::from_scores(scaled).ranking, s.ranking);
  }
}

TEST(SelectTopK, Examples) {
  const ChannelScores s = ChannelScores::from_scores({0.1, -0.9, 0.5});
  EXPECT_EQ(select_top_k(s, 2), (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(select_top_k(s, 3), (std::vector<std::size_t>{1, 2, 0}));
  const ChannelScores ties = ChannelScores::from_scores({0.4, 0.4, -0.4, 0.4});
  EXPECT_EQ(select_top_k(ties, 3), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_THROW(select_top_k(s, 0), InvalidArgument);
  EXPECT_THROW(select_top_k(s, 4), InvalidArgument);
  EXPECT_THROW(ChannelScores::from_scores({1.0, std::nan("")}), InvalidArgument);
}

}  // namespace
}  // namespace domainsiam
