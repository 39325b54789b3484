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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "domainsiam/error.hpp"
#include "domainsiam/rng.hpp"
#include "domainsiam/ridge.hpp"
#include "domainsiam/simd/kernels.hpp"

namespace domainsiam {

namespace {

struct LayerGrad {
  std::vector<double> weights;
  std::vector<double> biases;
};

using NetGrad = std::vector<LayerGrad>;

NetGrad zero_grad(const RidgeNet& net) {
  NetGrad g;
  g.reserve(net.layers.size());
  for (const auto& layer : net.layers) {
    g.push_back({std::vector<double>(layer.weights.size(), 0.0),
                 std::vector<double>(layer.biases.size(), 0.0)});
  }
  return g;
}

// Same-padded k x k patch around (r, c), channel-last, zeros outside the map.
void gather_patch(const FeatureMap& in, std::size_t r, std::size_t c, std::size_t k,
                  std::span<double> patch) {
  const auto pad = static_cast<std::ptrdiff_t>(k / 2);
  const std::size_t ch = in.channels();
  const auto h = static_cast<std::ptrdiff_t>(in.height());
  const auto w = static_cast<std::ptrdiff_t>(in.width());
  double* dst = patch.data();
  for (std::size_t i = 0; i < k; ++i) {
    const auto rr = static_cast<std::ptrdiff_t>(r + i) - pad;
    for (std::size_t j = 0; j < k; ++j, dst += ch) {
      const auto cc = static_cast<std::ptrdiff_t>(c + j) - pad;
      if (rr < 0 || rr >= h || cc < 0 || cc >= w) {
        std::fill(dst, dst + ch, 0.0);
      } else {
        const auto src = in.cell(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
        std::copy(src.begin(), src.end(), dst);
      }
    }
  }
}

void scatter_patch_add(FeatureMap& out, std::size_t r, std::size_t c, std::size_t k,
                       std::span<const double> patch) {
  const auto pad = static_cast<std::ptrdiff_t>(k / 2);
  const std::size_t ch = out.channels();
  const auto h = static_cast<std::ptrdiff_t>(out.height());
  const auto w = static_cast<std::ptrdiff_t>(out.width());
  const double* src = patch.data();
  for (std::size_t i = 0; i < k; ++i) {
    const auto rr = static_cast<std::ptrdiff_t>(r + i) - pad;
    for (std::size_t j = 0; j < k; ++j, src += ch) {
      const auto cc = static_cast<std::ptrdiff_t>(c + j) - pad;
      if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
      for (std::size_t q = 0; q < ch; ++q) {
        out.at(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc), q) += src[q];
      }
    }
  }
}

FeatureMap conv_forward(const ConvLayer& layer, const FeatureMap& in) {
  FeatureMap out(in.height(), in.width(), layer.out_channels, in.stride());
  std::vector<double> patch(layer.patch_size());
  for (std::size_t r = 0; r < in.height(); ++r) {
    for (std::size_t c = 0; c < in.width(); ++c) {
      gather_patch(in, r, c, layer.kernel, patch);
      for (std::size_t o = 0; o < layer.out_channels; ++o) {
        out.at(r, c, o) = layer.biases[o] + simd::dot(layer.filter(o), patch);
      }
    }
  }
  return out;
}

// Accumulates parameter gradients into `grad`; writes d/d input into
// `grad_in` when non-null.
void conv_backward(const ConvLayer& layer, const FeatureMap& in, const FeatureMap& grad_out,
                   LayerGrad& grad, FeatureMap* grad_in) {
  const std::size_t ps = layer.patch_size();
  std::vector<double> patch(ps);
  std::vector<double> dpatch(ps);
  for (std::size_t r = 0; r < in.height(); ++r) {
    for (std::size_t c = 0; c < in.width(); ++c) {
      gather_patch(in, r, c, layer.kernel, patch);
      if (grad_in) std::fill(dpatch.begin(), dpatch.end(), 0.0);
      for (std::size_t o = 0; o < layer.out_channels; ++o) {
        const double go = grad_out.at(r, c, o);
        if (go == 0.0) continue;
        simd::axpy(go, patch, std::span<double>(grad.weights).subspan(o * ps, ps));
        if (layer.has_bias) grad.biases[o] += go;
        if (grad_in) simd::axpy(go, layer.filter(o), dpatch);
      }
      if (grad_in) scatter_patch_add(*grad_in, r, c, layer.kernel, dpatch);
    }
  }
}

std::vector<FeatureMap> forward_all(const RidgeNet& net, const FeatureMap& features) {
  if (features.channels() != net.in_channels()) {
    throw InvalidArgument("feature channels (" + std::to_string(features.channels()) +
                          ") do not match network input (" + std::to_string(net.in_channels()) +
                          ")");
  }
  std::vector<FeatureMap> acts;
  acts.reserve(net.layers.size());
  const FeatureMap* in = &features;
  for (const auto& layer : net.layers) {
    acts.push_back(conv_forward(layer, *in));
    in = &acts.back();
  }
  return acts;
}

void check_target(const FeatureMap& features, const Grid& target) {
  if (target.height() != features.height() || target.width() != features.width()) {
    throw InvalidArgument("target shape does not match feature map");
  }
}

struct Evaluation {
  double data_loss = 0.0;
  bool finite = true;
};

// Data term of the robust objective and its gradient w.r.t. the prediction.
Evaluation loss_and_seed(const FeatureMap& prediction, const Grid& target, const LossParams& loss,
                         FeatureMap* seed) {
  Evaluation ev;
  const std::span<const double> pred = prediction.values();
  const std::span<const double> y = target.values();
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const WeightedResidual s{pred[i] - y[i], y[i]};
    if (!std::isfinite(s.x)) {
      ev.finite = false;
      return ev;
    }
    ev.data_loss += eval_loss(s, loss);
    if (seed) seed->values()[i] = grad_x(s, loss);
  }
  return ev;
}

// Backpropagates a data-term seed through all layers.
void backward_all(const RidgeNet& net, const FeatureMap& features,
                  const std::vector<FeatureMap>& acts, FeatureMap seed, NetGrad& grad,
                  FeatureMap* grad_input) {
  for (std::size_t li = net.layers.size(); li-- > 0;) {
    const FeatureMap& in = li == 0 ? features : acts[li - 1];
    if (li == 0) {
      conv_backward(net.layers[0], in, seed, grad[0], grad_input);
    } else {
      FeatureMap next(in.height(), in.width(), in.channels(), in.stride());
      conv_backward(net.layers[li], in, seed, grad[li], &next);
      seed = std::move(next);
    }
  }
}

FeatureMap cyclic_shift(const FeatureMap& f, std::ptrdiff_t dr, std::ptrdiff_t dc) {
  FeatureMap out(f.height(), f.width(), f.channels(), f.stride());
  const auto h = static_cast<std::ptrdiff_t>(f.height());
  const auto w = static_cast<std::ptrdiff_t>(f.width());
  for (std::ptrdiff_t r = 0; r < h; ++r) {
    const auto sr = static_cast<std::size_t>(((r - dr) % h + h) % h);
    for (std::ptrdiff_t c = 0; c < w; ++c) {
      const auto sc = static_cast<std::size_t>(((c - dc) % w + w) % w);
      const auto src = f.cell(sr, sc);
      std::copy(src.begin(), src.end(),
                out.values().begin() + (r * w + c) * static_cast<std::ptrdiff_t>(f.channels()));
    }
  }
  return out;
}

Grid cyclic_shift(const Grid& g, std::ptrdiff_t dr, std::ptrdiff_t dc) {
  Grid out(g.height(), g.width());
  const auto h = static_cast<std::ptrdiff_t>(g.height());
  const auto w = static_cast<std::ptrdiff_t>(g.width());
  for (std::ptrdiff_t r = 0; r < h; ++r)
    for (std::ptrdiff_t c = 0; c < w; ++c)
      out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) =
          g(static_cast<std::size_t>(((r - dr) % h + h) % h),
            static_cast<std::size_t>(((c - dc) % w + w) % w));
  return out;
}

}  // namespace

double RidgeNet::weight_norm_sq() const {
  double total = 0.0;
  for (const auto& layer : layers) total += simd::sum_squares(layer.weights);
  return total;
}

void RidgeNet::validate() const {
  if (layers.empty() || layers.size() > 2) throw InvalidArgument("network needs 1 or 2 layers");
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (l.kernel % 2 == 0) throw InvalidArgument("kernel size must be odd");
    if (l.weights.size() != l.out_channels * l.patch_size() || l.biases.size() != l.out_channels) {
      throw InvalidArgument("layer parameter count does not match its shape");
    }
    if (i > 0 && l.in_channels != layers[i - 1].out_channels) {
      throw InvalidArgument("layer channel counts do not chain");
    }
  }
  if (layers.back().out_channels != 1) throw InvalidArgument("network must output one channel");
}

bool RidgeNet::operator==(const RidgeNet& other) const {
  if (lambda != other.lambda || layers.size() != other.layers.size()) return false;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& a = layers[i];
    const auto& b = other.layers[i];
    if (a.kernel != b.kernel || a.in_channels != b.in_channels ||
        a.out_channels != b.out_channels || a.has_bias != b.has_bias ||
        a.weights != b.weights || a.biases != b.biases) {
      return false;
    }
  }
  return true;
}

RidgeNet make_net(std::size_t in_channels, const NetShape& shape, double lambda,
                  std::uint64_t seed) {
  if (in_channels == 0) throw InvalidArgument("network needs at least one input channel");
  if (shape.layers != 1 && shape.layers != 2) throw InvalidArgument("network needs 1 or 2 layers");
  if (shape.kernel1 % 2 == 0 || shape.kernel2 % 2 == 0) {
    throw InvalidArgument("kernel size must be odd");
  }
  if (shape.layers == 2 && shape.hidden == 0) throw InvalidArgument("hidden width must be >= 1");

  Rng rng(seed);
  auto make_layer = [&](std::size_t k, std::size_t cin, std::size_t cout) {
    ConvLayer l{k, cin, cout, shape.bias, {}, std::vector<double>(cout, 0.0)};
    const double s = 1.0 / std::sqrt(static_cast<double>(l.patch_size()));
    l.weights.resize(cout * l.patch_size());
    for (double& v : l.weights) v = rng.uniform(-s, s);
    return l;
  };

  RidgeNet net;
  net.lambda = lambda;
  if (shape.layers == 1) {
    net.layers.push_back(make_layer(shape.kernel1, in_channels, 1));
  } else {
    net.layers.push_back(make_layer(shape.kernel1, in_channels, shape.hidden));
    net.layers.push_back(make_layer(shape.kernel2, shape.hidden, 1));
  }
  net.validate();
  return net;
}

Grid net_forward(const RidgeNet& net, const FeatureMap& features) {
  net.validate();
  auto acts = forward_all(net, features);
  return acts.back().channel(0);
}

double ridge_objective(const RidgeNet& net, const FeatureMap& features, const Grid& target,
                       double lambda) {
  check_target(features, target);
  const Grid pred = net_forward(net, features);
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred.values()[i] - target.values()[i];
    total += e * e;
  }
  return total + lambda * net.weight_norm_sq();
}

double robust_objective(const RidgeNet& net, const FeatureMap& features, const Grid& target,
                        const LossParams& loss) {
  net.validate();
  check_target(features, target);
  const auto acts = forward_all(net, features);
  const Evaluation ev = loss_and_seed(acts.back(), target, loss, nullptr);
  if (!ev.finite) throw DomainError("non-finite prediction");
  return ev.data_loss + 0.5 * net.lambda * net.weight_norm_sq();
}

double AlphaSchedule::at(std::size_t epoch, std::size_t epochs) const {
  if (kind == Kind::fixed || epochs <= 1) return start;
  const double t = static_cast<double>(epoch) / static_cast<double>(epochs - 1);
  return start + (end - start) * t;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw InvalidArgument("epochs must be >= 1");
  if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
  if (steps_per_epoch < 1) throw InvalidArgument("steps_per_epoch must be >= 1");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw InvalidArgument("momentum must lie in [0, 1)");
  if (!(lr_end > 0.0 && lr_start >= lr_end) || !std::isfinite(lr_start)) {
    throw InvalidArgument("learning rates must satisfy lr_start >= lr_end > 0");
  }
  if (!(a >= 0.0 && a <= 1.0)) throw InvalidArgument("a must lie in [0, 1]");
}

double TrainConfig::learning_rate(std::size_t epoch) const {
  if (epochs <= 1) return lr_start;
  const double t = static_cast<double>(epoch) / static_cast<double>(epochs - 1);
  return lr_start * std::pow(lr_end / lr_start, t);
}

TrainResult train_net(RidgeNet net, const FeatureMap& features, const Grid& target,
                      const LossParams& loss, const TrainConfig& cfg) {
  cfg.validate();
  net.validate();
  check_target(features, target);
  if (features.channels() != net.in_channels()) {
    throw InvalidArgument("feature channels do not match network input");
  }

  Rng rng(cfg.seed);
  NetGrad velocity = zero_grad(net);
  TrainResult result;
  result.loss_history.reserve(cfg.epochs * cfg.steps_per_epoch);
  const auto shift = static_cast<std::int64_t>(cfg.max_shift);
  const double inv_batch = 1.0 / static_cast<double>(cfg.batch_size);
  std::size_t iteration = 0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = cfg.learning_rate(epoch);
    result.learning_rates.push_back(lr);
    LossParams p = loss;
    p.alpha = cfg.alpha_schedule.at(epoch, cfg.epochs);
    p.a = cfg.a;
    p.validate();

    for (std::size_t step = 0; step < cfg.steps_per_epoch; ++step, ++iteration) {
      NetGrad grad = zero_grad(net);
      double data_loss = 0.0;
      for (std::size_t b = 0; b < cfg.batch_size; ++b) {
        const auto dr = static_cast<std::ptrdiff_t>(rng.uniform_int(-shift, shift));
        const auto dc = static_cast<std::ptrdiff_t>(rng.uniform_int(-shift, shift));
        const FeatureMap f = cyclic_shift(features, dr, dc);
        const Grid y = cyclic_shift(target, dr, dc);
        const auto acts = forward_all(net, f);
        FeatureMap seed(f.height(), f.width(), 1, f.stride());
        const Evaluation ev = loss_and_seed(acts.back(), y, p, &seed);
        if (!ev.finite) throw Divergence(iteration);
        data_loss += ev.data_loss;
        backward_all(net, f, acts, std::move(seed), grad, nullptr);
      }

      const double objective = data_loss * inv_batch + 0.5 * net.lambda * net.weight_norm_sq();
      if (!std::isfinite(objective)) throw Divergence(iteration);
      result.loss_history.push_back(objective);

      for (std::size_t li = 0; li < net.layers.size(); ++li) {
        ConvLayer& layer = net.layers[li];
        LayerGrad& g = grad[li];
        LayerGrad& v = velocity[li];
        for (std::size_t i = 0; i < layer.weights.size(); ++i) {
          const double gi = g.weights[i] * inv_batch + net.lambda * layer.weights[i];
          v.weights[i] = cfg.momentum * v.weights[i] - lr * gi;
          layer.weights[i] += v.weights[i];
          if (!std::isfinite(layer.weights[i])) throw Divergence(iteration);
        }
        if (!layer.has_bias) continue;
        for (std::size_t i = 0; i < layer.biases.size(); ++i) {
          v.biases[i] = cfg.momentum * v.biases[i] - lr * g.biases[i] * inv_batch;
          layer.biases[i] += v.biases[i];
          if (!std::isfinite(layer.biases[i])) throw Divergence(iteration);
        }
      }
    }
  }
  result.net = std::move(net);
  return result;
}

TrainResult train_net(RidgeNet net, const FeatureMap& features, const LabelMap& target,
                      const LossParams& loss, const TrainConfig& cfg) {
  return train_net(std::move(net), features, target.values, loss, cfg);
}

FeatureMap input_gradient(const RidgeNet& net, const FeatureMap& features, const Grid& target,
                          const LossParams& loss) {
  net.validate();
  check_target(features, target);
  const auto acts = forward_all(net, features);
  FeatureMap seed(features.height(), features.width(), 1, features.stride());
  const Evaluation ev = loss_and_seed(acts.back(), target, loss, &seed);
  if (!ev.finite) throw DomainError("non-finite prediction");
  NetGrad grad = zero_grad(net);
  FeatureMap grad_in(features.height(), features.width(), features.channels(), features.stride());
  backward_all(net, features, acts, std::move(seed), grad, &grad_in);
  return grad_in;
}

ChannelScores ChannelScores::from_scores(std::vector<double> scores) {
  for (double s : scores) {
    if (!std::isfinite(s)) throw InvalidArgument("channel scores must be finite");
  }
  ChannelScores out{std::move(scores), {}};
  out.ranking.resize(out.scores.size());
  std::iota(out.ranking.begin(), out.ranking.end(), std::size_t{0});
  std::stable_sort(out.ranking.begin(), out.ranking.end(), [&](std::size_t i, std::size_t j) {
    return std::abs(out.scores[i]) > std::abs(out.scores[j]);
  });
  return out;
}

ChannelScores channel_scores(const RidgeNet& net, const FeatureMap& features, const Grid& target,
                             const LossParams& loss) {
  const FeatureMap g = input_gradient(net, features, target, loss);
  std::vector<double> scores(g.channels(), 0.0);
  for (std::size_t cell = 0; cell < g.cells(); ++cell) {
    for (std::size_t ch = 0; ch < g.channels(); ++ch) {
      scores[ch] += g.values()[cell * g.channels() + ch];
    }
  }
  const double inv = 1.0 / static_cast<double>(g.cells());
  for (double& s : scores) s *= inv;
  return ChannelScores::from_scores(std::move(scores));
}

std::vector<std::size_t> select_top_k(const ChannelScores& scores, std::size_t k) {
  if (k < 1 || k > scores.ranking.size()) {
    throw InvalidArgument("k must lie in [1, " + std::to_string(scores.ranking.size()) + "]");
  }
  return {scores.ranking.begin(), scores.ranking.begin() + static_cast<std::ptrdiff_t>(k)};
}

}  // namespace domainsiam
