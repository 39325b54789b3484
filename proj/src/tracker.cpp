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

#include "domainsiam/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "domainsiam/error.hpp"
#include "domainsiam/simd/kernels.hpp"
#include "domainsiam/soft_labels.hpp"

namespace domainsiam {

namespace {

constexpr double kTemplateCenter = 0.5 * (kTemplateSize - 1);
constexpr double kSearchCenter = 0.5 * (kSearchSize - 1);
constexpr double kSearchRatio = static_cast<double>(kSearchSize) / kTemplateSize;

bool overlaps_frame(const BBox& b, const Frame& frame) {
  const double x0 = b.cx - 0.5 * b.w;
  const double y0 = b.cy - 0.5 * b.h;
  return x0 < static_cast<double>(frame.width()) - 0.5 && x0 + b.w > -0.5 &&
         y0 < static_cast<double>(frame.height()) - 0.5 && y0 + b.h > -0.5;
}

// Vertex offset of the parabola through (-1, l), (0, c), (1, r).
double parabolic_offset(double l, double c, double r) {
  const double denom = l - 2.0 * c + r;
  if (!(denom < 0.0)) return 0.0;
  return std::clamp(0.5 * (l - r) / denom, -0.5, 0.5);
}

void apply_cosine_window(Grid& g) {
  const auto hann = [](std::size_t i, std::size_t n) {
    if (n <= 1) return 1.0;
    return 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n - 1));
  };
  for (std::size_t r = 0; r < g.height(); ++r)
    for (std::size_t c = 0; c < g.width(); ++c) g(r, c) *= hann(r, g.height()) * hann(c, g.width());
}

}  // namespace

void TrackerConfig::validate() const {
  if (!(scale_base > 1.0)) throw InvalidArgument("scale_base must exceed 1");
  if (scale_exponents.empty()) throw InvalidArgument("scale_exponents must be non-empty");
  if (!(scale_lerp >= 0.0 && scale_lerp <= 1.0)) throw InvalidArgument("scale_lerp must lie in [0, 1]");
  if (top_k < 1) throw InvalidArgument("top_k must be >= 1");
  if (!(label_sigma_factor > 0.0)) throw InvalidArgument("label_sigma_factor must be positive");
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
  if (!(scale_penalty > 0.0 && scale_penalty <= 1.0)) {
    throw InvalidArgument("scale_penalty must lie in (0, 1]");
  }
  extractor.validate();
  loss.validate();
  train.validate();
}

std::vector<double> TrackerConfig::scale_factors() const {
  std::vector<double> out;
  out.reserve(scale_exponents.size());
  for (int s : scale_exponents) out.push_back(std::pow(scale_base, s));
  return out;
}

ResponsePeak best_peak(std::span<const Grid> per_scale) {
  ResponsePeak best;
  bool found = false;
  for (std::size_t k = 0; k < per_scale.size(); ++k) {
    const Grid& g = per_scale[k];
    for (std::size_t r = 0; r < g.height(); ++r) {
      for (std::size_t c = 0; c < g.width(); ++c) {
        if (!found || g(r, c) > best.score) {
          best = {k, r, c, g(r, c)};
          found = true;
        }
      }
    }
  }
  if (!found) throw InvalidArgument("empty response");
  return best;
}

bool TrackState::same_as(const TrackState& o) const {
  return center.x == o.center.x && center.y == o.center.y && target_w == o.target_w &&
         target_h == o.target_h && scale == o.scale && template_crop == o.template_crop &&
         template_features == o.template_features && selected == o.selected &&
         scores.scores == o.scores.scores && scores.ranking == o.scores.ranking && net == o.net;
}

Grid correlate(const FeatureMap& tmpl, const FeatureMap& search) {
  if (tmpl.channels() != search.channels()) {
    throw InvalidArgument("template and search channel counts differ");
  }
  if (tmpl.height() > search.height() || tmpl.width() > search.width()) {
    throw InvalidArgument("template larger than search region");
  }
  if (tmpl.cells() == 0) throw InvalidArgument("empty template");
  const std::size_t ch = tmpl.channels();
  const std::size_t oh = search.height() - tmpl.height() + 1;
  const std::size_t ow = search.width() - tmpl.width() + 1;
  const std::size_t run = tmpl.width() * ch;
  Grid out(oh, ow);
  for (std::size_t u = 0; u < oh; ++u) {
    for (std::size_t v = 0; v < ow; ++v) {
      double acc = 0.0;
      for (std::size_t i = 0; i < tmpl.height(); ++i) {
        acc += simd::dot(tmpl.row(i), search.row(u + i).subspan(v * ch, run));
      }
      out(u, v) = acc;
    }
  }
  return out;
}

Grid correlate(const FeatureMap& tmpl, const FeatureMap& search,
               std::span<const std::size_t> selected) {
  if (selected.empty()) throw InvalidArgument("no channels selected");
  return correlate(tmpl.select(selected), search.select(selected));
}

double interpolate_scale(double scale, double factor, double lerp) {
  // Algebraically (1 - lerp) * scale + lerp * scale * factor; this form is
  // exact at factor == 1 and at lerp == 0 or 1.
  return scale * (1.0 + lerp * (factor - 1.0));
}

TrackState init(const Frame& frame, const BBox& box, const TrackerConfig& cfg,
                FeatureExtractor extractor) {
  cfg.validate();
  if (!(box.w >= 2.0 && box.h >= 2.0)) throw InvalidArgument("target box must be at least 2x2 px");
  if (!overlaps_frame(box, frame)) throw InvalidArgument("target box does not overlap the frame");
  if (!extractor) extractor = make_extractor(cfg.extractor);

  TrackState state;
  state.center = {box.cx, box.cy};
  state.target_w = box.w;
  state.target_h = box.h;
  state.scale = 1.0;
  state.template_crop = std::sqrt(box.w * box.h);
  state.config = cfg;

  const Frame patch = extract_patch(frame, state.center, state.template_crop, kTemplateSize);
  const FeatureMap features = extractor(patch);
  if (features.channels() == 0 || features.cells() == 0) {
    throw InvalidArgument("extractor produced an empty feature map");
  }

  const double px_per_cell =
      static_cast<double>(features.stride()) * state.template_crop / kTemplateSize;
  const double sigma =
      default_label_sigma(box.w / px_per_cell, box.h / px_per_cell, cfg.label_sigma_factor);
  const LabelMap label =
      gaussian_label(features.height(), features.width(),
                     {0.5 * static_cast<double>(features.height() - 1),
                      0.5 * static_cast<double>(features.width() - 1)},
                     sigma);

  TrainConfig train = cfg.train;
  if (train.alpha_schedule.kind == AlphaSchedule::Kind::fixed) {
    train.alpha_schedule = AlphaSchedule::fixed(cfg.loss.alpha);
  }
  train.a = cfg.loss.a;
  RidgeNet net = make_net(features.channels(), cfg.net, cfg.lambda, cfg.seed);
  TrainResult trained = train_net(std::move(net), features, label, cfg.loss, train);

  LossParams scoring = cfg.loss;
  scoring.alpha = train.alpha_schedule.at(train.epochs - 1, train.epochs);
  state.scores = channel_scores(trained.net, features, label.values, scoring);
  state.selected = select_top_k(state.scores, std::min(cfg.top_k, features.channels()));
  state.template_features = features.select(state.selected);
  state.net = std::move(trained.net);
  state.extractor = std::move(extractor);
  return state;
}

StepResult step(const TrackState& state, const Frame& frame) {
  const TrackerConfig& cfg = state.config;
  if (!overlaps_frame(state.box(), frame)) throw LostTarget("target is outside the frame");

  const std::vector<double> factors = cfg.scale_factors();
  const double search_base = state.template_crop * kSearchRatio;
  ResponseMap response;
  response.per_scale.reserve(factors.size());
  std::size_t stride = 1;

  for (std::size_t k = 0; k < factors.size(); ++k) {
    const double crop = search_base * state.scale * factors[k];
    Frame patch;
    try {
      patch = extract_patch(frame, state.center, crop, kSearchSize);
    } catch (const InvalidArgument&) {
      throw LostTarget("search region does not overlap the frame");
    }
    const FeatureMap search = state.extractor(patch).select(state.selected);
    stride = search.stride();
    Grid r = correlate(state.template_features, search);
    if (cfg.cosine_window) apply_cosine_window(r);
    if (cfg.scale_exponents[k] != 0 && cfg.scale_penalty != 1.0) {
      for (double& v : r.values()) v *= cfg.scale_penalty;
    }
    response.per_scale.push_back(std::move(r));
  }
  response.best = best_peak(response.per_scale);

  const ResponsePeak& best = response.best;
  const Grid& g = response.per_scale[best.scale_index];
  double row = static_cast<double>(best.row);
  double col = static_cast<double>(best.col);
  if (cfg.subcell_refinement) {
    if (best.row > 0 && best.row + 1 < g.height()) {
      row += parabolic_offset(g(best.row - 1, best.col), best.score, g(best.row + 1, best.col));
    }
    if (best.col > 0 && best.col + 1 < g.width()) {
      col += parabolic_offset(g(best.row, best.col - 1), best.score, g(best.row, best.col + 1));
    }
  }

  // Template pixel p lines up with search pixel p + stride * offset.
  const double crop = search_base * state.scale * factors[best.scale_index];
  const double px = crop / kSearchSize;
  const double s = static_cast<double>(stride);
  const double dy = (kTemplateCenter + s * row - kSearchCenter) * px;
  const double dx = (kTemplateCenter + s * col - kSearchCenter) * px;

  StepResult out{state, {}, std::move(response)};
  out.state.center = {state.center.x + dx, state.center.y + dy};
  out.state.scale = interpolate_scale(state.scale, factors[best.scale_index], cfg.scale_lerp);
  out.box = out.state.box();
  if (!overlaps_frame(out.box, frame)) throw LostTarget("target left the frame");
  return out;
}

}  // namespace domainsiam
