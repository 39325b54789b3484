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

#include "domainsiam/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "domainsiam/error.hpp"
#include "domainsiam/io.hpp"
#include "domainsiam/ridge.hpp"
#include "domainsiam/rng.hpp"

namespace domainsiam {

namespace {

constexpr std::size_t kTextureCells = 6;
constexpr std::size_t kBackgroundCell = 16;

Grid smooth_background(std::size_t h, std::size_t w, Rng& rng) {
  const std::size_t gh = h / kBackgroundCell + 2;
  const std::size_t gw = w / kBackgroundCell + 2;
  Grid coarse(gh, gw);
  for (double& v : coarse.values()) v = rng.uniform(0.35, 0.65);
  Grid bg(h, w);
  const double inv = 1.0 / kBackgroundCell;
  for (std::size_t r = 0; r < h; ++r) {
    const double y = static_cast<double>(r) * inv;
    const auto r0 = static_cast<std::size_t>(y);
    const double fy = y - static_cast<double>(r0);
    for (std::size_t c = 0; c < w; ++c) {
      const double x = static_cast<double>(c) * inv;
      const auto c0 = static_cast<std::size_t>(x);
      const double fx = x - static_cast<double>(c0);
      const double top = coarse(r0, c0) + fx * (coarse(r0, c0 + 1) - coarse(r0, c0));
      const double bot = coarse(r0 + 1, c0) + fx * (coarse(r0 + 1, c0 + 1) - coarse(r0 + 1, c0));
      bg(r, c) = top + fy * (bot - top);
    }
  }
  return bg;
}

// Fraction of pixel k's footprint [k - 0.5, k + 0.5] inside [lo, hi].
double coverage(double lo, double hi, std::size_t k) {
  const double p = static_cast<double>(k);
  return std::max(0.0, std::min(hi, p + 0.5) - std::max(lo, p - 0.5));
}

void paint_box(Frame& f, double x0, double y0, double w, double h, const Grid* texture,
               double flat) {
  const double x1 = x0 + w;
  const double y1 = y0 + h;
  const auto r_lo = static_cast<std::size_t>(std::max(0.0, std::floor(y0 + 0.5)));
  const auto c_lo = static_cast<std::size_t>(std::max(0.0, std::floor(x0 + 0.5)));
  const auto r_hi = std::min(f.height() - 1, static_cast<std::size_t>(std::max(0.0, std::ceil(y1 + 0.5))));
  const auto c_hi = std::min(f.width() - 1, static_cast<std::size_t>(std::max(0.0, std::ceil(x1 + 0.5))));
  for (std::size_t r = r_lo; r <= r_hi; ++r) {
    const double cy = coverage(y0, y1, r);
    if (cy <= 0.0) continue;
    for (std::size_t c = c_lo; c <= c_hi; ++c) {
      const double cov = cy * coverage(x0, x1, c);
      if (cov <= 0.0) continue;
      double v = flat;
      if (texture) {
        const double u = std::clamp((static_cast<double>(c) - x0) / w, 0.0, 1.0 - 1e-12);
        const double t = std::clamp((static_cast<double>(r) - y0) / h, 0.0, 1.0 - 1e-12);
        v = (*texture)(static_cast<std::size_t>(t * kTextureCells),
                       static_cast<std::size_t>(u * kTextureCells));
      }
      f(r, c) = (1.0 - cov) * f(r, c) + cov * v;
    }
  }
}

Point default_start(const SyntheticSpec& spec) {
  const Point mid{0.5 * static_cast<double>(spec.frame_width - 1),
                  0.5 * static_cast<double>(spec.frame_height - 1)};
  if (spec.motion.kind != Motion::Kind::linear) return mid;
  const double half = 0.5 * static_cast<double>(spec.frames - 1);
  return {mid.x - spec.motion.vx * half, mid.y - spec.motion.vy * half};
}

}  // namespace

void SyntheticSpec::validate() const {
  if (frames < 1) throw InvalidSpec("frames must be >= 1");
  if (frame_height < 8 || frame_width < 8) throw InvalidSpec("frame must be at least 8x8");
  if (!(target_w >= 2.0 && target_h >= 2.0)) throw InvalidSpec("target must be at least 2x2");
  if (!(noise_std >= 0.0)) throw InvalidSpec("noise_std must be >= 0");
  if (!(scale_drift > -1.0)) throw InvalidSpec("scale_drift must exceed -1");
  if (motion.kind == Motion::Kind::sinusoidal && !(motion.period > 0.0)) {
    throw InvalidSpec("sinusoidal period must be positive");
  }
  if (occlusion && !(occlusion->fraction >= 0.0 && occlusion->fraction <= 1.0)) {
    throw InvalidSpec("occlusion fraction must lie in [0, 1]");
  }
  for (std::size_t t = 0; t < frames; ++t) {
    const BBox b = synth_truth(*this, t);
    if (b.cx - 0.5 * b.w < -0.5 || b.cx + 0.5 * b.w > static_cast<double>(frame_width) - 0.5 ||
        b.cy - 0.5 * b.h < -0.5 || b.cy + 0.5 * b.h > static_cast<double>(frame_height) - 0.5) {
      throw InvalidSpec("target leaves the frame at frame " + std::to_string(t));
    }
  }
}

BBox synth_truth(const SyntheticSpec& spec, std::size_t t) {
  const Point start = spec.start.value_or(default_start(spec));
  const double td = static_cast<double>(t);
  const double s = std::pow(1.0 + spec.scale_drift, td);
  BBox b{start.x, start.y, spec.target_w * s, spec.target_h * s};
  switch (spec.motion.kind) {
    case Motion::Kind::still:
      break;
    case Motion::Kind::linear:
      b.cx += spec.motion.vx * td;
      b.cy += spec.motion.vy * td;
      break;
    case Motion::Kind::sinusoidal:
      b.cx += spec.motion.amplitude * std::sin(2.0 * std::numbers::pi * td / spec.motion.period);
      break;
  }
  return b;
}

Sequence synth_sequence(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const Grid background = smooth_background(spec.frame_height, spec.frame_width, rng);
  Grid texture(kTextureCells, kTextureCells);
  for (double& v : texture.values()) {
    v = rng.uniform() < 0.5 ? rng.uniform(0.05, 0.3) : rng.uniform(0.7, 0.95);
  }

  Sequence seq;
  seq.frames.reserve(spec.frames);
  seq.truth.reserve(spec.frames);
  for (std::size_t t = 0; t < spec.frames; ++t) {
    const BBox b = synth_truth(spec, t);
    Frame f = background;
    const double x0 = b.cx - 0.5 * b.w;
    const double y0 = b.cy - 0.5 * b.h;
    paint_box(f, x0, y0, b.w, b.h, &texture, 0.0);
    if (spec.occlusion && t >= spec.occlusion->start &&
        t < spec.occlusion->start + spec.occlusion->length && spec.occlusion->fraction > 0.0) {
      paint_box(f, x0, y0, spec.occlusion->fraction * b.w, b.h, nullptr, 0.5);
    }
    if (spec.noise_std > 0.0) {
      for (double& v : f.values()) v = std::clamp(v + rng.normal(0.0, spec.noise_std), 0.0, 1.0);
    }
    seq.frames.push_back(std::move(f));
    seq.truth.push_back(b);
  }
  return seq;
}

Rect to_rect(const BBox& b) { return {b.cx - 0.5 * b.w, b.cy - 0.5 * b.h, b.w, b.h}; }

BBox to_bbox(const Rect& r) { return {r.x + 0.5 * r.w, r.y + 0.5 * r.h, r.w, r.h}; }

double iou(const Rect& a, const Rect& b) {
  const double iw = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double ih = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = iw * ih;
  const double uni = a.w * a.h + b.w * b.h - inter;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double iou(const BBox& a, const BBox& b) { return iou(to_rect(a), to_rect(b)); }

TrackMetrics evaluate_boxes(std::span<const BBox> predicted, std::span<const BBox> truth,
                            std::optional<std::size_t> lost_from) {
  if (predicted.size() != truth.size()) throw InvalidArgument("prediction/truth length mismatch");
  TrackMetrics m;
  m.predicted.assign(predicted.begin(), predicted.end());
  m.truth.assign(truth.begin(), truth.end());
  m.lost_at = lost_from;
  std::size_t successes = 0;
  double total = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double err = std::hypot(predicted[i].cx - truth[i].cx, predicted[i].cy - truth[i].cy);
    const double o = (lost_from && i >= *lost_from) ? 0.0 : iou(predicted[i], truth[i]);
    m.center_error.push_back(err);
    m.iou.push_back(o);
    total += o;
    if (o >= 0.5) ++successes;
  }
  if (!predicted.empty()) {
    m.mean_iou = total / static_cast<double>(predicted.size());
    m.success_rate = static_cast<double>(successes) / static_cast<double>(predicted.size());
  }
  return m;
}

TrackMetrics run_tracking(const Sequence& seq, const TrackerConfig& cfg,
                          FeatureExtractor extractor) {
  if (seq.frames.size() < 2 || seq.truth.size() != seq.frames.size()) {
    throw InvalidArgument("tracking needs at least two frames with ground truth");
  }
  const auto t0 = std::chrono::steady_clock::now();
  TrackState state = init(seq.frames[0], seq.truth[0], cfg, std::move(extractor));
  std::vector<BBox> predicted;
  std::optional<std::size_t> lost;
  for (std::size_t t = 1; t < seq.frames.size(); ++t) {
    if (!lost) {
      try {
        StepResult r = step(state, seq.frames[t]);
        state = std::move(r.state);
      } catch (const LostTarget&) {
        lost = predicted.size();
      }
    }
    predicted.push_back(state.box());
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  TrackMetrics m = evaluate_boxes(predicted, std::span(seq.truth).subspan(1), lost);
  m.first_frame = 1;
  if (lost) m.lost_at = *lost + 1;
  m.fps = secs > 0.0 ? static_cast<double>(seq.frames.size()) / secs : 0.0;
  return m;
}

void BenchInstance::validate() const {
  if (samples < 1 || foreground > samples) throw InvalidArgument("bad sample counts");
  if (dims < 1) throw InvalidArgument("dims must be >= 1");
  if (!(0.0 <= fg_low && fg_low <= fg_high && fg_high <= 1.0 && 0.0 <= bg_low &&
        bg_low <= bg_high && bg_high <= 1.0)) {
    throw InvalidArgument("target ranges must be ordered within [0, 1]");
  }
  if (zero_residual_init && dims != samples) {
    throw InvalidArgument("zero-residual initialisation needs dims == samples");
  }
}

void BenchOptimizer::validate() const {
  if (!(lr > 0.0)) throw InvalidArgument("lr must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw InvalidArgument("momentum must lie in [0, 1)");
  if (max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidArgument("threshold must lie in (0, 1)");
}

std::vector<BenchLoss> default_bench_losses() {
  LossParams proposed;
  proposed.alpha = 1.0;
  proposed.a = 1.0;
  return {{"proposed", BenchLossKind::proposed, proposed},
          {"l2", BenchLossKind::l2, {}},
          {"l1", BenchLossKind::l1, {}}};
}

BenchResult loss_bench(const BenchInstance& instance, std::span<const BenchLoss> losses,
                       const BenchOptimizer& optimizer) {
  instance.validate();
  optimizer.validate();
  if (losses.size() < 2) throw InvalidArgument("loss_bench needs at least two loss kinds");
  for (const auto& l : losses) {
    if (l.kind == BenchLossKind::proposed) l.params.validate();
  }

  Rng rng(instance.seed);
  Grid features(instance.samples, instance.dims);
  for (double& v : features.values()) v = rng.normal();
  std::vector<double> targets(instance.samples);
  for (std::size_t i = 0; i < instance.samples; ++i) {
    targets[i] = i < instance.foreground ? rng.uniform(instance.fg_low, instance.fg_high)
                                         : rng.uniform(instance.bg_low, instance.bg_high);
  }
  std::vector<double> w0(instance.dims, 0.0);
  if (instance.zero_residual_init) w0 = closed_form(features, targets, 0.0).weights;

  // Below this the batch counts as fitted regardless of the relative test.
  constexpr double kAbsoluteFloor = 1e-12;

  BenchResult result;
  for (const auto& spec : losses) {
    BenchCurve curve{spec.name, {}, -1};
    std::vector<double> w = w0;
    std::vector<double> v(instance.dims, 0.0);
    std::vector<double> g(instance.dims);
    curve.loss.reserve(optimizer.max_iters + 1);
    for (std::size_t it = 0; it <= optimizer.max_iters; ++it) {
      double loss = 0.0;
      std::fill(g.begin(), g.end(), 0.0);
      for (std::size_t i = 0; i < instance.samples; ++i) {
        double pred = 0.0;
        for (std::size_t d = 0; d < instance.dims; ++d) pred += features(i, d) * w[d];
        const WeightedResidual s{pred - targets[i], targets[i]};
        if (!std::isfinite(s.x)) {
          loss = std::numeric_limits<double>::quiet_NaN();
          break;
        }
        double gi = 0.0;
        switch (spec.kind) {
          case BenchLossKind::proposed:
            loss += eval_loss(s, spec.params);
            gi = grad_x(s, spec.params);
            break;
          case BenchLossKind::l2:
            loss += baseline_loss(s, BaselineKind::l2);
            gi = baseline_grad(s, BaselineKind::l2);
            break;
          case BenchLossKind::l1:
            loss += baseline_loss(s, BaselineKind::l1);
            gi = baseline_grad(s, BaselineKind::l1);
            break;
        }
        for (std::size_t d = 0; d < instance.dims; ++d) g[d] += gi * features(i, d);
      }
      if (!std::isfinite(loss)) break;
      curve.loss.push_back(loss);
      if (curve.iterations_to_threshold < 0 &&
          (loss <= optimizer.threshold * curve.loss.front() || loss <= kAbsoluteFloor)) {
        curve.iterations_to_threshold = static_cast<long long>(it);
      }
      if (it == optimizer.max_iters) break;
      for (std::size_t d = 0; d < instance.dims; ++d) {
        v[d] = optimizer.momentum * v[d] - optimizer.lr * g[d];
        w[d] += v[d];
      }
    }
    if (curve.loss.empty()) throw InvalidArgument("loss_bench: non-finite initial loss");
    result.curves.push_back(std::move(curve));
  }
  return result;
}

std::vector<ChannelRow> inspect_channels(const Frame& frame, const BBox& box,
                                         const TrackerConfig& cfg, FeatureExtractor extractor) {
  return channel_rows(init(frame, box, cfg, std::move(extractor)));
}

std::vector<ChannelRow> channel_rows(const TrackState& state) {
  std::vector<ChannelRow> rows;
  rows.reserve(state.scores.ranking.size());
  for (std::size_t m = 0; m < state.scores.ranking.size(); ++m) {
    const std::size_t ch = state.scores.ranking[m];
    const bool sel =
        std::find(state.selected.begin(), state.selected.end(), ch) != state.selected.end();
    rows.push_back({ch, state.scores.scores[ch], m + 1, sel});
  }
  return rows;
}

std::string truth_csv(std::span<const BBox> truth) {
  CsvWriter csv({"frame", "cx", "cy", "w", "h"});
  for (std::size_t t = 0; t < truth.size(); ++t) {
    csv.cell(t).cell(truth[t].cx).cell(truth[t].cy).cell(truth[t].w).cell(truth[t].h).end_row();
  }
  return csv.str();
}

std::vector<BBox> parse_truth_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) != std::vector<std::string>{"frame", "cx", "cy", "w", "h"}) {
    throw FormatError("gt.csv: unexpected header");
  }
  std::vector<BBox> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 5) throw FormatError("gt.csv: expected 5 columns");
    try {
      if (std::stoul(f[0]) != out.size()) throw FormatError("gt.csv: frames out of order");
      out.push_back({std::stod(f[1]), std::stod(f[2]), std::stod(f[3]), std::stod(f[4])});
    } catch (const std::logic_error&) {
      throw FormatError("gt.csv: malformed number in '" + line + "'");
    }
  }
  return out;
}

std::string metrics_csv(const TrackMetrics& m) {
  CsvWriter csv({"frame", "pred_cx", "pred_cy", "pred_w", "pred_h", "gt_cx", "gt_cy", "gt_w",
                 "gt_h", "center_error", "iou"});
  for (std::size_t i = 0; i < m.predicted.size(); ++i) {
    const BBox& p = m.predicted[i];
    const BBox& g = m.truth[i];
    csv.cell(m.first_frame + i).cell(p.cx).cell(p.cy).cell(p.w).cell(p.h);
    csv.cell(g.cx).cell(g.cy).cell(g.w).cell(g.h).cell(m.center_error[i]).cell(m.iou[i]);
    csv.end_row();
  }
  return csv.str();
}

std::string metrics_summary_csv(const TrackMetrics& m) {
  CsvWriter csv({"frames", "mean_iou", "success_rate", "mean_center_error", "lost_at"});
  double err = 0.0;
  for (double e : m.center_error) err += e;
  if (!m.center_error.empty()) err /= static_cast<double>(m.center_error.size());
  csv.cell(m.predicted.size()).cell(m.mean_iou).cell(m.success_rate).cell(err);
  csv.cell(m.lost_at ? static_cast<long long>(*m.lost_at) : -1LL).end_row();
  return csv.str();
}

std::string curves_csv(const BenchResult& r) {
  CsvWriter csv({"kind", "iteration", "loss"});
  for (const auto& c : r.curves) {
    for (std::size_t i = 0; i < c.loss.size(); ++i) csv.cell(c.name).cell(i).cell(c.loss[i]).end_row();
  }
  return csv.str();
}

std::string bench_summary_csv(const BenchResult& r) {
  CsvWriter csv({"kind", "initial_loss", "final_loss", "iterations_to_threshold"});
  for (const auto& c : r.curves) {
    csv.cell(c.name).cell(c.loss.front()).cell(c.loss.back()).cell(c.iterations_to_threshold);
    csv.end_row();
  }
  return csv.str();
}

std::string channels_csv(std::span<const ChannelRow> rows) {
  CsvWriter csv({"channel", "score", "rank", "selected"});
  for (const auto& row : rows) {
    csv.cell(row.channel).cell(row.score).cell(row.rank).cell(row.selected ? 1 : 0).end_row();
  }
  return csv.str();
}

}  // namespace domainsiam
