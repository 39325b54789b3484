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

#include "domainsiam/features.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "domainsiam/error.hpp"
#include "domainsiam/rng.hpp"
#include "domainsiam/simd/kernels.hpp"

namespace domainsiam {

namespace {

double bilinear(const Frame& f, double y, double x) {
  const double max_r = static_cast<double>(f.height() - 1);
  const double max_c = static_cast<double>(f.width() - 1);
  y = std::clamp(y, 0.0, max_r);
  x = std::clamp(x, 0.0, max_c);
  const auto r0 = static_cast<std::size_t>(std::floor(y));
  const auto c0 = static_cast<std::size_t>(std::floor(x));
  const std::size_t r1 = std::min(r0 + 1, f.height() - 1);
  const std::size_t c1 = std::min(c0 + 1, f.width() - 1);
  const double fy = y - static_cast<double>(r0);
  const double fx = x - static_cast<double>(c0);
  const double top = f(r0, c0) + fx * (f(r0, c1) - f(r0, c0));
  const double bot = f(r1, c0) + fx * (f(r1, c1) - f(r1, c0));
  return top + fy * (bot - top);
}

FeatureMap gradient_features(const Frame& patch, std::size_t stride) {
  const std::size_t h = patch.height();
  const std::size_t w = patch.width();
  const std::size_t oh = h / stride;
  const std::size_t ow = w / stride;
  if (oh == 0 || ow == 0) throw InvalidArgument("patch smaller than the feature stride");
  FeatureMap out(oh, ow, 2, stride);
  const double inv_area = 1.0 / static_cast<double>(stride * stride);
  for (std::size_t r = 0; r < oh * stride; ++r) {
    const std::size_t up = r == 0 ? 0 : r - 1;
    const std::size_t down = std::min(r + 1, h - 1);
    for (std::size_t c = 0; c < ow * stride; ++c) {
      const std::size_t left = c == 0 ? 0 : c - 1;
      const std::size_t right = std::min(c + 1, w - 1);
      const double gx = 0.5 * (patch(r, right) - patch(r, left));
      const double gy = 0.5 * (patch(down, c) - patch(up, c));
      out.at(r / stride, c / stride, 0) += gx * inv_area;
      out.at(r / stride, c / stride, 1) += gy * inv_area;
    }
  }
  return out;
}

std::vector<std::vector<double>> make_filters(const ExtractorSpec& spec) {
  Rng rng(spec.seed);
  const std::size_t n = spec.filter_size * spec.filter_size;
  std::vector<std::vector<double>> filters(spec.filter_count, std::vector<double>(n));
  for (auto& f : filters) {
    double mean = 0.0;
    for (double& v : f) {
      v = rng.normal();
      mean += v;
    }
    mean /= static_cast<double>(n);
    double norm = 0.0;
    for (double& v : f) {
      v -= mean;
      norm += v * v;
    }
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      for (double& v : f) v /= norm;
    }
  }
  return filters;
}

FeatureMap random_filter_features(const Frame& patch, const ExtractorSpec& spec) {
  const std::size_t k = spec.filter_size;
  if (patch.height() < k || patch.width() < k) {
    throw InvalidArgument("patch smaller than the filter size");
  }
  const std::size_t oh = (patch.height() - k) / spec.stride + 1;
  const std::size_t ow = (patch.width() - k) / spec.stride + 1;
  const auto filters = make_filters(spec);
  FeatureMap out(oh, ow, spec.filter_count, spec.stride);
  std::vector<double> window(k * k);
  for (std::size_t r = 0; r < oh; ++r) {
    for (std::size_t c = 0; c < ow; ++c) {
      for (std::size_t i = 0; i < k; ++i) {
        const auto src = patch.row(r * spec.stride + i).subspan(c * spec.stride, k);
        std::copy(src.begin(), src.end(), window.begin() + static_cast<std::ptrdiff_t>(i * k));
      }
      for (std::size_t f = 0; f < filters.size(); ++f) {
        out.at(r, c, f) = simd::dot(filters[f], window);
      }
    }
  }
  return out;
}

}  // namespace

Frame extract_patch(const Frame& frame, Point center, double crop_size, std::size_t out_size) {
  if (frame.size() == 0) throw InvalidArgument("empty frame");
  if (!(crop_size > 0.0) || !std::isfinite(crop_size)) {
    throw InvalidArgument("crop size must be positive");
  }
  if (out_size == 0) throw InvalidArgument("output size must be positive");
  if (!std::isfinite(center.x) || !std::isfinite(center.y)) {
    throw InvalidArgument("crop center must be finite");
  }

  const double step = crop_size / static_cast<double>(out_size);
  const double y0 = center.y - 0.5 * crop_size + 0.5 * step;
  const double x0 = center.x - 0.5 * crop_size + 0.5 * step;
  const double lim_r = static_cast<double>(frame.height()) - 0.5;
  const double lim_c = static_cast<double>(frame.width()) - 0.5;

  Frame patch(out_size, out_size);
  std::vector<char> inside(out_size * out_size, 0);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < out_size; ++i) {
    const double y = y0 + static_cast<double>(i) * step;
    const bool row_in = y >= -0.5 && y < lim_r;
    for (std::size_t j = 0; j < out_size; ++j) {
      const double x = x0 + static_cast<double>(j) * step;
      if (!row_in || x < -0.5 || x >= lim_c) continue;
      const double v = bilinear(frame, y, x);
      patch(i, j) = v;
      inside[i * out_size + j] = 1;
      sum += v;
      ++count;
    }
  }
  if (count == 0) throw InvalidArgument("crop does not overlap the frame");
  if (count < inside.size()) {
    const double mean = sum / static_cast<double>(count);
    for (std::size_t idx = 0; idx < inside.size(); ++idx) {
      if (!inside[idx]) patch.values()[idx] = mean;
    }
  }
  return patch;
}

void ExtractorSpec::validate() const {
  if (stride < 1) throw InvalidArgument("extractor stride must be >= 1");
  if (kind == ExtractorKind::random_filters) {
    if (filter_count < 1) throw InvalidArgument("filter_count must be >= 1");
    if (filter_size % 2 == 0) throw InvalidArgument("filter_size must be odd");
  }
}

std::size_t ExtractorSpec::effective_stride() const {
  return kind == ExtractorKind::raw ? 1 : stride;
}

double ExtractorSpec::origin() const {
  switch (kind) {
    case ExtractorKind::raw:
      return 0.0;
    case ExtractorKind::gradients:
      return 0.5 * static_cast<double>(stride - 1);
    case ExtractorKind::random_filters:
      return 0.5 * static_cast<double>(filter_size - 1);
  }
  return 0.0;
}

std::size_t ExtractorSpec::channels() const {
  switch (kind) {
    case ExtractorKind::raw:
      return 1;
    case ExtractorKind::gradients:
      return 2;
    case ExtractorKind::random_filters:
      return filter_count;
  }
  return 0;
}

FeatureMap extract_features(const Frame& patch, const ExtractorSpec& spec) {
  spec.validate();
  if (patch.height() != patch.width() || patch.size() == 0) {
    throw InvalidArgument("feature extraction expects a non-empty square patch");
  }
  switch (spec.kind) {
    case ExtractorKind::raw: {
      FeatureMap out(patch.height(), patch.width(), 1, 1);
      std::copy(patch.values().begin(), patch.values().end(), out.values().begin());
      return out;
    }
    case ExtractorKind::gradients:
      return gradient_features(patch, spec.stride);
    case ExtractorKind::random_filters:
      return random_filter_features(patch, spec);
  }
  throw InvalidArgument("unknown extractor kind");
}

FeatureExtractor make_extractor(const ExtractorSpec& spec) {
  spec.validate();
  return [spec](const Frame& patch) { return extract_features(patch, spec); };
}

}  // namespace domainsiam
