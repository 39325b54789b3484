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

#include <cmath>

#include "domainsiam/error.hpp"
#include "domainsiam/features.hpp"
#include "support.hpp"

namespace domainsiam {
namespace {

using testing::Gen;

TEST(ExtractPatch, ConstantFrame) {
  const Frame f(50, 60, 0.5);
  const Frame p = extract_patch(f, {30.0, 25.0}, 20.0, kTemplateSize);
  ASSERT_EQ(p.height(), kTemplateSize);
  ASSERT_EQ(p.width(), kTemplateSize);
  for (double v : p.values()) EXPECT_DOUBLE_EQ(v, 0.5);
}

TEST(ExtractPatch, AlignedCropIsTheSubImage) {
  Gen g(71);
  const Frame f = g.grid(20, 30, 0.0, 1.0);
  const Frame p = extract_patch(f, {10.0, 7.0}, 5.0, 5);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(p(i, j), f(5 + i, 8 + j));
}

TEST(ExtractPatch, OutsideFilledWithInsideMean) {
  Gen g(72);
  const Frame f = g.grid(20, 20, 0.0, 1.0);
  const Frame p = extract_patch(f, {-0.5, 9.5}, 10.0, 10);
  double mean = 0.0;
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 5; j < 10; ++j) {
      EXPECT_EQ(p(i, j), f(5 + i, j - 5));
      mean += p(i, j);
    }
  mean /= 50.0;
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(p(i, j), mean, 1e-15);
}

TEST(ExtractPatch, AlwaysOutSizeSquare) {
  Gen g(73);
  const Frame f = g.grid(40, 33, 0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t out = g.index(1, 64);
    const Frame p = extract_patch(f, {g.real(0, 32), g.real(0, 39)}, g.real(0.5, 120.0), out);
    EXPECT_EQ(p.height(), out);
    EXPECT_EQ(p.width(), out);
    for (double v : p.values()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(ExtractPatch, RejectsNoOverlapAndBadSizes) {
  const Frame f(10, 10, 0.2);
  EXPECT_THROW(extract_patch(f, {100.0, 100.0}, 5.0, 5), InvalidArgument);
  EXPECT_THROW(extract_patch(f, {5.0, 5.0}, 0.0, 5), InvalidArgument);
  EXPECT_THROW(extract_patch(f, {5.0, 5.0}, 3.0, 0), InvalidArgument);
  EXPECT_THROW(extract_patch(Frame{}, {5.0, 5.0}, 3.0, 3), InvalidArgument);
}

TEST(Extractors, RawCopiesPatch) {
  Gen g(74);
  const Frame p = g.grid(9, 9, 0.0, 1.0);
  ExtractorSpec spec;
  spec.kind = ExtractorKind::raw;
  const FeatureMap f = extract_features(p, spec);
  EXPECT_EQ(f.channels(), 1u);
  EXPECT_EQ(f.stride(), 1u);
  EXPECT_EQ(f.channel(0), p);
}

TEST(Extractors, GradientsOfConstantAreZero) {
  const FeatureMap f = extract_features(Frame(127, 127, 0.3), ExtractorSpec{});
  EXPECT_EQ(f.channels(), 2u);
  EXPECT_EQ(f.height(), 31u);
  EXPECT_EQ(f.stride(), 4u);
  for (double v : f.values()) EXPECT_EQ(v, 0.0);
}

TEST(Extractors, GradientsOfRamp) {
  Frame p(32, 32);
  for (std::size_t r = 0; r < 32; ++r)
    for (std::size_t c = 0; c < 32; ++c) p(r, c) = 0.01 * static_cast<double>(c) + 0.02 * static_cast<double>(r);
  ExtractorSpec spec;
  spec.stride = 2;
  const FeatureMap f = extract_features(p, spec);
  ASSERT_EQ(f.height(), 16u);
  // Interior blocks see the exact slope; edge blocks are damped by the
  // replicated border.
  for (std::size_t r = 1; r + 1 < 16; ++r)
    for (std::size_t c = 1; c + 1 < 16; ++c) {
      EXPECT_NEAR(f.at(r, c, 0), 0.01, 1e-15);
      EXPECT_NEAR(f.at(r, c, 1), 0.02, 1e-15);
    }
  EXPECT_NEAR(f.at(5, 0, 0), 0.5 * (0.005 + 0.01), 1e-15);
}

TEST(Extractors, RandomFiltersDeterministicAndSeeded) {
  Gen g(75);
  const Frame p = g.grid(31, 31, 0.0, 1.0);
  ExtractorSpec spec;
  spec.kind = ExtractorKind::random_filters;
  spec.seed = 3;
  spec.stride = 2;
  const FeatureMap a = extract_features(p, spec);
  EXPECT_EQ(a, extract_features(p, spec));
  EXPECT_EQ(a.channels(), 8u);
  EXPECT_EQ(a.height(), (31u - 5) / 2 + 1);
  spec.seed = 4;
  EXPECT_NE(a, extract_features(p, spec));
}

TEST(Extractors, RandomFiltersAreZeroMeanUnitNorm) {
  ExtractorSpec spec;
  spec.kind = ExtractorKind::random_filters;
  spec.stride = 1;
  spec.filter_count = 4;
  // A constant patch sees only the filter mean.
  const FeatureMap flat = extract_features(Frame(9, 9, 0.7), spec);
  for (double v : flat.values()) EXPECT_NEAR(v, 0.0, 1e-14);
  // A unit impulse reads one filter tap per output position; the taps of a
  // unit-norm filter square-sum to one.
  Frame impulse(9, 9);
  impulse(4, 4) = 1.0;
  const FeatureMap f = extract_features(impulse, spec);
  for (std::size_t ch = 0; ch < 4; ++ch) {
    double ss = 0.0;
    for (std::size_t r = 0; r < f.height(); ++r)
      for (std::size_t c = 0; c < f.width(); ++c) ss += f.at(r, c, ch) * f.at(r, c, ch);
    EXPECT_NEAR(ss, 1.0, 1e-14);
  }
}

TEST(Extractors, RandomFiltersShiftEquivariant) {
  Gen g(76);
  const Frame big = g.grid(40, 42, 0.0, 1.0);
  ExtractorSpec spec;
  spec.kind = ExtractorKind::random_filters;
  spec.stride = 1;
  for (std::size_t shift : {1u, 2u}) {
    Frame a(40, 40), b(40, 40);
    for (std::size_t r = 0; r < 40; ++r)
      for (std::size_t c = 0; c < 40; ++c) {
        a(r, c) = big(r, c);
        b(r, c) = big(r, c + shift);
      }
    const FeatureMap fa = extract_features(a, spec);
    const FeatureMap fb = extract_features(b, spec);
    double worst = 0.0;
    for (std::size_t r = 0; r < fa.height(); ++r)
      for (std::size_t c = 0; c + shift < fa.width(); ++c)
        for (std::size_t ch = 0; ch < fa.channels(); ++ch)
          worst = std::max(worst, std::abs(fb.at(r, c, ch) - fa.at(r, c + shift, ch)));
    EXPECT_LE(worst, 1e-10);
  }
}

TEST(Extractors, SpecValidation) {
  ExtractorSpec spec;
  spec.stride = 0;
  EXPECT_THROW(spec.validate(), InvalidArgument);
  spec = ExtractorSpec{};
  spec.kind = ExtractorKind::random_filters;
  spec.filter_size = 4;
  EXPECT_THROW(spec.validate(), InvalidArgument);
  spec.filter_size = 5;
  spec.filter_count = 0;
  EXPECT_THROW(spec.validate(), InvalidArgument);
  EXPECT_THROW(extract_features(Frame(4, 5), ExtractorSpec{}), InvalidArgument);
  EXPECT_EQ(ExtractorSpec{}.channels(), 2u);
  EXPECT_EQ(ExtractorSpec{}.effective_stride(), 4u);
}

TEST(Extractors, MakeExtractorWrapsSpec) {
  Gen g(77);
  const Frame p = g.grid(16, 16, 0.0, 1.0);
  ExtractorSpec spec;
  spec.stride = 2;
  EXPECT_EQ(make_extractor(spec)(p), extract_features(p, spec));
}

}  // namespace
}  // namespace domainsiam
