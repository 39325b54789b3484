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

// Shared helpers for the unit tests: seeded generators for property tests and
// independent reference implementations used as oracles.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "domainsiam/rng.hpp"
#include "domainsiam/tensor.hpp"

namespace domainsiam::testing {

// Property tests draw their cases from here so a failure names its seed.
struct Gen {
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double real(double lo, double hi) { return rng.uniform(lo, hi); }
  double normal() { return rng.normal(); }
  std::size_t index(std::size_t lo, std::size_t hi) {
    return static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(lo),
                                                     static_cast<std::int64_t>(hi)));
  }
  bool coin() { return rng.uniform() < 0.5; }

  Grid grid(std::size_t h, std::size_t w, double lo = -1.0, double hi = 1.0) {
    Grid g(h, w);
    for (double& v : g.values()) v = real(lo, hi);
    return g;
  }
  FeatureMap features(std::size_t h, std::size_t w, std::size_t c) {
    FeatureMap f(h, w, c);
    for (double& v : f.values()) v = normal();
    return f;
  }

  Rng rng;
};

// Central difference in long double: (f(t + h) - f(t - h)) / 2h.
inline long double central_difference(const std::function<long double(long double)>& f,
                                      long double t, long double h = 1e-6L) {
  return (f(t + h) - f(t - h)) / (2.0L * h);
}

// |a - b| <= rel * max(|a|, |b|), plus `abs` slack for values near zero.
inline bool close(double a, double b, double rel, double abs = 0.0) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs;
}

}  // namespace domainsiam::testing
