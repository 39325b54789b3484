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

// Flat JSON configs for the command-line tool. Every key maps onto one field
// of a typed config; unknown keys and ill-typed values raise ConfigError.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "domainsiam/harness.hpp"
#include "domainsiam/tracker.hpp"

namespace domainsiam::cli {

using Json = nlohmann::json;

struct BenchConfig {
  BenchInstance instance;
  BenchOptimizer optimizer;
  std::vector<BenchLoss> losses = default_bench_losses();
};

/// Parses a JSON object from `path`; an empty path yields `{}`.
Json load_json(const std::filesystem::path& path);

/// Applies `key=value` assignments on top of `obj`. The value is read as JSON
/// when it parses, otherwise as a bare string.
void apply_overrides(Json& obj, const std::vector<std::string>& assignments);

TrackerConfig tracker_config(const Json& obj);
SyntheticSpec synth_config(const Json& obj);
BenchConfig bench_config(const Json& obj);

/// Key names accepted by each config kind, sorted.
std::vector<std::string> tracker_keys();
std::vector<std::string> synth_keys();
std::vector<std::string> bench_keys();

}  // namespace domainsiam::cli
