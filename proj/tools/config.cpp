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

#include "config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>

#include "domainsiam/error.hpp"

namespace domainsiam::cli {

namespace {

using Setter = std::function<void(const Json&)>;
using Schema = std::map<std::string, Setter>;

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  throw ConfigError("config key '" + key + "': " + what);
}

double as_real(const std::string& key, const Json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "inf") return std::numeric_limits<double>::infinity();
  }
  bad(key, "expected a number");
}

std::uint64_t as_u64(const std::string& key, const Json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) return v.get<std::uint64_t>();
  bad(key, "expected a non-negative integer");
}

std::size_t as_size(const std::string& key, const Json& v) {
  return static_cast<std::size_t>(as_u64(key, v));
}

bool as_bool(const std::string& key, const Json& v) {
  if (!v.is_boolean()) bad(key, "expected true or false");
  return v.get<bool>();
}

std::string as_string(const std::string& key, const Json& v) {
  if (!v.is_string()) bad(key, "expected a string");
  return v.get<std::string>();
}

template <class T>
T as_enum(const std::string& key, const Json& v, const std::map<std::string, T>& names) {
  const std::string s = as_string(key, v);
  const auto it = names.find(s);
  if (it == names.end()) bad(key, "unknown value '" + s + "'");
  return it->second;
}

void apply_schema(const Schema& schema, const Json& obj) {
  if (!obj.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    const auto it = schema.find(key);
    if (it == schema.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(value);
  }
}

std::vector<std::string> keys_of(const Schema& s) {
  std::vector<std::string> out;
  for (const auto& kv : s) out.push_back(kv.first);
  return out;
}

// Library validation errors become config errors at this boundary.
template <class F>
void validated(F&& f) {
  try {
    f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
}

Schema tracker_schema(TrackerConfig& c, double& alpha_end, bool& linear) {
  return {
      {"scale_base", [&](const Json& v) { c.scale_base = as_real("scale_base", v); }},
      {"scale_exponents",
       [&](const Json& v) {
         if (!v.is_array()) bad("scale_exponents", "expected an array of integers");
         c.scale_exponents.clear();
         for (const auto& e : v) {
           if (!e.is_number_integer()) bad("scale_exponents", "expected an array of integers");
           c.scale_exponents.push_back(e.get<int>());
         }
       }},
      {"scale_lerp", [&](const Json& v) { c.scale_lerp = as_real("scale_lerp", v); }},
      {"top_k", [&](const Json& v) { c.top_k = as_size("top_k", v); }},
      {"label_sigma_factor",
       [&](const Json& v) { c.label_sigma_factor = as_real("label_sigma_factor", v); }},
      {"extractor",
       [&](const Json& v) {
         c.extractor.kind = as_enum<ExtractorKind>("extractor", v,
                                                   {{"raw", ExtractorKind::raw},
                                                    {"gradients", ExtractorKind::gradients},
                                                    {"random_filters", ExtractorKind::random_filters}});
       }},
      {"filter_count", [&](const Json& v) { c.extractor.filter_count = as_size("filter_count", v); }},
      {"filter_size", [&](const Json& v) { c.extractor.filter_size = as_size("filter_size", v); }},
      {"extractor_seed", [&](const Json& v) { c.extractor.seed = as_u64("extractor_seed", v); }},
      {"stride", [&](const Json& v) { c.extractor.stride = as_size("stride", v); }},
      {"alpha", [&](const Json& v) { c.loss.alpha = as_real("alpha", v); }},
      {"a", [&](const Json& v) { c.loss.a = as_real("a", v); }},
      {"branch_eps", [&](const Json& v) { c.loss.branch_eps = as_real("branch_eps", v); }},
      {"welsch_threshold",
       [&](const Json& v) { c.loss.welsch_threshold = as_real("welsch_threshold", v); }},
      {"alpha_schedule",
       [&](const Json& v) {
         linear = as_enum<bool>("alpha_schedule", v, {{"fixed", false}, {"linear", true}});
       }},
      {"alpha_end", [&](const Json& v) { alpha_end = as_real("alpha_end", v); }},
      {"epochs", [&](const Json& v) { c.train.epochs = as_size("epochs", v); }},
      {"batch_size", [&](const Json& v) { c.train.batch_size = as_size("batch_size", v); }},
      {"steps_per_epoch",
       [&](const Json& v) { c.train.steps_per_epoch = as_size("steps_per_epoch", v); }},
      {"momentum", [&](const Json& v) { c.train.momentum = as_real("momentum", v); }},
      {"lr_start", [&](const Json& v) { c.train.lr_start = as_real("lr_start", v); }},
      {"lr_end", [&](const Json& v) { c.train.lr_end = as_real("lr_end", v); }},
      {"max_shift", [&](const Json& v) { c.train.max_shift = as_size("max_shift", v); }},
      {"layers", [&](const Json& v) { c.net.layers = as_size("layers", v); }},
      {"kernel1", [&](const Json& v) { c.net.kernel1 = as_size("kernel1", v); }},
      {"hidden", [&](const Json& v) { c.net.hidden = as_size("hidden", v); }},
      {"kernel2", [&](const Json& v) { c.net.kernel2 = as_size("kernel2", v); }},
      {"bias", [&](const Json& v) { c.net.bias = as_bool("bias", v); }},
      {"lambda", [&](const Json& v) { c.lambda = as_real("lambda", v); }},
      {"seed",
       [&](const Json& v) {
         c.seed = as_u64("seed", v);
         c.train.seed = c.seed;
       }},
      {"subcell_refinement",
       [&](const Json& v) { c.subcell_refinement = as_bool("subcell_refinement", v); }},
      {"cosine_window", [&](const Json& v) { c.cosine_window = as_bool("cosine_window", v); }},
      {"scale_penalty", [&](const Json& v) { c.scale_penalty = as_real("scale_penalty", v); }},
  };
}

struct SynthScratch {
  std::optional<double> start_x, start_y;
  std::optional<std::size_t> occ_start, occ_length;
  std::optional<double> occ_fraction;
};

Schema synth_schema(SyntheticSpec& s, SynthScratch& x) {
  return {
      {"frames", [&](const Json& v) { s.frames = as_size("frames", v); }},
      {"frame_height", [&](const Json& v) { s.frame_height = as_size("frame_height", v); }},
      {"frame_width", [&](const Json& v) { s.frame_width = as_size("frame_width", v); }},
      {"target_w", [&](const Json& v) { s.target_w = as_real("target_w", v); }},
      {"target_h", [&](const Json& v) { s.target_h = as_real("target_h", v); }},
      {"start_x", [&](const Json& v) { x.start_x = as_real("start_x", v); }},
      {"start_y", [&](const Json& v) { x.start_y = as_real("start_y", v); }},
      {"motion",
       [&](const Json& v) {
         s.motion.kind = as_enum<Motion::Kind>("motion", v,
                                               {{"static", Motion::Kind::still},
                                                {"linear", Motion::Kind::linear},
                                                {"sinusoidal", Motion::Kind::sinusoidal}});
       }},
      {"vx", [&](const Json& v) { s.motion.vx = as_real("vx", v); }},
      {"vy", [&](const Json& v) { s.motion.vy = as_real("vy", v); }},
      {"amplitude", [&](const Json& v) { s.motion.amplitude = as_real("amplitude", v); }},
      {"period", [&](const Json& v) { s.motion.period = as_real("period", v); }},
      {"scale_drift", [&](const Json& v) { s.scale_drift = as_real("scale_drift", v); }},
      {"noise_std", [&](const Json& v) { s.noise_std = as_real("noise_std", v); }},
      {"occlusion_start", [&](const Json& v) { x.occ_start = as_size("occlusion_start", v); }},
      {"occlusion_length", [&](const Json& v) { x.occ_length = as_size("occlusion_length", v); }},
      {"occlusion_fraction",
       [&](const Json& v) { x.occ_fraction = as_real("occlusion_fraction", v); }},
      {"seed", [&](const Json& v) { s.seed = as_u64("seed", v); }},
  };
}

struct BenchScratch {
  double alpha = 1.0;
  double a = 1.0;
};

Schema bench_schema(BenchConfig& b, BenchScratch& x) {
  auto& in = b.instance;
  auto& op = b.optimizer;
  return {
      {"samples", [&](const Json& v) { in.samples = as_size("samples", v); }},
      {"foreground", [&](const Json& v) { in.foreground = as_size("foreground", v); }},
      {"dims", [&](const Json& v) { in.dims = as_size("dims", v); }},
      {"fg_low", [&](const Json& v) { in.fg_low = as_real("fg_low", v); }},
      {"fg_high", [&](const Json& v) { in.fg_high = as_real("fg_high", v); }},
      {"bg_low", [&](const Json& v) { in.bg_low = as_real("bg_low", v); }},
      {"bg_high", [&](const Json& v) { in.bg_high = as_real("bg_high", v); }},
      {"zero_residual_init",
       [&](const Json& v) { in.zero_residual_init = as_bool("zero_residual_init", v); }},
      {"seed", [&](const Json& v) { in.seed = as_u64("seed", v); }},
      {"lr", [&](const Json& v) { op.lr = as_real("lr", v); }},
      {"momentum", [&](const Json& v) { op.momentum = as_real("momentum", v); }},
      {"max_iters", [&](const Json& v) { op.max_iters = as_size("max_iters", v); }},
      {"threshold", [&](const Json& v) { op.threshold = as_real("threshold", v); }},
      {"alpha", [&](const Json& v) { x.alpha = as_real("alpha", v); }},
      {"a", [&](const Json& v) { x.a = as_real("a", v); }},
      {"kinds",
       [&](const Json& v) {
         if (!v.is_array()) bad("kinds", "expected an array of loss names");
         b.losses.clear();
         for (const auto& e : v) {
           const auto kind = as_enum<BenchLossKind>("kinds", e,
                                                    {{"proposed", BenchLossKind::proposed},
                                                     {"l2", BenchLossKind::l2},
                                                     {"l1", BenchLossKind::l1}});
           b.losses.push_back({e.get<std::string>(), kind, {}});
         }
       }},
  };
}

}  // namespace

Json load_json(const std::filesystem::path& path) {
  if (path.empty()) return Json::object();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  try {
    Json j = Json::parse(in);
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    return j;
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

void apply_overrides(Json& obj, const std::vector<std::string>& assignments) {
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + a + "' is not key=value");
    const std::string key = a.substr(0, eq);
    const std::string text = a.substr(eq + 1);
    Json v = Json::parse(text, nullptr, /*allow_exceptions=*/false);
    obj[key] = v.is_discarded() ? Json(text) : v;
  }
}

TrackerConfig tracker_config(const Json& obj) {
  TrackerConfig c;
  double alpha_end = std::numeric_limits<double>::quiet_NaN();
  bool linear = false;
  apply_schema(tracker_schema(c, alpha_end, linear), obj);
  if (linear) {
    if (std::isnan(alpha_end)) throw ConfigError("alpha_schedule 'linear' needs alpha_end");
    c.train.alpha_schedule = AlphaSchedule::linear(c.loss.alpha, alpha_end);
  } else {
    if (!std::isnan(alpha_end)) throw ConfigError("alpha_end is only valid with a linear schedule");
    c.train.alpha_schedule = AlphaSchedule::fixed(c.loss.alpha);
  }
  c.train.a = c.loss.a;
  validated([&] { c.validate(); });
  return c;
}

SyntheticSpec synth_config(const Json& obj) {
  SyntheticSpec s;
  SynthScratch x;
  apply_schema(synth_schema(s, x), obj);
  if (x.start_x.has_value() != x.start_y.has_value()) {
    throw ConfigError("start_x and start_y must be given together");
  }
  if (x.start_x) s.start = Point{*x.start_x, *x.start_y};
  if (x.occ_start || x.occ_length || x.occ_fraction) {
    if (!x.occ_start || !x.occ_length) {
      throw ConfigError("occlusion needs occlusion_start and occlusion_length");
    }
    s.occlusion = Occlusion{*x.occ_start, *x.occ_length, x.occ_fraction.value_or(0.5)};
  }
  validated([&] { s.validate(); });
  return s;
}

BenchConfig bench_config(const Json& obj) {
  BenchConfig b;
  BenchScratch x;
  apply_schema(bench_schema(b, x), obj);
  for (auto& l : b.losses) {
    if (l.kind == BenchLossKind::proposed) {
      l.params.alpha = x.alpha;
      l.params.a = x.a;
    }
  }
  if (b.losses.size() < 2) throw ConfigError("kinds must list at least two losses");
  validated([&] {
    b.instance.validate();
    b.optimizer.validate();
    for (const auto& l : b.losses) l.params.validate();
  });
  return b;
}

std::vector<std::string> tracker_keys() {
  TrackerConfig c;
  double e = 0;
  bool l = false;
  return keys_of(tracker_schema(c, e, l));
}

std::vector<std::string> synth_keys() {
  SyntheticSpec s;
  SynthScratch x;
  return keys_of(synth_schema(s, x));
}

std::vector<std::string> bench_keys() {
  BenchConfig b;
  BenchScratch x;
  return keys_of(bench_schema(b, x));
}

}  // namespace domainsiam::cli
