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

// domainsiam: synth | track | loss-bench | channels
//
// Exit codes: 0 success, 2 invalid configuration or usage, 3 runtime failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "config.hpp"
#include "domainsiam/error.hpp"
#include "domainsiam/harness.hpp"
#include "domainsiam/io.hpp"
#include "domainsiam/ridge.hpp"
#include "domainsiam/simd/kernels.hpp"

namespace fs = std::filesystem;
using namespace domainsiam;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::vector<std::string> sets;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "flat JSON config file");
  app->add_option("--seed", c.seed, "RNG seed (overrides the config)");
  app->add_option("--out", c.out, "output directory")->capture_default_str();
  app->add_option("--set", c.sets, "key=value config override (repeatable)");
}

cli::Json merged(const Common& c) {
  cli::Json j = cli::load_json(c.config);
  cli::apply_overrides(j, c.sets);
  if (c.seed) j["seed"] = *c.seed;
  return j;
}

fs::path out_dir(const Common& c) {
  fs::path p(c.out);
  fs::create_directories(p);
  return p;
}

std::string frame_name(std::size_t t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%04zu.pgm", t);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw FormatError("cannot open " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

BBox parse_bbox(const std::string& text) {
  const auto f = split_csv_line(text);
  if (f.size() != 4) throw ConfigError("--bbox expects cx,cy,w,h");
  try {
    return {std::stod(f[0]), std::stod(f[1]), std::stod(f[2]), std::stod(f[3])};
  } catch (const std::logic_error&) {
    throw ConfigError("--bbox expects four numbers");
  }
}

int run_synth(const Common& c, std::optional<std::size_t> frames, std::string motion) {
  cli::Json j = merged(c);
  if (frames) j["frames"] = *frames;
  if (!motion.empty()) j["motion"] = motion;
  const SyntheticSpec spec = cli::synth_config(j);
  const Sequence seq = synth_sequence(spec);
  const fs::path dir = out_dir(c);
  for (std::size_t t = 0; t < seq.frames.size(); ++t) write_pgm(seq.frames[t], dir / frame_name(t));
  std::ofstream(dir / "gt.csv", std::ios::binary) << truth_csv(seq.truth);
  std::cout << "wrote " << seq.frames.size() << " frames to " << dir.string() << "\n";
  return kExitOk;
}

Sequence read_sequence(const fs::path& dir) {
  Sequence seq;
  seq.truth = parse_truth_csv(slurp(dir / "gt.csv"));
  for (std::size_t t = 0; t < seq.truth.size(); ++t) seq.frames.push_back(read_pgm(dir / frame_name(t)));
  return seq;
}

int run_track(const Common& c, const std::string& sequence) {
  const TrackerConfig cfg = cli::tracker_config(merged(c));
  const Sequence seq = read_sequence(sequence);
  const TrackMetrics m = run_tracking(seq, cfg);
  const fs::path dir = out_dir(c);
  std::ofstream(dir / "metrics.csv", std::ios::binary) << metrics_csv(m);
  std::ofstream(dir / "summary.csv", std::ios::binary) << metrics_summary_csv(m);
  // Wall-clock speed varies run to run, so it stays out of the CSVs.
  std::cout << "mean_iou " << format_real(m.mean_iou) << "  success@0.5 "
            << format_real(m.success_rate) << "  fps " << m.fps << "  simd "
            << simd::isa_name(simd::active_isa()) << "\n";
  return kExitOk;
}

int run_bench(const Common& c, std::optional<std::size_t> max_iters) {
  cli::Json j = merged(c);
  if (max_iters) j["max_iters"] = *max_iters;
  const cli::BenchConfig b = cli::bench_config(j);
  const BenchResult r = loss_bench(b.instance, b.losses, b.optimizer);
  const fs::path dir = out_dir(c);
  std::ofstream(dir / "curves.csv", std::ios::binary) << curves_csv(r);
  std::ofstream(dir / "summary.csv", std::ios::binary) << bench_summary_csv(r);
  for (const auto& curve : r.curves) {
    std::cout << curve.name << ": iterations_to_threshold " << curve.iterations_to_threshold << "\n";
  }
  return kExitOk;
}

int run_channels(const Common& c, const std::string& frame_path, const std::string& bbox,
                 std::optional<std::size_t> top_k, const std::string& save_net) {
  cli::Json j = merged(c);
  if (top_k) j["top_k"] = *top_k;
  const TrackerConfig cfg = cli::tracker_config(j);
  const BBox box = parse_bbox(bbox);
  const Frame frame = read_pgm(fs::path(frame_path));
  TrackState state;
  try {
    state = init(frame, box, cfg);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  const fs::path dir = out_dir(c);
  std::ofstream(dir / "channels.csv", std::ios::binary) << channels_csv(channel_rows(state));
  if (!save_net.empty()) domainsiam::save_net(state.net, fs::path(save_net));
  std::cout << "selected " << state.selected.size() << " of " << state.scores.scores.size()
            << " channels\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DomainSiam tracker: synthetic data, tracking, loss benchmark, channel scores"};
  app.require_subcommand(1);

  Common synth_c, track_c, bench_c, chan_c;

  auto* synth = app.add_subcommand("synth", "render a synthetic sequence (PGM frames + gt.csv)");
  add_common(synth, synth_c);
  std::optional<std::size_t> synth_frames;
  std::string synth_motion;
  synth->add_option("--frames", synth_frames, "number of frames");
  synth->add_option("--motion", synth_motion, "static | linear | sinusoidal");

  auto* track = app.add_subcommand("track", "track a sequence directory, write metrics.csv");
  add_common(track, track_c);
  std::string sequence;
  track->add_option("--sequence", sequence, "directory with frame_NNNN.pgm and gt.csv")->required();

  auto* bench = app.add_subcommand("loss-bench", "loss convergence benchmark (curves.csv, summary.csv)");
  add_common(bench, bench_c);
  std::optional<std::size_t> max_iters;
  bench->add_option("--max-iters", max_iters, "optimizer iterations");

  auto* chan = app.add_subcommand("channels", "score feature channels on one frame (channels.csv)");
  add_common(chan, chan_c);
  std::string frame_path, bbox, save_net_path;
  std::optional<std::size_t> top_k;
  chan->add_option("--frame", frame_path, "PGM frame")->required();
  chan->add_option("--bbox", bbox, "target box cx,cy,w,h")->required();
  chan->add_option("--top-k", top_k, "channels to select");
  chan->add_option("--save-net", save_net_path, "write the trained net (DSRN) here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*synth) return run_synth(synth_c, synth_frames, synth_motion);
    if (*track) return run_track(track_c, sequence);
    if (*bench) return run_bench(bench_c, max_iters);
    if (*chan) return run_channels(chan_c, frame_path, bbox, top_k, save_net_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
