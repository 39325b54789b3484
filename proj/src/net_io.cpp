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

// DSRN layout (all integers u32, all reals f64, little-endian):
//   "DSRN" | version | layer_count
//   per layer: kernel | in_channels | out_channels | has_bias
//   lambda
//   per layer: weights[out][kr][kc][in] | biases[out]

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "domainsiam/error.hpp"
#include "domainsiam/ridge.hpp"

namespace domainsiam {

namespace {

constexpr std::array<char, 4> kMagic = {'D', 'S', 'R', 'N'};
constexpr std::uint32_t kMaxDim = 1u << 16;
// Refuse headers implying more parameters than any sane net before allocating.
constexpr std::size_t kMaxParams = std::size_t{1} << 26;

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> b{};
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(b.data(), b.size());
}

void put_f64(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
  out.write(b.data(), b.size());
}

template <std::size_t N>
std::array<unsigned char, N> take(std::istream& in) {
  std::array<unsigned char, N> b{};
  in.read(reinterpret_cast<char*>(b.data()), N);
  if (in.gcount() != static_cast<std::streamsize>(N)) throw FormatError("DSRN: truncated input");
  return b;
}

std::uint32_t get_u32(std::istream& in) {
  const auto b = take<4>(in);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) {
  const auto b = take<8>(in);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

}  // namespace

void write_net(const RidgeNet& net, std::ostream& out) {
  net.validate();
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, kNetFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(net.layers.size()));
  for (const auto& l : net.layers) {
    put_u32(out, static_cast<std::uint32_t>(l.kernel));
    put_u32(out, static_cast<std::uint32_t>(l.in_channels));
    put_u32(out, static_cast<std::uint32_t>(l.out_channels));
    put_u32(out, l.has_bias ? 1u : 0u);
  }
  put_f64(out, net.lambda);
  for (const auto& l : net.layers) {
    for (double w : l.weights) put_f64(out, w);
    for (double b : l.biases) put_f64(out, b);
  }
  if (!out) throw FormatError("DSRN: write failed");
}

RidgeNet read_net(std::istream& in) {
  const auto magic = take<4>(in);
  if (std::memcmp(magic.data(), kMagic.data(), kMagic.size()) != 0) {
    throw FormatError("DSRN: bad magic");
  }
  const std::uint32_t version = get_u32(in);
  if (version != kNetFormatVersion) {
    throw FormatError("DSRN: unsupported version " + std::to_string(version));
  }
  const std::uint32_t count = get_u32(in);
  if (count < 1 || count > 2) throw FormatError("DSRN: bad layer count");

  RidgeNet net;
  net.layers.resize(count);
  for (auto& l : net.layers) {
    l.kernel = get_u32(in);
    l.in_channels = get_u32(in);
    l.out_channels = get_u32(in);
    const std::uint32_t bias = get_u32(in);
    if (l.kernel == 0 || l.kernel > 64 || l.in_channels == 0 || l.in_channels > kMaxDim ||
        l.out_channels == 0 || l.out_channels > kMaxDim || bias > 1) {
      throw FormatError("DSRN: bad layer header");
    }
    l.has_bias = bias == 1;
    if (l.patch_size() * l.out_channels > kMaxParams) throw FormatError("DSRN: layer too large");
  }
  net.lambda = get_f64(in);
  for (auto& l : net.layers) {
    l.weights.resize(l.out_channels * l.patch_size());
    l.biases.resize(l.out_channels);
    for (double& w : l.weights) w = get_f64(in);
    for (double& b : l.biases) b = get_f64(in);
  }
  try {
    net.validate();
  } catch (const std::exception& e) {
    throw FormatError(std::string("DSRN: ") + e.what());
  }
  return net;
}

void save_net(const RidgeNet& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_net(net, out);
}

RidgeNet load_net(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_net(in);
}

}  // namespace domainsiam
