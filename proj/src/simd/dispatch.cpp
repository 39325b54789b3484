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

#include <cstdlib>
#include <string>

#include "domainsiam/error.hpp"
#include "domainsiam/simd/kernels.hpp"

namespace domainsiam::simd {

namespace {

struct Table {
  Isa isa;
  double (*dot)(const double*, const double*, std::size_t) noexcept;
  void (*axpy)(double, const double*, double*, std::size_t) noexcept;
  double (*sum_squares)(const double*, std::size_t) noexcept;
};

Table table_for(Isa isa) noexcept {
  switch (isa) {
#ifdef DOMAINSIAM_HAVE_AVX2_VARIANT
    case Isa::avx2:
      return {Isa::avx2, &avx2::dot, &avx2::axpy, &avx2::sum_squares};
#endif
#ifdef DOMAINSIAM_HAVE_NEON_VARIANT
    case Isa::neon:
      return {Isa::neon, &neon::dot, &neon::axpy, &neon::sum_squares};
#endif
    default:
      return {Isa::scalar, &scalar::dot, &scalar::axpy, &scalar::sum_squares};
  }
}

Isa best_supported() noexcept {
  if (isa_supported(Isa::avx2)) return Isa::avx2;
  if (isa_supported(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

Isa initial_isa() noexcept {
  if (const char* env = std::getenv("DOMAINSIAM_SIMD")) {
    const std::string_view want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (want == isa_name(isa) && isa_supported(isa)) return isa;
    }
  }
  return best_supported();
}

Table& active() noexcept {
  static Table table = table_for(initial_isa());
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
    case Isa::scalar:
      break;
  }
  return "scalar";
}

bool isa_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#ifdef DOMAINSIAM_HAVE_AVX2_VARIANT
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#ifdef DOMAINSIAM_HAVE_NEON_VARIANT
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() noexcept { return active().isa; }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw InvalidArgument("SIMD variant not supported here: " + std::string(isa_name(isa)));
  }
  active() = table_for(isa);
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  return active().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

double sum_squares(std::span<const double> x) noexcept {
  return active().sum_squares(x.data(), x.size());
}

}  // namespace domainsiam::simd
