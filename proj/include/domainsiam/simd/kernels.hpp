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

// Double-precision inner-loop kernels used by convolution, correlation and the
// normal-equation builder. Every kernel has a scalar reference implementation
// and, where the target supports it, an AVX2+FMA (x86-64) or NEON (aarch64)
// variant. The active variant is chosen once at startup from CPU features and
// may be overridden with DOMAINSIAM_SIMD=scalar|avx2|neon.

#include <cstddef>
#include <span>
#include <string_view>

namespace domainsiam::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa) noexcept;

// Whether the running CPU (and this build) can execute the variant.
bool isa_supported(Isa isa) noexcept;

Isa active_isa() noexcept;

// Switch the dispatch table. Throws InvalidArgument if unsupported. Not
// thread-safe with concurrent kernel calls; meant for tests and startup.
void set_active_isa(Isa isa);

// sum_i a[i] * b[i]. Sizes must match.
double dot(std::span<const double> a, std::span<const double> b) noexcept;

// y[i] += alpha * x[i]. Sizes must match.
void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept;

// sum_i x[i]^2.
double sum_squares(std::span<const double> x) noexcept;

// Per-variant entry points, exposed for the equivalence tests.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
double sum_squares(const double* x, std::size_t n) noexcept;
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define DOMAINSIAM_HAVE_AVX2_VARIANT 1
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
double sum_squares(const double* x, std::size_t n) noexcept;
}  // namespace avx2
#endif

#if defined(__aarch64__) || defined(_M_ARM64)
#define DOMAINSIAM_HAVE_NEON_VARIANT 1
namespace neon {
double dot(const double* a, const double* b, std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
double sum_squares(const double* x, std::size_t n) noexcept;
}  // namespace neon
#endif

}  // namespace domainsiam::simd
