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

#include <algorithm>
#include <cmath>
#include <vector>

#include "domainsiam/error.hpp"
#include "domainsiam/ridge.hpp"
#include "domainsiam/simd/kernels.hpp"

namespace domainsiam {

namespace {

// Lower-triangular Cholesky factor of a symmetric D x D matrix, in place.
void cholesky(Grid& a) {
  const std::size_t n = a.height();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
  const double tol = 1e-13 * std::max(max_diag, 1e-300) * static_cast<double>(n);

  for (std::size_t j = 0; j < n; ++j) {
    const auto row_j = a.row(j).first(j);
    const double d = a(j, j) - simd::sum_squares(row_j);
    if (!(d > tol)) throw SingularSystem("normal equations are singular or indefinite");
    const double ljj = std::sqrt(d);
    a(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      a(i, j) = (a(i, j) - simd::dot(a.row(i).first(j), row_j)) / ljj;
    }
  }
}

std::vector<double> cholesky_solve(const Grid& l, std::span<const double> b) {
  const std::size_t n = l.height();
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = (b[i] - simd::dot(l.row(i).first(i), std::span<const double>(z).first(i))) / l(i, i);
  }
  std::vector<double> x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = z[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
    x[ii] = s / l(ii, ii);
  }
  return x;
}

Grid transpose(const Grid& x) {
  Grid t(x.width(), x.height());
  for (std::size_t r = 0; r < x.height(); ++r)
    for (std::size_t c = 0; c < x.width(); ++c) t(c, r) = x(r, c);
  return t;
}

}  // namespace

RidgeLinearModel closed_form(const Grid& X, std::span<const double> Y, double lambda) {
  const std::size_t n = X.height();
  const std::size_t d = X.width();
  if (n == 0 || d == 0) throw InvalidArgument("design matrix must be non-empty");
  if (Y.size() != n) throw InvalidArgument("target length must equal the number of rows");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be >= 0");

  const Grid xt = transpose(X);
  Grid gram(d, d);
  std::vector<double> rhs(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = simd::dot(xt.row(i), xt.row(j));
      gram(i, j) = v;
      gram(j, i) = v;
    }
    gram(i, i) += lambda;
    rhs[i] = simd::dot(xt.row(i), Y);
  }

  Grid factor = gram;
  cholesky(factor);
  std::vector<double> w = cholesky_solve(factor, rhs);

  // One round of iterative refinement against the unfactored system.
  std::vector<double> residual(d);
  for (std::size_t i = 0; i < d; ++i) residual[i] = rhs[i] - simd::dot(gram.row(i), w);
  const std::vector<double> dw = cholesky_solve(factor, residual);
  for (std::size_t i = 0; i < d; ++i) w[i] += dw[i];

  double res_sq = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double r = rhs[i] - simd::dot(gram.row(i), w);
    res_sq += r * r;
  }
  const double y_norm = std::sqrt(simd::sum_squares(Y));
  if (!(std::sqrt(res_sq) <= 1e-8 * (1.0 + y_norm) * std::max(1.0, std::sqrt(simd::sum_squares(gram.values()))))) {
    throw SingularSystem("normal equations too ill-conditioned to solve accurately");
  }
  for (double v : w) {
    if (!std::isfinite(v)) throw SingularSystem("non-finite ridge solution");
  }
  return {std::move(w), lambda};
}

double ridge_objective(const RidgeLinearModel& model, const Grid& X, std::span<const double> Y,
                       double lambda) {
  if (model.weights.size() != X.width() || Y.size() != X.height()) {
    throw InvalidArgument("ridge objective: shape mismatch");
  }
  double total = 0.0;
  for (std::size_t r = 0; r < X.height(); ++r) {
    const double e = simd::dot(X.row(r), model.weights) - Y[r];
    total += e * e;
  }
  return total + lambda * simd::sum_squares(model.weights);
}

}  // namespace domainsiam
