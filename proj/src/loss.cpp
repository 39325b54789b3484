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

#include "domainsiam/loss.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "domainsiam/error.hpp"

namespace domainsiam {

namespace {

void check_sample(const WeightedResidual& s) {
  if (!std::isfinite(s.x)) throw DomainError("residual must be finite");
  if (!(s.y >= 0.0 && s.y <= 1.0)) throw DomainError("sample target y must lie in [0, 1]");
}

double weight(const WeightedResidual& s, const LossParams& p) { return std::exp(p.a * s.y); }

}  // namespace

void LossParams::validate() const {
  if (std::isnan(alpha) || alpha == std::numeric_limits<double>::infinity()) {
    throw DomainError("alpha must be finite or -infinity");
  }
  if (!(a >= 0.0 && a <= 1.0)) throw DomainError("weighting exponent a must lie in [0, 1]");
  if (!(branch_eps > 0.0 && branch_eps < 0.5)) {
    throw DomainError("branch_eps must lie in (0, 0.5)");
  }
  if (!(welsch_threshold < 0.0)) throw DomainError("welsch_threshold must be negative");
}

LossBranch select_branch(const LossParams& p) {
  p.validate();
  if (p.alpha <= p.welsch_threshold) return LossBranch::welsch;
  if (std::abs(p.alpha - 2.0) <= p.branch_eps) return LossBranch::l2;
  if (std::abs(p.alpha) <= p.branch_eps) return LossBranch::log;
  return LossBranch::general;
}

double eval_loss(const WeightedResidual& s, const LossParams& p) {
  check_sample(s);
  const double x2 = s.x * s.x;
  // The weight multiplies the unweighted loss as the very last step, so the
  // result is exactly e^{ay} times the a = 0 value.
  const double w = weight(s, p);
  switch (select_branch(p)) {
    case LossBranch::l2:
      return w * (0.5 * x2);
    case LossBranch::log:
      return w * std::log1p(0.5 * x2);
    case LossBranch::welsch:
      return w * (-std::expm1(-0.5 * x2));
    case LossBranch::general:
      break;
  }
  // (1+z)^{alpha/2} - 1 through expm1/log1p keeps precision near both the
  // x -> 0 and alpha -> 0 limits.
  const double b = std::abs(p.alpha - 2.0);
  const double inner = std::expm1(0.5 * p.alpha * std::log1p(x2 / b));
  return w * ((b / p.alpha) * inner);
}

double grad_x(const WeightedResidual& s, const LossParams& p) {
  check_sample(s);
  const double x2 = s.x * s.x;
  const double w = weight(s, p);
  switch (select_branch(p)) {
    case LossBranch::l2:
      return w * s.x;
    case LossBranch::log:
      return w * s.x / (0.5 * x2 + 1.0);
    case LossBranch::welsch:
      return w * s.x * std::exp(-0.5 * x2);
    case LossBranch::general:
      break;
  }
  const double b = std::abs(p.alpha - 2.0);
  return w * s.x * std::exp((0.5 * p.alpha - 1.0) * std::log1p(x2 / b));
}

double grad_alpha(const WeightedResidual& s, const LossParams& p) {
  check_sample(s);
  if (select_branch(p) != LossBranch::general) {
    throw UnsupportedBranch("grad_alpha is only defined on the general branch");
  }
  if (s.x == 0.0) return 0.0;
  const double w = weight(s, p);
  const double alpha = p.alpha;
  const double b = std::abs(alpha - 2.0);
  const double sgn = alpha > 2.0 ? 1.0 : -1.0;  // d|alpha-2| / dalpha
  const double u = std::log1p(s.x * s.x / b);
  const double t = 0.5 * alpha * u;

  // With u = log(1 + x^2/b), t = alpha u / 2 and r(v) = (v - 1 + e^{-v}) / v^2,
  // differentiating b/alpha * (e^t - 1) collapses to
  //   dL/dalpha = w * sgn * u^2/2 * e^t * (r(u) - r(t)).
  // The naive sum of the three product-rule terms cancels down from O(u) to
  // O(u^3) and loses every digit for small residuals.
  if (std::max(std::abs(u), std::abs(t)) <= 1.0) {
    // r(u) - r(t) = (u - t) * sum_n (-1)^n S_n / (n+2)!,  S_n = sum_k u^k t^{n-1-k},
    // and sgn * (u - t) = -b u / 2.
    constexpr int kTerms = 24;
    std::array<double, kTerms> up{}, tp{};
    up[0] = tp[0] = 1.0;
    for (int i = 1; i < kTerms; ++i) {
      up[i] = up[i - 1] * u;
      tp[i] = tp[i - 1] * t;
    }
    double series = 0.0;
    double inv_fact = 1.0;  // 1 / (n+2)!
    for (int n = 1; n < kTerms; ++n) {
      inv_fact /= (n == 1 ? 6.0 : static_cast<double>(n + 2));
      double sn = 0.0;
      for (int k = 0; k < n; ++k) sn += up[k] * tp[n - 1 - k];
      series += (n % 2 == 1 ? sn : -sn) * inv_fact;
    }
    return w * (0.25 * b * u * u * u * std::exp(t) * series);
  }
  const auto r = [](double v) {
    if (std::abs(v) < 1.0) {
      double sum = 0.0, term = 0.5;  // (-v)^n / (n+2)!
      for (int n = 0; n < 24; ++n) {
        sum += term;
        term *= -v / static_cast<double>(n + 3);
      }
      return sum;
    }
    return (v - 1.0 + std::exp(-v)) / (v * v);
  };
  // e^t r(t) = (t e^t - e^t + 1) / t^2, written so large negative t stays finite.
  const double et = std::exp(t);
  const double et_rt = (t * et - std::expm1(t)) / (t * t);
  return w * (sgn * 0.5 * u * u * (et * r(u) - et_rt));
}

double batch_loss(std::span<const WeightedResidual> samples, const LossParams& p,
                  Reduction reduction) {
  if (samples.empty()) throw EmptyBatch();
  double total = 0.0;
  for (const auto& s : samples) total += eval_loss(s, p);
  if (reduction == Reduction::mean) total /= static_cast<double>(samples.size());
  return total;
}

double baseline_loss(const WeightedResidual& s, BaselineKind kind) {
  if (!std::isfinite(s.x)) throw DomainError("residual must be finite");
  return kind == BaselineKind::l2 ? 0.5 * s.x * s.x : std::abs(s.x);
}

double baseline_grad(const WeightedResidual& s, BaselineKind kind) {
  if (!std::isfinite(s.x)) throw DomainError("residual must be finite");
  if (kind == BaselineKind::l2) return s.x;
  return s.x > 0.0 ? 1.0 : (s.x < 0.0 ? -1.0 : 0.0);
}

}  // namespace domainsiam
