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

// Weighted robust loss family.
//
//   L(x, alpha) = e^{a y} * |alpha-2|/alpha * ((x^2/|alpha-2| + 1)^{alpha/2} - 1)
//
// with the removable singularities replaced by their limits:
//   alpha = 2     ->  e^{a y} * x^2 / 2
//   alpha = 0     ->  e^{a y} * log(x^2/2 + 1)
//   alpha = -inf  ->  e^{a y} * (1 - exp(-x^2/2))
//
// x is a regression residual and y in [0,1] the soft-label value of that
// sample; e^{a y} up-weights samples near the target peak.

#include <limits>
#include <span>

namespace domainsiam {

struct LossParams {
  /// Robustness. -infinity (or anything <= welsch_threshold) selects Welsch.
  double alpha = 1.0;
  /// Hard-sample weighting exponent, in [0, 1].
  double a = 1.0;
  /// Half-width of the window around alpha = 0 and alpha = 2 where the
  /// limiting form replaces the (singular) general form. In (0, 0.5).
  double branch_eps = 1e-3;
  /// Negative; alpha at or below it uses the Welsch branch.
  double welsch_threshold = -1e6;

  static constexpr double kNegInfAlpha = -std::numeric_limits<double>::infinity();

  // Throws DomainError when an invariant does not hold.
  void validate() const;
};

struct WeightedResidual {
  double x = 0.0;
  double y = 0.0;
};

enum class LossBranch { l2, log, welsch, general };

enum class Reduction { sum, mean };

enum class BaselineKind { l1, l2 };

LossBranch select_branch(const LossParams& p);

double eval_loss(const WeightedResidual& s, const LossParams& p);

/// dL/dx. Shares the sign of x and vanishes at x = 0.
double grad_x(const WeightedResidual& s, const LossParams& p);

/// dL/dalpha on the general branch; throws UnsupportedBranch elsewhere.
double grad_alpha(const WeightedResidual& s, const LossParams& p);

/// Throws EmptyBatch for an empty span.
double batch_loss(std::span<const WeightedResidual> samples, const LossParams& p,
                  Reduction reduction);

/// Unweighted x^2/2 or |x|, used as benchmark baselines.
double baseline_loss(const WeightedResidual& s, BaselineKind kind);
double baseline_grad(const WeightedResidual& s, BaselineKind kind);

}  // namespace domainsiam
