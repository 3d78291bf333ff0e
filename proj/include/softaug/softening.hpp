// Copyright (c) 2026, The softaug Authors. All rights reserved.
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

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <string_view>
#include <vector>

#include "softaug/errors.hpp"

namespace softaug {

enum class SofteningMode { none, target, weight, target_and_weight };

inline std::string_view to_string(SofteningMode m) {
  switch (m) {
    case SofteningMode::none: return "none";
    case SofteningMode::target: return "target";
    case SofteningMode::weight: return "weight";
    case SofteningMode::target_and_weight: return "target_and_weight";
  }
  return "?";
}

/// Power-family softening curve p = 1 - (1 - p_min)(1 - v)^k.
struct SofteningPolicy {
  double k = 2.0;
  double p_min = 0.0;
  SofteningMode mode = SofteningMode::target_and_weight;

  static SofteningPolicy for_classes(int num_classes, double k = 2.0,
                                     SofteningMode mode = SofteningMode::target_and_weight) {
    if (num_classes < 2) throw DomainError("SofteningPolicy: need at least two classes");
    return {k, 1.0 / num_classes, mode};
  }

  void validate() const {
    if (!(k >= 0.0)) throw DomainError("SofteningPolicy: k must be >= 0");
    if (!(p_min >= 0.0 && p_min < 1.0)) throw DomainError("SofteningPolicy: p_min outside [0, 1)");
  }
};

namespace detail {

// 1 - (1 - p_min) x^k, arranged so that x = 1 gives p_min exactly.
inline double power_curve(double x, const SofteningPolicy& policy) {
  return std::min(1.0, policy.p_min + (1.0 - policy.p_min) * (1.0 - std::pow(x, policy.k)));
}

}  // namespace detail

// std::pow(0, 0) is 1, so k = 0 yields p_min at v = 1 too; the v = 1
// endpoint is pinned to a hard target for every k.
inline double soften(double v, const SofteningPolicy& policy) {
  if (!(v >= 0.0 && v <= 1.0)) throw DomainError("soften: visibility outside [0, 1]");
  if (v == 1.0) return 1.0;
  return detail::power_curve(1.0 - v, policy);
}

inline double label_smoothing_confidence(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError("label smoothing: alpha outside [0, 1)");
  return 1.0 - alpha;
}

/// Softening for transforms whose magnitude is not a crop, e.g. additive
/// noise: the caller supplies the magnitude -> visibility correspondence.
using VisibilityMapping = std::function<double(double magnitude)>;

inline double soften_magnitude(double magnitude, const VisibilityMapping& to_visibility,
                               const SofteningPolicy& policy) {
  return soften(to_visibility(magnitude), policy);
}

enum class PairHypothesis { SA1, SA2 };

/// SA1 down-weights low-IoU pairs, SA2 down-weights high-IoU pairs.
inline double ssl_pair_confidence(double iou_value, const SofteningPolicy& policy,
                                  PairHypothesis hypothesis) {
  if (!(iou_value >= 0.0 && iou_value <= 1.0)) throw DomainError("ssl_pair_confidence: IoU outside [0, 1]");
  const double base = hypothesis == PairHypothesis::SA1 ? 1.0 - iou_value : iou_value;
  if (base == 0.0) return 1.0;
  return detail::power_curve(base, policy);
}

/// Rescales weights so their mean is 1. Individual zero weights are allowed
/// (SA1 with p_min = 0 assigns them to disjoint pairs); an all-zero batch is not.
inline std::vector<double> normalize_batch_weights(std::span<const double> weights) {
  if (weights.empty()) throw DomainError("normalize_batch_weights: empty batch");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw DomainError("normalize_batch_weights: weights must be finite and >= 0");
    }
    sum += w;
  }
  if (!(sum > 0.0)) throw DomainError("normalize_batch_weights: weights sum to zero");
  const double mean = sum / static_cast<double>(weights.size());
  std::vector<double> out(weights.begin(), weights.end());
  for (double& w : out) w /= mean;
  return out;
}

}  // namespace softaug
