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
#include <span>
#include <string>
#include <vector>

#include "softaug/errors.hpp"
#include "softaug/softening.hpp"

namespace softaug {

enum class LossMode { hard, target, weight, target_and_weight };

inline LossMode loss_mode_for(SofteningMode m) {
  switch (m) {
    case SofteningMode::none: return LossMode::hard;
    case SofteningMode::target: return LossMode::target;
    case SofteningMode::weight: return LossMode::weight;
    case SofteningMode::target_and_weight: return LossMode::target_and_weight;
  }
  return LossMode::hard;
}

inline bool softens_target(LossMode m) {
  return m == LossMode::target || m == LossMode::target_and_weight;
}
inline bool softens_weight(LossMode m) {
  return m == LossMode::weight || m == LossMode::target_and_weight;
}

// Slack for confidences computed as 1 - (1 - 1/N) that land an ulp below 1/N.
inline constexpr double kChanceSlack = 1e-12;

struct SoftTarget {
  std::vector<double> probs;
  int true_class = 0;
};

/// p on the true class, (1 - p) / (N - 1) everywhere else.
inline SoftTarget make_soft_target(int true_class, double p, int num_classes) {
  if (num_classes < 2) throw DomainError("make_soft_target: need N >= 2");
  if (true_class < 0 || true_class >= num_classes) {
    throw DomainError("make_soft_target: class " + std::to_string(true_class) + " out of range");
  }
  const double chance = 1.0 / num_classes;
  if (!(p <= 1.0) || p < chance - kChanceSlack) {
    throw DomainError("make_soft_target: confidence " + std::to_string(p) +
                      " outside [1/N, 1]");
  }
  const double q = (1.0 - p) / (num_classes - 1);
  SoftTarget t{std::vector<double>(static_cast<std::size_t>(num_classes), q), true_class};
  t.probs[static_cast<std::size_t>(true_class)] = p;
  return t;
}

inline std::vector<double> log_softmax(std::span<const double> logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - mx);
  const double lse = mx + std::log(sum);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

inline std::vector<double> softmax(std::span<const double> logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

/// Target distribution and sample weight used by each loss mode.
struct LossTerms {
  std::vector<double> target;
  double weight = 1.0;
};

inline LossTerms loss_terms(int true_class, double p, int num_classes, LossMode mode) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("soft_loss: confidence outside [0, 1]");
  LossTerms terms;
  terms.target = softens_target(mode) ? make_soft_target(true_class, p, num_classes).probs
                                      : make_soft_target(true_class, 1.0, num_classes).probs;
  terms.weight = softens_weight(mode) ? p : 1.0;
  return terms;
}

/// w * KL(target || softmax(logits)), with 0 log 0 = 0.
inline double soft_loss(std::span<const double> logits, int true_class, double p, LossMode mode) {
  const int n = static_cast<int>(logits.size());
  const LossTerms terms = loss_terms(true_class, p, n, mode);
  const std::vector<double> logp = log_softmax(logits);
  double kl = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = terms.target[static_cast<std::size_t>(i)];
    if (t > 0.0) kl += t * (std::log(t) - logp[static_cast<std::size_t>(i)]);
  }
  return terms.weight * kl;
}

/// d soft_loss / d logits = w * (softmax(logits) - target).
inline std::vector<double> soft_loss_grad(std::span<const double> logits, int true_class, double p,
                                          LossMode mode) {
  const int n = static_cast<int>(logits.size());
  const LossTerms terms = loss_terms(true_class, p, n, mode);
  std::vector<double> g = softmax(logits);
  for (int i = 0; i < n; ++i) {
    g[static_cast<std::size_t>(i)] =
        terms.weight * (g[static_cast<std::size_t>(i)] - terms.target[static_cast<std::size_t>(i)]);
  }
  return g;
}

struct LossSample {
  std::vector<double> logits;
  int true_class = 0;
  double confidence = 1.0;
};

/// Unweighted mean of per-sample losses, summed in input order.
inline double batch_loss(std::span<const LossSample> samples, LossMode mode) {
  if (samples.empty()) throw DomainError("batch_loss: empty batch");
  double sum = 0.0;
  for (const auto& s : samples) sum += soft_loss(s.logits, s.true_class, s.confidence, mode);
  return sum / static_cast<double>(samples.size());
}

}  // namespace softaug
