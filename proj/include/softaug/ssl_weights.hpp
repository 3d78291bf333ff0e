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

#include <span>
#include <vector>

#include "softaug/errors.hpp"
#include "softaug/geometry.hpp"
#include "softaug/image.hpp"
#include "softaug/softening.hpp"

namespace softaug {

/// Two crops of one width x height image, both in the image's corner frame.
struct CropPair {
  CropWindow first;
  CropWindow second;
  int width = 0;
  int height = 0;

  void validate() const {
    const CropWindow image{0, 0, width, height};
    if (width <= 0 || height <= 0) throw DomainError("CropPair: image must have positive size");
    if (intersection_area(first, image) == 0 || intersection_area(second, image) == 0) {
      throw DomainError("CropPair: both crops must intersect the image");
    }
  }
};

/// Per-pair loss weights for two-view self-supervised training: the IoU of
/// each pair goes through the SA1 or SA2 curve, optionally rescaled so the
/// batch mean is 1. Multiply each pair's similarity loss by its weight.
inline std::vector<double> pair_weights(std::span<const CropPair> pairs, const SofteningPolicy& policy,
                                        PairHypothesis hypothesis, bool normalize) {
  if (pairs.empty()) throw DomainError("pair_weights: empty batch");
  policy.validate();
  std::vector<double> w;
  w.reserve(pairs.size());
  for (const auto& pr : pairs) {
    pr.validate();
    w.push_back(ssl_pair_confidence(iou(pr.first, pr.second), policy, hypothesis));
  }
  if (normalize) return normalize_batch_weights(w);
  return w;
}

}  // namespace softaug
