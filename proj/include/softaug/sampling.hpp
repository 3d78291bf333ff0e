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
#include <random>

#include "softaug/errors.hpp"
#include "softaug/image.hpp"
#include "softaug/random.hpp"

namespace softaug {

/// Translated-crop offsets drawn from N(0, sigma * L), Cifar style.
struct GaussianCropConfig {
  double sigma = 0.3;
  int L = 32;
  int max_rejections = 100;

  void validate() const {
    if (!(sigma > 0.0)) throw PreconditionError("GaussianCropConfig: sigma must be > 0");
    if (L <= 0) throw PreconditionError("GaussianCropConfig: L must be positive");
    if (max_rejections < 1) throw PreconditionError("GaussianCropConfig: max_rejections must be >= 1");
  }
};

/// Two-parameter crop-and-resize sampler, ImageNet style.
struct ResizeCropConfig {
  double sigma = 0.3;
  int input_w = 224;
  int input_h = 224;
  int l_min = 112;

  void validate() const {
    if (!(sigma > 0.0)) throw PreconditionError("ResizeCropConfig: sigma must be > 0");
    if (input_w <= 0 || input_h <= 0) throw PreconditionError("ResizeCropConfig: bad input size");
    if (l_min <= 0 || l_min > std::min(input_w, input_h)) {
      throw PreconditionError("ResizeCropConfig: l_min must lie in [1, min(W, H)]");
    }
  }
};

/// Integer from a clipped Gaussian: first draw with |x| <= limit, truncated
/// toward zero, or 0 once max_rejections draws have all been rejected.
inline int draw_offset(double limit, double sigma_abs, RandomSource& rng, int max_rejections = 100) {
  if (!(limit > 0.0) || !(sigma_abs > 0.0)) {
    throw PreconditionError("draw_offset: limit and sigma must be positive");
  }
  std::normal_distribution<double> normal(0.0, sigma_abs);
  for (int d = 0; d < max_rejections; ++d) {
    const double x = normal(rng);
    if (std::abs(x) <= limit) return static_cast<int>(x);
  }
  return 0;
}

inline int draw_uniform_offset(int range_r, RandomSource& rng) {
  if (range_r < 0) throw PreconditionError("draw_uniform_offset: range must be >= 0");
  if (range_r == 0) return 0;
  return std::uniform_int_distribution<int>(-range_r, range_r)(rng);
}

struct Offset {
  int tx = 0;
  int ty = 0;
};

/// (tx, ty) for a same-size crop of a height x width image; tx pairs with
/// the row axis as in pad_and_crop.
inline Offset draw_gaussian_crop(const GaussianCropConfig& cfg, int height, int width,
                                 RandomSource& rng) {
  cfg.validate();
  const int tx = draw_offset(height, cfg.sigma * height, rng, cfg.max_rejections);
  const int ty = draw_offset(width, cfg.sigma * width, rng, cfg.max_rejections);
  return {tx, ty};
}

inline Offset draw_uniform_crop(int range_r, RandomSource& rng) {
  const int tx = draw_uniform_offset(range_r, rng);
  const int ty = draw_uniform_offset(range_r, rng);
  return {tx, ty};
}

namespace detail {

// |N(0, sd)| clipped to cap.
inline double folded_clipped_normal(double sd, double cap, RandomSource& rng) {
  const double x = std::abs(std::normal_distribution<double>(0.0, sd)(rng));
  return std::min(x, cap);
}

}  // namespace detail

/// Crop size shrinks by a folded normal N^R(0, sigma (L - L_min)), clipped so
/// that L_min <= w <= W. The crop centre is then offset from the image centre
/// by draws from N(0, sigma (W + w)) clipped to |t| <= (W + w) / 2. Returned
/// in the corner frame: tx = (W - w) / 2 + centre offset.
inline CropWindow draw_resize_crop(const ResizeCropConfig& cfg, RandomSource& rng) {
  cfg.validate();
  const int big_w = cfg.input_w;
  const int big_h = cfg.input_h;
  const double longer = std::max(big_w, big_h);
  const double sd = cfg.sigma * (longer - cfg.l_min);

  int dw = 0;
  int dh = 0;
  if (sd > 0.0) {
    dw = static_cast<int>(detail::folded_clipped_normal(sd, big_w - cfg.l_min, rng));
    dh = static_cast<int>(detail::folded_clipped_normal(sd, big_h - cfg.l_min, rng));
  }
  const int w = big_w - dw;
  const int h = big_h - dh;

  const double limit_x = 0.5 * (big_w + w);
  const double limit_y = 0.5 * (big_h + h);
  const int cx = draw_offset(limit_x, cfg.sigma * (big_w + w), rng);
  const int cy = draw_offset(limit_y, cfg.sigma * (big_h + h), rng);
  return {(big_w - w) / 2 + cx, (big_h - h) / 2 + cy, w, h};
}

struct StandardResizeCropConfig {
  double scale_min = 0.08;
  double scale_max = 1.0;
  double ratio_min = 3.0 / 4.0;
  double ratio_max = 4.0 / 3.0;
  int attempts = 10;

  void validate() const {
    if (!(scale_min > 0.0 && scale_min <= scale_max && scale_max <= 1.0)) {
      throw PreconditionError("StandardResizeCropConfig: need 0 < scale_min <= scale_max <= 1");
    }
    if (!(ratio_min > 0.0 && ratio_min <= ratio_max)) {
      throw PreconditionError("StandardResizeCropConfig: need 0 < ratio_min <= ratio_max");
    }
  }
};

/// The conventional random-resized-crop recipe: uniform scale, log-uniform
/// aspect ratio, uniform position; center-crop fallback after the retries.
inline CropWindow draw_standard_resize_crop(const StandardResizeCropConfig& cfg, int width,
                                            int height, RandomSource& rng) {
  cfg.validate();
  const double area = static_cast<double>(width) * height;
  const double log_lo = std::log(cfg.ratio_min);
  const double log_hi = std::log(cfg.ratio_max);
  for (int attempt = 0; attempt < cfg.attempts; ++attempt) {
    const double target =
        area * (cfg.scale_min == cfg.scale_max
                    ? cfg.scale_min
                    : std::uniform_real_distribution<double>(cfg.scale_min, cfg.scale_max)(rng));
    const double aspect =
        std::exp(log_lo == log_hi ? log_lo
                                  : std::uniform_real_distribution<double>(log_lo, log_hi)(rng));
    const int w = static_cast<int>(std::lround(std::sqrt(target * aspect)));
    const int h = static_cast<int>(std::lround(std::sqrt(target / aspect)));
    if (w > 0 && h > 0 && w <= width && h <= height) {
      const int tx = std::uniform_int_distribution<int>(0, width - w)(rng);
      const int ty = std::uniform_int_distribution<int>(0, height - h)(rng);
      return {tx, ty, w, h};
    }
  }
  const double in_ratio = static_cast<double>(width) / height;
  int w = width;
  int h = height;
  if (in_ratio < cfg.ratio_min) {
    h = static_cast<int>(std::lround(w / cfg.ratio_min));
  } else if (in_ratio > cfg.ratio_max) {
    w = static_cast<int>(std::lround(h * cfg.ratio_max));
  }
  return {(width - w) / 2, (height - h) / 2, w, h};
}

}  // namespace softaug
