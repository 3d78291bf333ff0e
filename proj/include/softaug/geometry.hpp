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
#include <cstdlib>
#include <random>
#include <string>

#include "softaug/errors.hpp"
#include "softaug/image.hpp"
#include "softaug/random.hpp"

namespace softaug {

/// Same-size translated crop with zero padding.
///
/// Output pixel (c, i, j) is input (c, i + tx, j + ty) when that lies inside
/// the image and 0 otherwise, i.e. the image is placed in the centre of a
/// zero canvas three times its size and a window is read at offset
/// [dim + t, 2 dim + t). tx shifts the row axis and ty the column axis.
inline ImageBuffer pad_and_crop(const ImageBuffer& image, int tx, int ty) {
  const int rows = image.height();
  const int cols = image.width();
  if (std::abs(tx) > rows || std::abs(ty) > cols) {
    throw PreconditionError("pad_and_crop: offset (" + std::to_string(tx) + ", " +
                            std::to_string(ty) + ") exceeds image " + std::to_string(rows) +
                            "x" + std::to_string(cols));
  }
  ImageBuffer out(image.channels(), rows, cols, 0.0);
  // Only the overlapping band of rows/cols needs copying.
  const int i_begin = std::max(0, -tx);
  const int i_end = std::min(rows, rows - tx);
  const int j_begin = std::max(0, -ty);
  const int j_end = std::min(cols, cols - ty);
  for (int c = 0; c < image.channels(); ++c) {
    for (int i = i_begin; i < i_end; ++i) {
      for (int j = j_begin; j < j_end; ++j) out.at(c, i, j) = image.at(c, i + tx, j + ty);
    }
  }
  return out;
}

inline ImageBuffer pad_and_crop(const ImageBuffer& image, const CropWindow& window) {
  if (window.w != image.width() || window.h != image.height()) {
    throw PreconditionError("pad_and_crop: window size must equal image size");
  }
  return pad_and_crop(image, window.tx, window.ty);
}

/// Fraction of the image retained by a same-size translated crop.
/// extent_x is the image extent along tx, extent_y along ty.
inline double visibility(int tx, int ty, int extent_x, int extent_y) {
  if (extent_x <= 0 || extent_y <= 0) throw PreconditionError("visibility: non-positive extent");
  if (std::abs(tx) > extent_x || std::abs(ty) > extent_y) {
    throw PreconditionError("visibility: offset exceeds image extent");
  }
  return static_cast<double>(extent_x - std::abs(tx)) * static_cast<double>(extent_y - std::abs(ty)) /
         (static_cast<double>(extent_x) * static_cast<double>(extent_y));
}

inline long long intersection_area(const CropWindow& a, const CropWindow& b) {
  const long long x0 = std::max(a.tx, b.tx);
  const long long y0 = std::max(a.ty, b.ty);
  const long long x1 = std::min<long long>(static_cast<long long>(a.tx) + a.w,
                                           static_cast<long long>(b.tx) + b.w);
  const long long y1 = std::min<long long>(static_cast<long long>(a.ty) + a.h,
                                           static_cast<long long>(b.ty) + b.h);
  if (x1 <= x0 || y1 <= y0) return 0;
  return (x1 - x0) * (y1 - y0);
}

inline double iou(const CropWindow& a, const CropWindow& b) {
  if (a.w <= 0 || a.h <= 0 || b.w <= 0 || b.h <= 0) {
    throw PreconditionError("iou: windows must have positive area");
  }
  const long long inter = intersection_area(a, b);
  const long long uni = a.area() + b.area() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

/// |window ∩ image| / |image| for a window in the image's corner frame.
inline double crop_visibility(const CropWindow& window, int width, int height) {
  const CropWindow full{0, 0, width, height};
  return static_cast<double>(intersection_area(window, full)) / static_cast<double>(full.area());
}

inline int occlusion_side(double lambda, int height, int width) {
  const int side = static_cast<int>(std::lround(std::sqrt(lambda * height * width)));
  return std::min(side, std::min(height, width));
}

/// Covers lambda of the image area with one square patch placed uniformly at
/// random fully inside the image. The rng is not consumed when lambda rounds
/// to an empty patch.
inline ImageBuffer occlude(const ImageBuffer& image, double lambda, RandomSource& rng,
                           double fill = 0.0) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw PreconditionError("occlude: lambda outside [0, 1]");
  ImageBuffer out = image;
  const int side = occlusion_side(lambda, image.height(), image.width());
  if (side == 0) return out;
  const int top = std::uniform_int_distribution<int>(0, image.height() - side)(rng);
  const int left = std::uniform_int_distribution<int>(0, image.width() - side)(rng);
  for (int c = 0; c < image.channels(); ++c) {
    for (int i = top; i < top + side; ++i) {
      for (int j = left; j < left + side; ++j) out.at(c, i, j) = fill;
    }
  }
  return out;
}

/// Bilinear crop-and-resize of a corner-frame window (tx along columns, ty
/// along rows). Samples outside the image read as 0.
inline ImageBuffer crop_and_resize(const ImageBuffer& image, const CropWindow& window, int out_h,
                                   int out_w) {
  if (window.w <= 0 || window.h <= 0) throw PreconditionError("crop_and_resize: empty window");
  ImageBuffer out(image.channels(), out_h, out_w, 0.0);
  const double sy = static_cast<double>(window.h) / out_h;
  const double sx = static_cast<double>(window.w) / out_w;
  auto sample = [&](int c, int r, int q) {
    if (r < 0 || r >= image.height() || q < 0 || q >= image.width()) return 0.0;
    return image.at(c, r, q);
  };
  for (int i = 0; i < out_h; ++i) {
    const double y = window.ty + (i + 0.5) * sy - 0.5;
    const int y0 = static_cast<int>(std::floor(y));
    const double fy = y - y0;
    for (int j = 0; j < out_w; ++j) {
      const double x = window.tx + (j + 0.5) * sx - 0.5;
      const int x0 = static_cast<int>(std::floor(x));
      const double fx = x - x0;
      for (int c = 0; c < image.channels(); ++c) {
        const double top = (1 - fx) * sample(c, y0, x0) + fx * sample(c, y0, x0 + 1);
        const double bottom = (1 - fx) * sample(c, y0 + 1, x0) + fx * sample(c, y0 + 1, x0 + 1);
        out.at(c, i, j) = (1 - fy) * top + fy * bottom;
      }
    }
  }
  return out;
}

}  // namespace softaug
