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

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "softaug/errors.hpp"

namespace softaug {

/// Dense C x H x W image, channel-major and row-major within a channel.
class ImageBuffer {
 public:
  ImageBuffer() = default;

  ImageBuffer(int channels, int height, int width, double fill = 0.0)
      : channels_(channels), height_(height), width_(width) {
    check_dims();
    pixels_.assign(size(), fill);
  }

  ImageBuffer(int channels, int height, int width, std::vector<double> pixels)
      : channels_(channels), height_(height), width_(width), pixels_(std::move(pixels)) {
    check_dims();
    if (pixels_.size() != size()) {
      throw PreconditionError("ImageBuffer: pixel count " + std::to_string(pixels_.size()) +
                              " does not match " + std::to_string(size()));
    }
    for (double v : pixels_) {
      if (!std::isfinite(v)) throw PreconditionError("ImageBuffer: non-finite pixel");
    }
  }

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const {
    return static_cast<std::size_t>(channels_) * static_cast<std::size_t>(height_) *
           static_cast<std::size_t>(width_);
  }
  std::size_t plane_size() const {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }

  double& at(int c, int i, int j) { return pixels_[index(c, i, j)]; }
  double at(int c, int i, int j) const { return pixels_[index(c, i, j)]; }

  std::span<double> pixels() { return pixels_; }
  std::span<const double> pixels() const { return pixels_; }

  bool same_shape(const ImageBuffer& o) const {
    return channels_ == o.channels_ && height_ == o.height_ && width_ == o.width_;
  }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  std::size_t index(int c, int i, int j) const {
    return (static_cast<std::size_t>(c) * static_cast<std::size_t>(height_) +
            static_cast<std::size_t>(i)) *
               static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(j);
  }

  void check_dims() const {
    if (channels_ <= 0 || height_ <= 0 || width_ <= 0) {
      throw PreconditionError("ImageBuffer: dimensions must be positive");
    }
  }

  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<double> pixels_;
};

/// Axis-aligned crop window. (tx, ty) is the top-left corner relative to the
/// image's top-left corner; tx runs along the extent w and ty along h.
struct CropWindow {
  int tx = 0;
  int ty = 0;
  int w = 1;
  int h = 1;

  long long area() const { return static_cast<long long>(w) * h; }

  friend bool operator==(const CropWindow&, const CropWindow&) = default;
};

}  // namespace softaug
