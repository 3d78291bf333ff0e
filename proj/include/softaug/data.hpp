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
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "softaug/errors.hpp"
#include "softaug/image.hpp"
#include "softaug/model.hpp"
#include "softaug/random.hpp"

namespace softaug {

enum class Split { train, test };

struct LabeledDataset {
  std::vector<ImageBuffer> images;
  std::vector<int> labels;
  int num_classes = 0;
  Split split = Split::train;

  std::size_t size() const { return images.size(); }
  bool empty() const { return images.empty(); }

  void validate() const {
    if (images.size() != labels.size()) throw DomainError("dataset: image/label count mismatch");
    for (int y : labels) {
      if (y < 0 || y >= num_classes) throw DomainError("dataset: label out of range");
    }
  }

  friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;
};

// ---------------------------------------------------------------------------
// Cifar binary layout: one record per image, label byte(s) followed by
// 3 x 1024 pixel bytes (R plane, G plane, B plane, each row-major 32 x 32).

inline constexpr int kCifarSide = 32;
inline constexpr std::size_t kCifarPixels = 3 * kCifarSide * kCifarSide;

namespace detail {

inline LabeledDataset parse_cifar(std::span<const std::uint8_t> bytes, std::size_t label_bytes,
                                  int num_classes, const char* name) {
  const std::size_t record = label_bytes + kCifarPixels;
  LabeledDataset ds;
  ds.num_classes = num_classes;
  const std::size_t full = bytes.size() / record;
  if (bytes.size() % record != 0) {
    throw ParseError(std::string(name) + ": truncated record at byte offset " +
                         std::to_string(full * record),
                     full * record);
  }
  ds.images.reserve(full);
  ds.labels.reserve(full);
  for (std::size_t r = 0; r < full; ++r) {
    const std::size_t off = r * record;
    const int label = bytes[off + label_bytes - 1];
    if (label >= num_classes) {
      throw ParseError(std::string(name) + ": record " + std::to_string(r) + " has label " +
                           std::to_string(label) + " >= " + std::to_string(num_classes),
                       off);
    }
    std::vector<double> px(kCifarPixels);
    for (std::size_t i = 0; i < kCifarPixels; ++i) px[i] = bytes[off + label_bytes + i] / 255.0;
    ds.images.emplace_back(3, kCifarSide, kCifarSide, std::move(px));
    ds.labels.push_back(label);
  }
  return ds;
}

inline std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace detail

inline LabeledDataset parse_cifar10(std::span<const std::uint8_t> bytes) {
  return detail::parse_cifar(bytes, 1, 10, "cifar10");
}

/// Keeps the fine label; the coarse byte is discarded.
inline LabeledDataset parse_cifar100(std::span<const std::uint8_t> bytes) {
  return detail::parse_cifar(bytes, 2, 100, "cifar100");
}

/// Inverse of parse_cifar10/100 for 3x32x32 datasets with [0, 1] pixels.
/// coarse_labels is only used for Cifar-100 and defaults to 0.
inline std::vector<std::uint8_t> serialize_cifar(const LabeledDataset& ds, bool cifar100,
                                                 std::span<const int> coarse_labels = {}) {
  std::vector<std::uint8_t> out;
  out.reserve(ds.size() * (kCifarPixels + (cifar100 ? 2 : 1)));
  for (std::size_t r = 0; r < ds.size(); ++r) {
    const auto& img = ds.images[r];
    if (img.channels() != 3 || img.height() != kCifarSide || img.width() != kCifarSide) {
      throw DomainError("serialize_cifar: images must be 3x32x32");
    }
    if (cifar100) out.push_back(static_cast<std::uint8_t>(r < coarse_labels.size() ? coarse_labels[r] : 0));
    out.push_back(static_cast<std::uint8_t>(ds.labels[r]));
    for (double v : img.pixels()) out.push_back(detail::to_byte(v));
  }
  return out;
}

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

// ---------------------------------------------------------------------------
// Synthetic shapes.

namespace detail {

struct Rgb {
  double r, g, b;
};

inline constexpr std::array<Rgb, 8> kPalette = {{
    {0.85, 0.25, 0.20},
    {0.20, 0.70, 0.30},
    {0.25, 0.35, 0.85},
    {0.90, 0.80, 0.20},
    {0.75, 0.30, 0.80},
    {0.20, 0.75, 0.80},
    {0.95, 0.55, 0.15},
    {0.60, 0.60, 0.60},
}};

enum class Shape { square, disc, triangle, cross };

// Inside test in unit coordinates centred on the shape, u, v in [-1, 1].
inline bool inside(Shape s, double u, double v) {
  switch (s) {
    case Shape::square: return std::abs(u) <= 0.8 && std::abs(v) <= 0.8;
    case Shape::disc: return u * u + v * v <= 1.0;
    case Shape::triangle: return v >= -0.9 && v <= 0.9 && std::abs(u) <= (v + 0.9) / 1.8;
    case Shape::cross: return (std::abs(u) <= 0.3 && std::abs(v) <= 1.0) ||
                              (std::abs(v) <= 0.3 && std::abs(u) <= 1.0);
  }
  return false;
}

}  // namespace detail

/// Procedurally rendered filled shapes on a dark background, 3x32x32.
/// Class c draws shape (c mod 4) in palette colour c. Position and size are
/// jittered and Gaussian pixel noise is added. Samples are interleaved by
/// class.
inline LabeledDataset synth_shapes(int num_per_class, int num_classes, std::uint64_t seed,
                                   Split split = Split::train, double noise = 0.05) {
  if (num_per_class < 1) throw DomainError("synth_shapes: num_per_class must be >= 1");
  if (num_classes < 2 || num_classes > 8) throw DomainError("synth_shapes: num_classes must be in [2, 8]");
  LabeledDataset ds;
  ds.num_classes = num_classes;
  ds.split = split;
  const RandomSource root(seed);
  std::size_t index = 0;
  for (int i = 0; i < num_per_class; ++i) {
    for (int c = 0; c < num_classes; ++c, ++index) {
      RandomSource rng = root.split(index);
      std::uniform_real_distribution<double> radius_dist(6.0, 10.0);
      const double radius = radius_dist(rng);
      std::uniform_real_distribution<double> centre_dist(radius, kCifarSide - radius);
      const double cy = centre_dist(rng);
      const double cx = centre_dist(rng);
      const auto shape = static_cast<detail::Shape>(c % 4);
      const detail::Rgb colour = detail::kPalette[static_cast<std::size_t>(c)];
      std::normal_distribution<double> pixel_noise(0.0, noise);
      ImageBuffer img(3, kCifarSide, kCifarSide, 0.0);
      for (int y = 0; y < kCifarSide; ++y) {
        for (int x = 0; x < kCifarSide; ++x) {
          const double u = (x + 0.5 - cx) / radius;
          const double v = (y + 0.5 - cy) / radius;
          const bool on = detail::inside(shape, u, v);
          const std::array<double, 3> base = on ? std::array<double, 3>{colour.r, colour.g, colour.b}
                                                : std::array<double, 3>{0.1, 0.1, 0.1};
          for (int ch = 0; ch < 3; ++ch) {
            img.at(ch, y, x) = std::clamp(base[static_cast<std::size_t>(ch)] + pixel_noise(rng), 0.0, 1.0);
          }
        }
      }
      ds.images.push_back(std::move(img));
      ds.labels.push_back(c);
    }
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Flip and normalisation.

inline ImageBuffer flip_horizontal(const ImageBuffer& image) {
  ImageBuffer out = image;
  const int w = image.width();
  for (int c = 0; c < image.channels(); ++c) {
    for (int i = 0; i < image.height(); ++i) {
      for (int j = 0; j < w; ++j) out.at(c, i, j) = image.at(c, i, w - 1 - j);
    }
  }
  return out;
}

/// Flips with probability 0.5. Labels are unaffected.
inline ImageBuffer hflip(const ImageBuffer& image, RandomSource& rng) {
  if (std::bernoulli_distribution(0.5)(rng)) return flip_horizontal(image);
  return image;
}

struct NormalizationStats {
  std::vector<double> mean;
  std::vector<double> std;

  void validate(int channels) const {
    if (mean.size() != static_cast<std::size_t>(channels) || std.size() != mean.size()) {
      throw DomainError("NormalizationStats: channel count mismatch");
    }
    for (double s : std) {
      if (!(s > 0.0)) throw DomainError("NormalizationStats: std must be > 0");
    }
  }
};

inline NormalizationStats compute_stats(const LabeledDataset& ds) {
  if (ds.empty()) throw DomainError("compute_stats: empty dataset");
  const int channels = ds.images.front().channels();
  NormalizationStats st{std::vector<double>(static_cast<std::size_t>(channels), 0.0),
                        std::vector<double>(static_cast<std::size_t>(channels), 0.0)};
  std::vector<double> sq(static_cast<std::size_t>(channels), 0.0);
  double count = 0.0;
  for (const auto& img : ds.images) {
    const auto px = img.pixels();
    const std::size_t plane = img.plane_size();
    for (int c = 0; c < channels; ++c) {
      for (std::size_t k = 0; k < plane; ++k) {
        const double v = px[static_cast<std::size_t>(c) * plane + k];
        st.mean[static_cast<std::size_t>(c)] += v;
        sq[static_cast<std::size_t>(c)] += v * v;
      }
    }
    count += static_cast<double>(plane);
  }
  for (std::size_t c = 0; c < st.mean.size(); ++c) {
    st.mean[c] /= count;
    const double var = sq[c] / count - st.mean[c] * st.mean[c];
    st.std[c] = std::sqrt(std::max(var, 1e-12));
  }
  return st;
}

namespace detail {

template <typename F>
LabeledDataset map_channels(const LabeledDataset& ds, const NormalizationStats& stats, F f) {
  LabeledDataset out = ds;
  for (auto& img : out.images) {
    stats.validate(img.channels());
    const std::size_t plane = img.plane_size();
    auto px = img.pixels();
    for (int c = 0; c < img.channels(); ++c) {
      const double m = stats.mean[static_cast<std::size_t>(c)];
      const double s = stats.std[static_cast<std::size_t>(c)];
      for (std::size_t k = 0; k < plane; ++k) {
        double& v = px[static_cast<std::size_t>(c) * plane + k];
        v = f(v, m, s);
      }
    }
  }
  return out;
}

}  // namespace detail

inline LabeledDataset normalize(const LabeledDataset& ds, const NormalizationStats& stats) {
  return detail::map_channels(ds, stats, [](double v, double m, double s) { return (v - m) / s; });
}

inline LabeledDataset denormalize(const LabeledDataset& ds, const NormalizationStats& stats) {
  return detail::map_channels(ds, stats, [](double v, double m, double s) { return v * s + m; });
}

// ---------------------------------------------------------------------------
// Dataset container: "SAUGDATA" | u32 version | u32 num_classes | u32 split |
// u64 count | u32 C | u32 H | u32 W | u32 labels[count] | f64 pixels[...],
// little-endian. All images share one shape.

inline constexpr char kDatasetMagic[8] = {'S', 'A', 'U', 'G', 'D', 'A', 'T', 'A'};
inline constexpr std::uint32_t kDatasetVersion = 1;

inline void save_dataset(const LabeledDataset& ds, std::ostream& os) {
  ds.validate();
  if (ds.empty()) throw DomainError("save_dataset: empty dataset");
  const auto& first = ds.images.front();
  os.write(kDatasetMagic, sizeof kDatasetMagic);
  detail::write_le<std::uint32_t>(os, kDatasetVersion);
  detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(ds.num_classes));
  detail::write_le<std::uint32_t>(os, ds.split == Split::train ? 0u : 1u);
  detail::write_le<std::uint64_t>(os, ds.size());
  detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(first.channels()));
  detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(first.height()));
  detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(first.width()));
  for (int y : ds.labels) detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(y));
  for (const auto& img : ds.images) {
    if (!img.same_shape(first)) throw DomainError("save_dataset: mixed image shapes");
    for (double v : img.pixels()) detail::write_le<double>(os, v);
  }
}

inline LabeledDataset load_dataset(std::istream& is) {
  char magic[sizeof kDatasetMagic];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kDatasetMagic, sizeof magic) != 0) {
    throw ParseError("dataset: bad magic", 0);
  }
  if (detail::read_le<std::uint32_t>(is) != kDatasetVersion) throw ParseError("dataset: unsupported version", 8);
  LabeledDataset ds;
  ds.num_classes = static_cast<int>(detail::read_le<std::uint32_t>(is));
  ds.split = detail::read_le<std::uint32_t>(is) == 0 ? Split::train : Split::test;
  const auto count = detail::read_le<std::uint64_t>(is);
  const int c = static_cast<int>(detail::read_le<std::uint32_t>(is));
  const int h = static_cast<int>(detail::read_le<std::uint32_t>(is));
  const int w = static_cast<int>(detail::read_le<std::uint32_t>(is));
  if (count > (1ULL << 32) || c <= 0 || h <= 0 || w <= 0) throw ParseError("dataset: implausible header", 16);
  for (std::uint64_t i = 0; i < count; ++i) ds.labels.push_back(static_cast<int>(detail::read_le<std::uint32_t>(is)));
  const std::size_t n = static_cast<std::size_t>(c) * static_cast<std::size_t>(h) * static_cast<std::size_t>(w);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::vector<double> px(n);
    for (auto& v : px) v = detail::read_le<double>(is);
    ds.images.emplace_back(c, h, w, std::move(px));
  }
  ds.validate();
  return ds;
}

}  // namespace softaug
