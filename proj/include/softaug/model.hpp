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

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "softaug/errors.hpp"
#include "softaug/image.hpp"
#include "softaug/loss.hpp"
#include "softaug/random.hpp"

namespace softaug {

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out

  friend bool operator==(const DenseLayer& a, const DenseLayer& b) {
    return a.weight.rows() == b.weight.rows() && a.weight.cols() == b.weight.cols() &&
           a.weight == b.weight && a.bias == b.bias;
  }
};

/// Fully connected classifier: rectifier between layers, identity at the output.
class MlpClassifier {
 public:
  MlpClassifier() = default;

  /// Zero-initialised parameters.
  explicit MlpClassifier(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
    if (sizes_.size() < 2) throw DomainError("MlpClassifier: need at least input and output sizes");
    for (int s : sizes_) {
      if (s <= 0) throw DomainError("MlpClassifier: layer sizes must be positive");
    }
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      layers_.push_back({Eigen::MatrixXd::Zero(sizes_[l + 1], sizes_[l]),
                         Eigen::VectorXd::Zero(sizes_[l + 1])});
    }
  }

  /// He-uniform weights (bound sqrt(6 / fan_in)), zero biases.
  static MlpClassifier initialized(std::vector<int> layer_sizes, std::uint64_t seed) {
    MlpClassifier m(std::move(layer_sizes));
    RandomSource rng(seed);
    for (auto& layer : m.layers_) {
      const double bound = std::sqrt(6.0 / static_cast<double>(layer.weight.cols()));
      std::uniform_real_distribution<double> u(-bound, bound);
      for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
        for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = u(rng);
      }
    }
    return m;
  }

  const std::vector<int>& layer_sizes() const { return sizes_; }
  int input_size() const { return sizes_.front(); }
  int num_classes() const { return sizes_.back(); }
  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return n;
  }

  bool all_finite() const {
    for (const auto& l : layers_) {
      if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
    }
    return true;
  }

  friend bool operator==(const MlpClassifier&, const MlpClassifier&) = default;

 private:
  std::vector<int> sizes_;
  std::vector<DenseLayer> layers_;
};

using Gradients = std::vector<DenseLayer>;

inline Gradients zero_gradients(const MlpClassifier& model) {
  Gradients g;
  for (const auto& l : model.layers()) {
    g.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()),
                 Eigen::VectorXd::Zero(l.bias.size())});
  }
  return g;
}

inline Eigen::VectorXd flatten(const ImageBuffer& image) {
  const auto px = image.pixels();
  return Eigen::Map<const Eigen::VectorXd>(px.data(), static_cast<Eigen::Index>(px.size()));
}

namespace detail {

inline void check_input(const MlpClassifier& model, Eigen::Index rows) {
  if (rows != model.input_size()) {
    throw DomainError("forward: input length " + std::to_string(rows) +
                      " does not match model input " + std::to_string(model.input_size()));
  }
}

// Pre-activations of every layer for a batch laid out one sample per column.
inline std::vector<Eigen::MatrixXd> forward_trace(const MlpClassifier& model,
                                                  const Eigen::MatrixXd& inputs) {
  check_input(model, inputs.rows());
  std::vector<Eigen::MatrixXd> pre;
  pre.reserve(model.layers().size());
  Eigen::MatrixXd act = inputs;
  const auto& layers = model.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Eigen::MatrixXd z = layers[l].weight * act;
    z.colwise() += layers[l].bias;
    if (l + 1 < layers.size()) act = z.cwiseMax(0.0);
    pre.push_back(std::move(z));
  }
  return pre;
}

}  // namespace detail

/// Logits for a batch, one sample per column.
inline Eigen::MatrixXd forward_batch(const MlpClassifier& model, const Eigen::MatrixXd& inputs) {
  return detail::forward_trace(model, inputs).back();
}

inline std::vector<double> forward(const MlpClassifier& model, const ImageBuffer& image) {
  const Eigen::MatrixXd logits = forward_batch(model, flatten(image));
  return {logits.data(), logits.data() + logits.size()};
}

struct BatchItem {
  int true_class = 0;
  double confidence = 1.0;
};

struct BackwardResult {
  Gradients grads;
  double loss = 0.0;            // batch mean
  Eigen::MatrixXd logits;       // classes x batch
};

/// Gradients of the batch-mean soft loss with respect to every parameter.
inline BackwardResult backward_batch(const MlpClassifier& model, const Eigen::MatrixXd& inputs,
                                     std::span<const BatchItem> items, LossMode mode) {
  const Eigen::Index batch = inputs.cols();
  if (batch == 0 || static_cast<std::size_t>(batch) != items.size()) {
    throw DomainError("backward: batch size mismatch");
  }
  const auto pre = detail::forward_trace(model, inputs);
  const auto& layers = model.layers();
  const int classes = model.num_classes();

  BackwardResult res;
  res.logits = pre.back();
  Eigen::MatrixXd delta(classes, batch);
  double loss_sum = 0.0;
  for (Eigen::Index b = 0; b < batch; ++b) {
    const auto& item = items[static_cast<std::size_t>(b)];
    std::span<const double> z(res.logits.col(b).data(), static_cast<std::size_t>(classes));
    loss_sum += soft_loss(z, item.true_class, item.confidence, mode);
    const auto g = soft_loss_grad(z, item.true_class, item.confidence, mode);
    for (int n = 0; n < classes; ++n) delta(n, b) = g[static_cast<std::size_t>(n)];
  }
  res.loss = loss_sum / static_cast<double>(batch);
  delta /= static_cast<double>(batch);

  res.grads.resize(layers.size());
  for (std::size_t l = layers.size(); l-- > 0;) {
    const Eigen::MatrixXd prev_act = l == 0 ? inputs : Eigen::MatrixXd(pre[l - 1].cwiseMax(0.0));
    res.grads[l].weight = delta * prev_act.transpose();
    res.grads[l].bias = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = layers[l].weight.transpose() * delta;
      delta = back.cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  return res;
}

inline Gradients backward(const MlpClassifier& model, const ImageBuffer& image, int true_class,
                          double confidence, LossMode mode) {
  const BatchItem item{true_class, confidence};
  return backward_batch(model, flatten(image), std::span<const BatchItem>(&item, 1), mode).grads;
}

// ---------------------------------------------------------------------------
// Checkpoint: "SAUGCKPT" | u32 version | u32 layer count | u64 sizes... |
// per layer: weight (row-major, out x in) then bias, little-endian f64.

inline constexpr char kCheckpointMagic[8] = {'S', 'A', 'U', 'G', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

template <typename T>
void write_le(std::ostream& os, T value) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
  unsigned char buf[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(T))) {
    throw ParseError("checkpoint: unexpected end of file", static_cast<std::size_t>(is.gcount()));
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

}  // namespace detail

inline void save_checkpoint(const MlpClassifier& model, std::ostream& os) {
  os.write(kCheckpointMagic, sizeof kCheckpointMagic);
  detail::write_le<std::uint32_t>(os, kCheckpointVersion);
  detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(model.layer_sizes().size()));
  for (int s : model.layer_sizes()) detail::write_le<std::uint64_t>(os, static_cast<std::uint64_t>(s));
  for (const auto& l : model.layers()) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) detail::write_le<double>(os, l.weight(r, c));
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) detail::write_le<double>(os, l.bias(r));
  }
}

inline MlpClassifier load_checkpoint(std::istream& is) {
  char magic[sizeof kCheckpointMagic];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0) {
    throw ParseError("checkpoint: bad magic", 0);
  }
  const auto version = detail::read_le<std::uint32_t>(is);
  if (version != kCheckpointVersion) {
    throw ParseError("checkpoint: unsupported version " + std::to_string(version), 8);
  }
  const auto count = detail::read_le<std::uint32_t>(is);
  if (count < 2 || count > 64) throw ParseError("checkpoint: implausible layer count", 12);
  std::vector<int> sizes;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto s = detail::read_le<std::uint64_t>(is);
    if (s == 0 || s > (1u << 24)) throw ParseError("checkpoint: implausible layer size", 16 + 8 * i);
    sizes.push_back(static_cast<int>(s));
  }
  MlpClassifier model(sizes);
  for (auto& l : model.layers()) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = detail::read_le<double>(is);
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = detail::read_le<double>(is);
  }
  return model;
}

inline void save_checkpoint(const MlpClassifier& model, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  save_checkpoint(model, os);
}

inline MlpClassifier load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return load_checkpoint(is);
}

}  // namespace softaug
