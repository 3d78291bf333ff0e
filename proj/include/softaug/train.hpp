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
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "softaug/data.hpp"
#include "softaug/errors.hpp"
#include "softaug/geometry.hpp"
#include "softaug/loss.hpp"
#include "softaug/model.hpp"
#include "softaug/random.hpp"
#include "softaug/sampling.hpp"
#include "softaug/softening.hpp"

namespace softaug {

enum class SamplerKind { none, uniform, gaussian, resize };

struct SamplerConfig {
  SamplerKind kind = SamplerKind::gaussian;
  int range = 4;          // uniform: offsets in {-range, ..., range}
  double sigma = 0.3;     // gaussian / resize
  int l_min = 16;         // resize

  static SamplerConfig none() { return {SamplerKind::none, 0, 0.0, 0}; }
  static SamplerConfig uniform(int r) { return {SamplerKind::uniform, r, 0.0, 0}; }
  static SamplerConfig gaussian(double sigma) { return {SamplerKind::gaussian, 0, sigma, 0}; }
  static SamplerConfig resize(double sigma, int l_min) { return {SamplerKind::resize, 0, sigma, l_min}; }
};

struct SigmaDecay {
  int final_epochs = 20;
  double factor = 1000.0;
};

struct TrainConfig {
  int epochs = 60;
  int batch_size = 64;
  double lr0 = 0.05;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  std::uint64_t seed = 0;
  std::vector<int> hidden = {256};
  SofteningPolicy policy;
  SamplerConfig sampler;
  std::optional<SigmaDecay> sigma_decay;
  std::optional<double> label_smoothing;  // fixed alpha; overrides the transform-driven p
  bool hflip = true;

  void validate() const {
    if (epochs < 0) throw DomainError("TrainConfig: epochs must be >= 0");
    if (batch_size < 1) throw DomainError("TrainConfig: batch_size must be >= 1");
    if (!(lr0 > 0.0)) throw DomainError("TrainConfig: lr0 must be > 0");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw DomainError("TrainConfig: momentum outside [0, 1)");
    if (!(weight_decay >= 0.0)) throw DomainError("TrainConfig: weight_decay must be >= 0");
    for (int h : hidden) {
      if (h < 1) throw DomainError("TrainConfig: hidden sizes must be positive");
    }
    policy.validate();
    if (sigma_decay && (sigma_decay->final_epochs < 0 || !(sigma_decay->factor > 0.0))) {
      throw DomainError("TrainConfig: invalid sigma decay");
    }
    if (label_smoothing) {
      label_smoothing_confidence(*label_smoothing);
      if (policy.mode == SofteningMode::none) {
        throw DomainError("TrainConfig: label smoothing needs a softening mode other than none");
      }
    }
    if (sampler.kind == SamplerKind::uniform && sampler.range < 0) {
      throw DomainError("TrainConfig: uniform range must be >= 0");
    }
    if ((sampler.kind == SamplerKind::gaussian || sampler.kind == SamplerKind::resize) &&
        !(sampler.sigma > 0.0)) {
      throw DomainError("TrainConfig: sampler sigma must be > 0");
    }
  }
};

/// lr0 * (1 + cos(pi * epoch / total)) / 2.
inline double cosine_lr(int epoch, int total_epochs, double lr0) {
  if (total_epochs <= 0) return lr0;
  if (epoch < 0 || epoch > total_epochs) throw DomainError("cosine_lr: epoch outside [0, total]");
  return lr0 * 0.5 * (1.0 + std::cos(std::numbers::pi * epoch / total_epochs));
}

/// Crop spread for an epoch; divided by the decay factor over the final window.
inline double effective_sigma(int epoch, const TrainConfig& cfg) {
  const double sigma = cfg.sampler.sigma;
  if (!cfg.sigma_decay) return sigma;
  if (epoch >= cfg.epochs - cfg.sigma_decay->final_epochs) return sigma / cfg.sigma_decay->factor;
  return sigma;
}

struct TrainingSample {
  ImageBuffer image;
  int label = 0;
  double confidence = 1.0;
  double weight = 1.0;
  double visibility = 1.0;
};

/// One pass of the augmentation pipeline: flip, crop, visibility, confidence.
inline TrainingSample augment(const ImageBuffer& image, int label, const TrainConfig& cfg,
                              double sigma, RandomSource& rng) {
  TrainingSample s;
  s.label = label;
  ImageBuffer img = cfg.hflip ? hflip(image, rng) : image;
  const int rows = img.height();
  const int cols = img.width();
  switch (cfg.sampler.kind) {
    case SamplerKind::none:
      s.image = std::move(img);
      break;
    case SamplerKind::uniform: {
      const int r = std::min({cfg.sampler.range, rows, cols});
      const Offset o = draw_uniform_crop(r, rng);
      s.image = pad_and_crop(img, o.tx, o.ty);
      s.visibility = visibility(o.tx, o.ty, rows, cols);
      break;
    }
    case SamplerKind::gaussian: {
      const Offset o = draw_gaussian_crop({sigma, std::max(rows, cols), 100}, rows, cols, rng);
      s.image = pad_and_crop(img, o.tx, o.ty);
      s.visibility = visibility(o.tx, o.ty, rows, cols);
      break;
    }
    case SamplerKind::resize: {
      const ResizeCropConfig rc{sigma, cols, rows, std::min({cfg.sampler.l_min, rows, cols})};
      const CropWindow win = draw_resize_crop(rc, rng);
      s.image = crop_and_resize(img, win, rows, cols);
      s.visibility = crop_visibility(win, cols, rows);
      break;
    }
  }
  const LossMode mode = loss_mode_for(cfg.policy.mode);
  if (cfg.label_smoothing) {
    s.confidence = label_smoothing_confidence(*cfg.label_smoothing);
  } else if (cfg.policy.mode == SofteningMode::none) {
    s.confidence = 1.0;
  } else {
    s.confidence = soften(s.visibility, cfg.policy);
  }
  s.weight = softens_weight(mode) ? s.confidence : 1.0;
  return s;
}

struct EpochLog {
  int epoch = 0;
  double loss = 0.0;
  double top1_error = 0.0;  // on the augmented training inputs
  double lr = 0.0;
  double sigma = 0.0;
};

struct TrainResult {
  MlpClassifier model;
  std::vector<EpochLog> log;
};

inline std::vector<int> layer_sizes_for(const LabeledDataset& ds, const TrainConfig& cfg) {
  std::vector<int> sizes{static_cast<int>(ds.images.front().size())};
  sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  sizes.push_back(ds.num_classes);
  return sizes;
}

namespace detail {

inline void sgd_step(MlpClassifier& model, Gradients& velocity, const Gradients& grads, double lr,
                     double momentum, double weight_decay) {
  auto& layers = model.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    velocity[l].weight = momentum * velocity[l].weight + grads[l].weight;
    velocity[l].bias = momentum * velocity[l].bias + grads[l].bias;
    layers[l].weight -= lr * velocity[l].weight;
    layers[l].bias -= lr * velocity[l].bias;
    if (weight_decay > 0.0) {
      const double shrink = 1.0 - lr * weight_decay;
      layers[l].weight *= shrink;
      layers[l].bias *= shrink;
    }
  }
}

}  // namespace detail

/// Mini-batch SGD with momentum, cosine learning rate and decoupled weight
/// decay. Random streams: init from split(0), epoch shuffles from
/// split(1).split(epoch), sample augmentation from split(2).split(epoch).split(index).
inline TrainResult train(const LabeledDataset& dataset, const TrainConfig& cfg) {
  cfg.validate();
  dataset.validate();
  if (dataset.empty()) throw DomainError("train: empty dataset");
  if (cfg.policy.mode != SofteningMode::none && dataset.num_classes >= 2 &&
      std::abs(cfg.policy.p_min - 1.0 / dataset.num_classes) > 1e-12) {
    throw DomainError("train: policy p_min must equal 1 / num_classes");
  }
  const RandomSource root(cfg.seed);
  TrainResult res{MlpClassifier::initialized(layer_sizes_for(dataset, cfg), root.split(0)()), {}};
  MlpClassifier& model = res.model;
  Gradients velocity = zero_gradients(model);
  const LossMode mode = loss_mode_for(cfg.policy.mode);
  const std::size_t n = dataset.size();
  const auto input = static_cast<Eigen::Index>(model.input_size());

  std::vector<std::size_t> order(n);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = cosine_lr(epoch, cfg.epochs, cfg.lr0);
    const double sigma = effective_sigma(epoch, cfg);
    std::iota(order.begin(), order.end(), std::size_t{0});
    RandomSource shuffle_rng = root.split(1).split(static_cast<std::uint64_t>(epoch));
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    const RandomSource aug_root = root.split(2).split(static_cast<std::uint64_t>(epoch));

    double loss_sum = 0.0;
    std::size_t wrong = 0;
    int batch_index = 0;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch_size), ++batch_index) {
      const std::size_t end = std::min(n, start + static_cast<std::size_t>(cfg.batch_size));
      const auto bsz = static_cast<Eigen::Index>(end - start);
      Eigen::MatrixXd inputs(input, bsz);
      std::vector<BatchItem> items;
      items.reserve(static_cast<std::size_t>(bsz));
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t idx = order[k];
        RandomSource rng = aug_root.split(idx);
        TrainingSample s = augment(dataset.images[idx], dataset.labels[idx], cfg, sigma, rng);
        inputs.col(static_cast<Eigen::Index>(k - start)) = flatten(s.image);
        items.push_back({s.label, s.confidence});
      }
      BackwardResult br = backward_batch(model, inputs, items, mode);
      if (!std::isfinite(br.loss)) {
        std::ostringstream msg;
        msg << "non-finite loss at epoch " << epoch << ", batch " << batch_index << ", lr " << lr;
        throw NumericError(msg.str());
      }
      loss_sum += br.loss * static_cast<double>(bsz);
      for (Eigen::Index b = 0; b < bsz; ++b) {
        Eigen::Index arg = 0;
        br.logits.col(b).maxCoeff(&arg);
        if (static_cast<int>(arg) != items[static_cast<std::size_t>(b)].true_class) ++wrong;
      }
      detail::sgd_step(model, velocity, br.grads, lr, cfg.momentum, cfg.weight_decay);
      if (!model.all_finite()) {
        std::ostringstream msg;
        msg << "non-finite parameters at epoch " << epoch << ", batch " << batch_index << ", lr " << lr;
        throw NumericError(msg.str());
      }
    }
    res.log.push_back({epoch, loss_sum / static_cast<double>(n),
                       static_cast<double>(wrong) / static_cast<double>(n), lr, sigma});
  }
  return res;
}

}  // namespace softaug
