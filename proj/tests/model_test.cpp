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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "softaug/model.hpp"

namespace softaug {
namespace {

ImageBuffer random_image(int c, int h, int w, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> d(0.0, 1.0);
  ImageBuffer img(c, h, w);
  for (double& v : img.pixels()) v = d(gen);
  return img;
}

// Flat view over every parameter, weights (row-major) then bias per layer.
std::vector<double*> parameters(MlpClassifier& m) {
  std::vector<double*> out;
  for (auto& l : m.layers()) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) out.push_back(&l.weight(r, c));
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) out.push_back(&l.bias(r));
  }
  return out;
}

std::vector<double> flat(const Gradients& g) {
  std::vector<double> out;
  for (const auto& l : g) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) out.push_back(l.weight(r, c));
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) out.push_back(l.bias(r));
  }
  return out;
}

TEST(Forward, ZeroParametersGiveZeroLogits) {
  const MlpClassifier m({12, 5, 3});
  for (double z : forward(m, random_image(3, 2, 2, 1))) EXPECT_EQ(z, 0.0);
}

TEST(Forward, IdentityLayer) {
  MlpClassifier m({2, 2});
  m.layers()[0].weight = Eigen::MatrixXd::Identity(2, 2);
  const ImageBuffer img(1, 1, 2, std::vector<double>{-1.5, 2.25});
  EXPECT_EQ(forward(m, img), (std::vector<double>{-1.5, 2.25}));
}

TEST(Forward, MatchesNaiveReference) {
  const auto m = MlpClassifier::initialized({48, 16, 9, 5}, 3);
  std::vector<std::vector<std::vector<double>>> w;
  std::vector<std::vector<double>> b;
  for (const auto& l : m.layers()) {
    w.emplace_back();
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      w.back().emplace_back();
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) w.back().back().push_back(l.weight(r, c));
    }
    b.emplace_back(l.bias.data(), l.bias.data() + l.bias.size());
  }
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto img = random_image(3, 4, 4, s);
    const auto ref = oracle::naive_mlp(w, b, {img.pixels().begin(), img.pixels().end()});
    const auto got = forward(m, img);
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(got[i], ref[i], 1e-6);
  }
}

TEST(Forward, DimensionMismatch) {
  const MlpClassifier m({12, 3});
  EXPECT_THROW(forward(m, ImageBuffer(1, 3, 3)), DomainError);
  EXPECT_THROW(backward(m, ImageBuffer(1, 3, 3), 0, 1.0, LossMode::hard), DomainError);
}

TEST(Initialization, SeededAndBounded) {
  const auto a = MlpClassifier::initialized({30, 10, 4}, 5);
  EXPECT_EQ(a, MlpClassifier::initialized({30, 10, 4}, 5));
  EXPECT_FALSE(a == MlpClassifier::initialized({30, 10, 4}, 6));
  const double bound = std::sqrt(6.0 / 30.0);
  EXPECT_LE(a.layers()[0].weight.cwiseAbs().maxCoeff(), bound);
  EXPECT_EQ(a.layers()[0].bias.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(a.parameter_count(), 30u * 10 + 10 + 10 * 4 + 4);
}

double max_relative_fd_error(MlpClassifier m, const ImageBuffer& img, int y, double p, LossMode mode) {
  const auto analytic = flat(backward(m, img, y, p, mode));
  auto params = parameters(m);
  double worst = 0.0;
  const double h = 1e-5;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double orig = *params[i];
    *params[i] = orig + h;
    const double up = soft_loss(forward(m, img), y, p, mode);
    *params[i] = orig - h;
    const double down = soft_loss(forward(m, img), y, p, mode);
    *params[i] = orig;
    const double fd = (up - down) / (2 * h);
    const double denom = std::max({std::abs(fd), std::abs(analytic[i]), 1e-6});
    worst = std::max(worst, std::abs(fd - analytic[i]) / denom);
  }
  return worst;
}

TEST(Backward, MatchesFiniteDifferences) {
  const MlpClassifier m = MlpClassifier::initialized({12, 8, 4}, 7);
  ASSERT_LE(m.parameter_count(), 200u);
  for (LossMode mode : {LossMode::hard, LossMode::target, LossMode::weight, LossMode::target_and_weight}) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto img = random_image(3, 2, 2, 100 + s);
      EXPECT_LT(max_relative_fd_error(m, img, static_cast<int>(s % 4), 0.6, mode), 1e-3);
    }
  }
}

TEST(Backward, ZeroAtLossMinimum) {
  MlpClassifier m({6, 5, 3});
  m.layers()[0].weight.setConstant(0.2);  // hidden activations nonzero, output weights zero
  const auto target = make_soft_target(2, 0.8, 3).probs;
  for (int i = 0; i < 3; ++i) m.layers()[1].bias(i) = std::log(target[static_cast<std::size_t>(i)]);
  const auto g = flat(backward(m, random_image(1, 2, 3, 1), 2, 0.8, LossMode::target_and_weight));
  for (double v : g) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(Backward, WeightModeIsScaledHardMode) {
  const MlpClassifier m = MlpClassifier::initialized({12, 8, 4}, 9);
  const auto img = random_image(3, 2, 2, 4);
  const auto hard = flat(backward(m, img, 1, 0.35, LossMode::hard));
  const auto weighted = flat(backward(m, img, 1, 0.35, LossMode::weight));
  for (std::size_t i = 0; i < hard.size(); ++i) EXPECT_NEAR(weighted[i], 0.35 * hard[i], 1e-15);
}

TEST(Backward, BatchIsMeanOfSingles) {
  const MlpClassifier m = MlpClassifier::initialized({12, 8, 4}, 11);
  std::vector<ImageBuffer> imgs;
  std::vector<BatchItem> items;
  Eigen::MatrixXd inputs(12, 3);
  for (int b = 0; b < 3; ++b) {
    imgs.push_back(random_image(3, 2, 2, 20 + b));
    inputs.col(b) = flatten(imgs.back());
    items.push_back({b, 0.5 + 0.1 * b});
  }
  const auto batch = backward_batch(m, inputs, items, LossMode::target_and_weight);
  std::vector<double> mean(m.parameter_count(), 0.0);
  double loss = 0.0;
  for (int b = 0; b < 3; ++b) {
    const auto g = flat(backward(m, imgs[b], b, items[b].confidence, LossMode::target_and_weight));
    for (std::size_t i = 0; i < g.size(); ++i) mean[i] += g[i] / 3.0;
    loss += soft_loss(forward(m, imgs[b]), b, items[b].confidence, LossMode::target_and_weight) / 3.0;
  }
  const auto got = flat(batch.grads);
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], mean[i], 1e-12);
  EXPECT_NEAR(batch.loss, loss, 1e-12);
}

TEST(Checkpoint, RoundTripAndLayout) {
  const auto m = MlpClassifier::initialized({5, 3, 2}, 13);
  std::stringstream ss;
  save_checkpoint(m, ss);
  const std::string bytes = ss.str();
  EXPECT_EQ(bytes.substr(0, 8), "SAUGCKPT");
  EXPECT_EQ(bytes.size(), 8u + 4 + 4 + 3 * 8 + 8 * m.parameter_count());
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 1u);  // version, little-endian
  EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 3u);
  EXPECT_EQ(load_checkpoint(ss), m);
}

TEST(Checkpoint, RejectsGarbage) {
  std::stringstream bad("NOTACKPT........");
  EXPECT_THROW(load_checkpoint(bad), ParseError);
  const auto m = MlpClassifier::initialized({5, 3, 2}, 13);
  std::stringstream ss;
  save_checkpoint(m, ss);
  std::stringstream truncated(ss.str().substr(0, 40));
  EXPECT_THROW(load_checkpoint(truncated), ParseError);
}

}  // namespace
}  // namespace softaug
