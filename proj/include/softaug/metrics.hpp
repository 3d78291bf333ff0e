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
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "softaug/data.hpp"
#include "softaug/errors.hpp"
#include "softaug/geometry.hpp"
#include "softaug/loss.hpp"
#include "softaug/model.hpp"
#include "softaug/random.hpp"

namespace softaug {

struct PredictionRecord {
  std::vector<double> probs;
  int predicted_class = 0;
  double confidence = 0.0;
  int true_class = 0;

  bool correct() const { return predicted_class == true_class; }
};

/// First maximum wins ties.
inline PredictionRecord make_prediction(std::vector<double> probs, int true_class) {
  if (probs.empty()) throw DomainError("make_prediction: empty probability vector");
  const auto it = std::max_element(probs.begin(), probs.end());
  PredictionRecord r;
  r.predicted_class = static_cast<int>(it - probs.begin());
  r.confidence = *it;
  r.true_class = true_class;
  r.probs = std::move(probs);
  return r;
}

inline PredictionRecord predict(const MlpClassifier& model, const ImageBuffer& image, int true_class) {
  const auto logits = forward(model, image);
  return make_prediction(softmax(logits), true_class);
}

inline std::vector<PredictionRecord> predict(const MlpClassifier& model, const LabeledDataset& ds) {
  std::vector<PredictionRecord> out;
  out.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) out.push_back(predict(model, ds.images[i], ds.labels[i]));
  return out;
}

inline double top1_error(std::span<const PredictionRecord> preds) {
  if (preds.empty()) throw DomainError("top1_error: no predictions");
  std::size_t wrong = 0;
  for (const auto& p : preds) wrong += p.correct() ? 0 : 1;
  return static_cast<double>(wrong) / static_cast<double>(preds.size());
}

struct CalibrationBin {
  std::size_t count = 0;
  double accuracy = 0.0;    // 0 when empty
  double confidence = 0.0;  // 0 when empty
};

struct CalibrationReport {
  int num_bins = 0;
  std::vector<CalibrationBin> bins;
  double ece = 0.0;
};

/// 1-based bin m with (m - 1) / M < conf <= m / M; conf = 0 goes to bin 1.
inline int calibration_bin(double confidence, int num_bins) {
  int m = static_cast<int>(std::ceil(confidence * num_bins));
  m = std::clamp(m, 1, num_bins);
  // The product above can round across a boundary; settle against the
  // boundaries as they are represented in double.
  while (m > 1 && confidence <= static_cast<double>(m - 1) / num_bins) --m;
  while (m < num_bins && confidence > static_cast<double>(m) / num_bins) ++m;
  return m;
}

/// Expected calibration error over M equal-width confidence bins.
inline CalibrationReport ece(std::span<const PredictionRecord> preds, int num_bins = 10) {
  if (preds.empty()) throw DomainError("ece: no predictions");
  if (num_bins < 1) throw DomainError("ece: need at least one bin");
  CalibrationReport rep;
  rep.num_bins = num_bins;
  rep.bins.resize(static_cast<std::size_t>(num_bins));
  std::vector<double> correct(static_cast<std::size_t>(num_bins), 0.0);
  std::vector<double> conf_sum(static_cast<std::size_t>(num_bins), 0.0);
  for (const auto& p : preds) {
    const auto b = static_cast<std::size_t>(calibration_bin(p.confidence, num_bins) - 1);
    rep.bins[b].count += 1;
    correct[b] += p.correct() ? 1.0 : 0.0;
    conf_sum[b] += p.confidence;
  }
  const double n = static_cast<double>(preds.size());
  for (std::size_t b = 0; b < rep.bins.size(); ++b) {
    auto& bin = rep.bins[b];
    if (bin.count == 0) continue;
    const double cnt = static_cast<double>(bin.count);
    bin.accuracy = correct[b] / cnt;
    bin.confidence = conf_sum[b] / cnt;
    rep.ece += (cnt / n) * std::abs(bin.accuracy - bin.confidence);
  }
  return rep;
}

struct OcclusionRow {
  double lambda = 0.0;
  double top1_error = 0.0;
};

/// Top-1 error under random square occlusion for each lambda. Image i, trial
/// t at lambda index l uses stream rng.split(l).split(i * trials + t), so the
/// table does not depend on evaluation order.
inline std::vector<OcclusionRow> occlusion_sweep(const MlpClassifier& model, const LabeledDataset& ds,
                                                 std::span<const double> lambdas, int trials_per_image,
                                                 const RandomSource& rng, double fill = 0.0) {
  if (ds.empty()) throw DomainError("occlusion_sweep: empty dataset");
  if (trials_per_image < 1) throw DomainError("occlusion_sweep: trials_per_image must be >= 1");
  std::vector<OcclusionRow> rows;
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    const double lambda = lambdas[l];
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("occlusion_sweep: lambda outside [0, 1]");
    const RandomSource level = rng.split(l);
    std::vector<PredictionRecord> preds;
    preds.reserve(ds.size() * static_cast<std::size_t>(trials_per_image));
    for (std::size_t i = 0; i < ds.size(); ++i) {
      for (int t = 0; t < trials_per_image; ++t) {
        RandomSource local = level.split(i * static_cast<std::size_t>(trials_per_image) + static_cast<std::size_t>(t));
        preds.push_back(predict(model, occlude(ds.images[i], lambda, local, fill), ds.labels[i]));
      }
    }
    rows.push_back({lambda, top1_error(preds)});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// CSV emission. Numbers use 6 significant digits.

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline void write_sweep_csv(std::ostream& os, std::span<const OcclusionRow> rows) {
  os << "lambda,top1_error\n";
  for (const auto& r : rows) os << format_number(r.lambda) << ',' << format_number(r.top1_error) << '\n';
}

/// One row per bin, then a trailing "ece" row carrying the total count and
/// the ECE in the confidence column.
inline void write_calibration_csv(std::ostream& os, const CalibrationReport& rep) {
  os << "bin,count,accuracy,confidence\n";
  std::size_t total = 0;
  for (std::size_t b = 0; b < rep.bins.size(); ++b) {
    const auto& bin = rep.bins[b];
    total += bin.count;
    os << b + 1 << ',' << bin.count << ',' << format_number(bin.accuracy) << ','
       << format_number(bin.confidence) << '\n';
  }
  os << "ece," << total << ",," << format_number(rep.ece) << '\n';
}

}  // namespace softaug
