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
#include <filesystem>
#include <fstream>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "softaug/config.hpp"
#include "softaug/data.hpp"
#include "softaug/geometry.hpp"
#include "softaug/metrics.hpp"
#include "softaug/model.hpp"
#include "softaug/sampling.hpp"
#include "softaug/softening.hpp"
#include "softaug/train.hpp"

namespace softaug {

/// Train and test splits, normalised with statistics of the train split.
struct PreparedData {
  LabeledDataset train;
  LabeledDataset test;
  NormalizationStats stats;
};

inline PreparedData prepare_data(const DatasetSource& src) {
  LabeledDataset train;
  LabeledDataset test;
  switch (src.kind) {
    case DatasetKind::synth:
      train = synth_shapes(src.train_per_class, src.num_classes, src.seed, Split::train);
      test = synth_shapes(src.test_per_class, src.num_classes, src.seed + 0x7E57, Split::test);
      break;
    case DatasetKind::cifar10:
      train = parse_cifar10(read_file_bytes(src.train_path));
      test = parse_cifar10(read_file_bytes(src.test_path));
      break;
    case DatasetKind::cifar100:
      train = parse_cifar100(read_file_bytes(src.train_path));
      test = parse_cifar100(read_file_bytes(src.test_path));
      break;
  }
  if (train.empty() || test.empty()) throw DomainError("dataset: empty train or test split");
  train.split = Split::train;
  test.split = Split::test;
  PreparedData out;
  out.stats = compute_stats(train);
  out.train = normalize(train, out.stats);
  out.test = normalize(test, out.stats);
  return out;
}

struct RunSummary {
  double top1_error = 0.0;
  double ece = 0.0;
};

struct EvaluatedRun {
  TrainResult result;
  RunSummary summary;
  CalibrationReport calibration;
};

inline EvaluatedRun train_and_evaluate(const PreparedData& data, const ExperimentConfig& cfg) {
  EvaluatedRun run{train(data.train, cfg.train), {}, {}};
  const auto preds = predict(run.result.model, data.test);
  run.calibration = ece(preds, cfg.ece_bins);
  run.summary = {top1_error(preds), run.calibration.ece};
  return run;
}

inline void write_epoch_log_csv(std::ostream& os, std::span<const EpochLog> log) {
  os << "epoch,loss,top1_error,lr,sigma\n";
  for (const auto& e : log) {
    os << e.epoch << ',' << format_number(e.loss) << ',' << format_number(e.top1_error) << ','
       << format_number(e.lr) << ',' << format_number(e.sigma) << '\n';
  }
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << content;
}

struct RunArtifact {
  std::filesystem::path config_snapshot;
  std::filesystem::path epoch_log;
  std::filesystem::path metrics;
  std::filesystem::path calibration;
  std::filesystem::path checkpoint;
  RunSummary summary;
};

/// Writes the config snapshot first, then trains and writes the epoch log,
/// final metrics, calibration table and checkpoint.
inline RunArtifact cmd_train(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  RunArtifact art;
  art.config_snapshot = out_dir / "config.ini";
  art.epoch_log = out_dir / "epoch_log.csv";
  art.metrics = out_dir / "metrics.csv";
  art.calibration = out_dir / "calibration.csv";
  art.checkpoint = out_dir / "model.ckpt";
  write_file(art.config_snapshot, cfg.text);

  const PreparedData data = prepare_data(cfg.data);
  const EvaluatedRun run = train_and_evaluate(data, cfg);
  art.summary = run.summary;

  std::ostringstream log;
  write_epoch_log_csv(log, run.result.log);
  write_file(art.epoch_log, log.str());
  write_file(art.metrics, "top1_error,ece\n" + format_number(run.summary.top1_error) + "," +
                              format_number(run.summary.ece) + "\n");
  std::ostringstream cal;
  write_calibration_csv(cal, run.calibration);
  write_file(art.calibration, cal.str());
  save_checkpoint(run.result.model, art.checkpoint.string());
  return art;
}

/// Softening curve samples: rows "k,v,p" on a uniform grid of v in [0, 1].
inline std::string cmd_curve(std::span<const double> ks, double p_min, int resolution) {
  if (resolution < 2) throw DomainError("curve: resolution must be >= 2");
  const SofteningPolicy base{0.0, p_min, SofteningMode::target};
  base.validate();
  std::ostringstream os;
  os << "k,v,p\n";
  for (double k : ks) {
    SofteningPolicy policy = base;
    policy.k = k;
    policy.validate();
    for (int i = 0; i < resolution; ++i) {
      const double v = static_cast<double>(i) / (resolution - 1);
      os << format_number(k) << ',' << format_number(v) << ',' << format_number(soften(v, policy)) << '\n';
    }
  }
  return os.str();
}

/// Evaluates a checkpoint on the config's test split under occlusion.
inline std::vector<OcclusionRow> cmd_occlusion(const MlpClassifier& model, const ExperimentConfig& cfg,
                                               std::span<const double> lambdas) {
  const PreparedData data = prepare_data(cfg.data);
  const auto expected = layer_sizes_for(data.test, cfg.train);
  if (model.input_size() != expected.front() || model.num_classes() != expected.back()) {
    throw DomainError("occlusion: checkpoint architecture " + std::to_string(model.input_size()) + "->" +
                      std::to_string(model.num_classes()) + " does not match dataset " +
                      std::to_string(expected.front()) + "->" + std::to_string(expected.back()));
  }
  return occlusion_sweep(model, data.test, lambdas, cfg.occlusion_trials, RandomSource(cfg.occlusion_seed));
}

// ---------------------------------------------------------------------------
// Sampler statistics.

enum class StatsSampler { uniform, gaussian, resize, standard };

struct SamplerSpec {
  StatsSampler kind = StatsSampler::gaussian;
  int range = 4;
  double sigma = 0.3;
  int size = 32;   // square image side (L, W = H)
  int l_min = 16;
};

struct RunningStat {
  double sum = 0.0;
  double sq = 0.0;
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  long long n = 0;

  void add(double v) {
    sum += v;
    sq += v * v;
    min = std::min(min, v);
    max = std::max(max, v);
    ++n;
  }
  double mean() const { return sum / static_cast<double>(n); }
  double stddev() const {
    const double m = mean();
    return std::sqrt(std::max(0.0, sq / static_cast<double>(n) - m * m));
  }
};

struct SamplerStats {
  RunningStat tx, ty, w, h, visibility;
  long long visible = 0;  // draws with v > 0
  std::array<long long, 10> histogram{};  // right-inclusive deciles of v, 0 in the first

  double fraction_visible() const { return static_cast<double>(visible) / static_cast<double>(visibility.n); }
};

inline SamplerStats sampler_stats(const SamplerSpec& spec, long long draws, std::uint64_t seed) {
  if (draws < 1) throw DomainError("sampler-stats: draws must be >= 1");
  if (spec.size < 1) throw DomainError("sampler-stats: size must be >= 1");
  RandomSource rng(seed);
  SamplerStats st;
  for (long long i = 0; i < draws; ++i) {
    CropWindow win{0, 0, spec.size, spec.size};
    double v = 1.0;
    switch (spec.kind) {
      case StatsSampler::uniform: {
        const Offset o = draw_uniform_crop(std::min(spec.range, spec.size), rng);
        win.tx = o.tx;
        win.ty = o.ty;
        v = visibility(o.tx, o.ty, spec.size, spec.size);
        break;
      }
      case StatsSampler::gaussian: {
        const Offset o = draw_gaussian_crop({spec.sigma, spec.size, 100}, spec.size, spec.size, rng);
        win.tx = o.tx;
        win.ty = o.ty;
        v = visibility(o.tx, o.ty, spec.size, spec.size);
        break;
      }
      case StatsSampler::resize:
        win = draw_resize_crop({spec.sigma, spec.size, spec.size, spec.l_min}, rng);
        v = crop_visibility(win, spec.size, spec.size);
        break;
      case StatsSampler::standard:
        win = draw_standard_resize_crop({}, spec.size, spec.size, rng);
        v = crop_visibility(win, spec.size, spec.size);
        break;
    }
    st.tx.add(win.tx);
    st.ty.add(win.ty);
    st.w.add(win.w);
    st.h.add(win.h);
    st.visibility.add(v);
    if (v > 0.0) ++st.visible;
    ++st.histogram[static_cast<std::size_t>(calibration_bin(v, 10) - 1)];
  }
  return st;
}

inline std::string sampler_stats_csv(const SamplerStats& st) {
  std::ostringstream os;
  os << "statistic,value\n";
  os << "draws," << st.visibility.n << '\n';
  const std::pair<const char*, const RunningStat*> rows[] = {
      {"tx", &st.tx}, {"ty", &st.ty}, {"w", &st.w}, {"h", &st.h}, {"visibility", &st.visibility}};
  for (const auto& [name, rs] : rows) {
    os << name << "_mean," << format_number(rs->mean()) << '\n';
    os << name << "_std," << format_number(rs->stddev()) << '\n';
    os << name << "_min," << format_number(rs->min) << '\n';
    os << name << "_max," << format_number(rs->max) << '\n';
  }
  os << "fraction_visible," << format_number(st.fraction_visible()) << '\n';
  for (std::size_t b = 0; b < st.histogram.size(); ++b) {
    os << "visibility_hist_" << format_number(b / 10.0) << '_' << format_number((b + 1) / 10.0) << ','
       << st.histogram[b] << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Paired comparison.

struct CompareRow {
  char arm = 'A';
  std::uint64_t seed = 0;
  RunSummary summary;
};

struct CompareResult {
  std::vector<CompareRow> rows;  // A, B per seed
  double mean_delta_top1 = 0.0;  // B - A
  double mean_delta_ece = 0.0;
};

/// Trains both arms for seeds base_seed .. base_seed + seeds - 1 (overriding
/// train.seed) on the shared dataset.
inline CompareResult cmd_compare(const ExperimentConfig& a, const ExperimentConfig& b, int seeds,
                                 std::uint64_t base_seed) {
  if (seeds < 1) throw DomainError("compare: seeds must be >= 1");
  if (!(a.data == b.data)) throw ConfigError("dataset: compare arms must share the dataset section");
  const PreparedData data = prepare_data(a.data);
  CompareResult res;
  double d_top1 = 0.0;
  double d_ece = 0.0;
  for (int i = 0; i < seeds; ++i) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
    ExperimentConfig ca = a;
    ExperimentConfig cb = b;
    ca.train.seed = seed;
    cb.train.seed = seed;
    const RunSummary ra = train_and_evaluate(data, ca).summary;
    const RunSummary rb = train_and_evaluate(data, cb).summary;
    res.rows.push_back({'A', seed, ra});
    res.rows.push_back({'B', seed, rb});
    d_top1 += rb.top1_error - ra.top1_error;
    d_ece += rb.ece - ra.ece;
  }
  res.mean_delta_top1 = d_top1 / seeds;
  res.mean_delta_ece = d_ece / seeds;
  return res;
}

inline std::string compare_csv(const CompareResult& r) {
  std::ostringstream os;
  os << "arm,seed,top1_error,ece\n";
  for (const auto& row : r.rows) {
    os << row.arm << ',' << row.seed << ',' << format_number(row.summary.top1_error) << ','
       << format_number(row.summary.ece) << '\n';
  }
  os << "delta,mean," << format_number(r.mean_delta_top1) << ',' << format_number(r.mean_delta_ece) << '\n';
  return os.str();
}

}  // namespace softaug
