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

// Acceptance suite: one PASS/FAIL line per criterion. Exits 0 once every
// criterion has been evaluated; pass --strict to exit 1 on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "oracles.hpp"
#include "softaug/softaug.hpp"

namespace {

using namespace softaug;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void report(int id, std::string_view name, const std::function<Outcome()>& check) {
  const auto t0 = Clock::now();
  Outcome out;
  try {
    out = check();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  if (!out.pass) ++g_failures;
  std::printf("%s %2d %s: %s [%.2fs]\n", out.pass ? "PASS" : "FAIL", id, std::string(name).c_str(),
              out.detail.c_str(), seconds_since(t0));
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

constexpr LossMode kModes[] = {LossMode::hard, LossMode::target, LossMode::weight, LossMode::target_and_weight};

Outcome gradient_correctness() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(101);
  std::normal_distribution<double> logit(0.0, 2.0);
  std::uniform_real_distribution<double> conf(0.1, 1.0);
  double worst = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const LossMode mode = kModes[inst % 4];
    std::vector<double> z(10);
    for (double& v : z) v = logit(gen);
    const int cls = static_cast<int>(gen() % 10);
    const double p = conf(gen);
    const auto a = soft_loss_grad(z, cls, p, mode);
    const auto f = oracle::central_difference([&](const std::vector<double>& x) { return soft_loss(x, cls, p, mode); },
                                              z, 1e-4);
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      diff = std::max(diff, std::abs(a[i] - f[i]));
      scale = std::max({scale, std::abs(a[i]), std::abs(f[i])});
    }
    if (scale > 0.0) worst = std::max(worst, diff / scale);
  }
  const double t = seconds_since(t0);
  return {worst < 1e-4 && t < 5.0, "max relative error " + fmt("%.3g", worst) + " (< 1e-4), " + fmt("%.3f", t) + "s (< 5s)"};
}

Outcome loss_algebra() {
  std::mt19937_64 gen(202);
  std::normal_distribution<double> logit(0.0, 2.0);
  std::uniform_real_distribution<double> conf(0.0, 1.0);
  int weight_violations = 0;
  double collapse = 0.0;
  for (int inst = 0; inst < 1000; ++inst) {
    std::vector<double> z(10);
    for (double& v : z) v = logit(gen);
    const int cls = static_cast<int>(gen() % 10);
    const double p = conf(gen);
    const double hard = soft_loss(z, cls, 1.0, LossMode::hard);
    if (soft_loss(z, cls, p, LossMode::weight) != p * soft_loss(z, cls, p, LossMode::hard)) ++weight_violations;
    const auto gw = soft_loss_grad(z, cls, p, LossMode::weight);
    const auto gh = soft_loss_grad(z, cls, p, LossMode::hard);
    for (std::size_t i = 0; i < gw.size(); ++i) {
      if (gw[i] != p * gh[i]) ++weight_violations;
    }
    for (LossMode m : kModes) collapse = std::max(collapse, std::abs(soft_loss(z, cls, 1.0, m) - hard));
    const std::vector<double> logp = log_softmax(z);
    collapse = std::max(collapse, std::abs(hard + logp[static_cast<std::size_t>(cls)]));
  }
  return {weight_violations == 0 && collapse < 1e-10,
          std::to_string(weight_violations) + " weight-mode violations, p=1 collapse error " + fmt("%.3g", collapse) +
              " (< 1e-10)"};
}

Outcome curve_boundaries() {
  std::mt19937_64 gen(303);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> kd(0.0, 8.0);
  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const SofteningPolicy pol{kd(gen), unit(gen), SofteningMode::target};
    const double v = unit(gen);
    const double v2 = std::min(1.0, v + unit(gen) * (1.0 - v));
    const double p = soften(v, pol);
    if (!(p >= pol.p_min && p <= 1.0)) ++violations;
    if (soften(1.0, pol) != 1.0) ++violations;
    if (pol.k > 0.0 && soften(0.0, pol) != pol.p_min) ++violations;
    if (soften(v2, pol) < p) ++violations;
  }
  return {violations == 0, std::to_string(violations) + " violations over 10^4 (v, k, p_min)"};
}

Outcome sampler_statistics() {
  const auto t0 = Clock::now();
  const auto g = sampler_stats({StatsSampler::gaussian, 4, 0.3, 32, 16}, 100000, 404);
  const auto u = sampler_stats({StatsSampler::uniform, 4, 0.3, 32, 16}, 100000, 405);
  int size_violations = 0;
  for (const ResizeCropConfig cfg : {ResizeCropConfig{0.3, 224, 224, 112}, ResizeCropConfig{0.3, 32, 32, 16}}) {
    RandomSource rng(406);
    for (int i = 0; i < 100000; ++i) {
      const CropWindow w = draw_resize_crop(cfg, rng);
      if (w.w < cfg.l_min || w.w > cfg.input_w || w.h < cfg.l_min || w.h > cfg.input_h) ++size_violations;
    }
  }
  const double t = seconds_since(t0);
  const bool ok = g.fraction_visible() >= 0.99 && u.visibility.min == 0.765625 && size_violations == 0 && t < 10.0;
  return {ok, "gaussian fraction(v>0) " + fmt("%.5f", g.fraction_visible()) + " (>= 0.99), uniform r=4 min v " +
                  fmt("%.6f", u.visibility.min) + " (== 0.765625), resize size violations " +
                  std::to_string(size_violations) + ", " + fmt("%.2f", t) + "s (< 10s)"};
}

Outcome ece_oracle() {
  std::mt19937_64 gen(505);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int mismatches = 0;
  for (int set = 0; set < 1000; ++set) {
    const int n = 1 + static_cast<int>(gen() % 200);
    const int classes = 2 + static_cast<int>(gen() % 9);
    const int bins = 1 + static_cast<int>(gen() % 20);
    std::vector<PredictionRecord> preds;
    for (int i = 0; i < n; ++i) {
      std::vector<double> probs(static_cast<std::size_t>(classes));
      double s = 0.0;
      for (double& q : probs) s += (q = unit(gen) * unit(gen));
      for (double& q : probs) q /= s;
      preds.push_back(make_prediction(probs, static_cast<int>(gen() % static_cast<unsigned>(classes))));
    }
    if (ece(preds, bins).ece != oracle::brute_force_ece(preds, bins)) ++mismatches;
  }
  auto fixed = [](double c, int predicted, int truth) {
    PredictionRecord r;
    r.probs = {c, 1.0 - c};
    r.predicted_class = predicted;
    r.confidence = c;
    r.true_class = truth;
    return r;
  };
  const std::vector<PredictionRecord> a(4, fixed(0.95, 0, 0));
  const std::vector<PredictionRecord> b = {fixed(0.75, 0, 0), fixed(0.75, 0, 1)};
  const double ea = ece(a, 10).ece;
  const double eb = ece(b, 10).ece;
  const bool ok = mismatches == 0 && std::abs(ea - 0.05) <= 1e-12 && std::abs(eb - 0.25) <= 1e-12;
  return {ok, std::to_string(mismatches) + " mismatches over 1000 sets, fixtures " + fmt("%.17g", ea) + " / " +
                  fmt("%.17g", eb)};
}

Outcome crop_geometry() {
  std::mt19937_64 gen(606);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int mismatches = 0;
  for (int img_i = 0; img_i < 20; ++img_i) {
    std::vector<double> px(3 * 32 * 32);
    for (double& v : px) v = unit(gen);
    const ImageBuffer img(3, 32, 32, px);
    for (int tx = -32; tx <= 32; ++tx)
      for (int ty = -32; ty <= 32; ++ty) {
        const ImageBuffer got = pad_and_crop(img, tx, ty);
        if (!(got == oracle::per_pixel_crop(img, tx, ty)) || !(got == oracle::padded_canvas_crop(img, tx, ty))) {
          ++mismatches;
        }
      }
  }
  std::uniform_int_distribution<int> pos(-20, 40);
  std::uniform_int_distribution<int> side(1, 30);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const CropWindow a{pos(gen), pos(gen), side(gen), side(gen)};
    const CropWindow b{pos(gen), pos(gen), side(gen), side(gen)};
    worst = std::max(worst, std::abs(iou(a, b) - oracle::cell_count_iou(a, b)));
  }
  return {mismatches == 0 && worst <= 1e-12,
          std::to_string(mismatches) + " crop mismatches over 20 images x 65^2 offsets, max IoU error " +
              fmt("%.3g", worst)};
}

std::filesystem::path config_dir() { return SOFTAUG_CONFIG_DIR; }

struct ArmMeans {
  double top1 = 0.0;
  double ece = 0.0;
};

ArmMeans arm_means(const CompareResult& r, char arm) {
  ArmMeans m;
  int n = 0;
  for (const auto& row : r.rows) {
    if (row.arm != arm) continue;
    m.top1 += row.summary.top1_error;
    m.ece += row.summary.ece;
    ++n;
  }
  m.top1 /= n;
  m.ece /= n;
  return m;
}

std::string g_first_compare_csv;

Outcome directional_experiment() {
  const auto t0 = Clock::now();
  const auto hard = load_config((config_dir() / "hard_uniform_r16.ini").string());
  const auto soft = load_config((config_dir() / "soft_gaussian_k2.ini").string());
  const CompareResult r = cmd_compare(hard, soft, 3, 0);
  g_first_compare_csv = compare_csv(r);
  const ArmMeans a = arm_means(r, 'A');
  const ArmMeans b = arm_means(r, 'B');
  const double t = seconds_since(t0);
  const bool top1_ok = b.top1 <= a.top1;
  const bool ece_ok = b.ece <= a.ece;
  return {top1_ok && ece_ok && t < 600.0,
          std::string("(a) ") + (top1_ok ? "ok" : "violated") + " soft top-1 " + fmt("%.4f", b.top1) + " vs hard " +
              fmt("%.4f", a.top1) + "; (b) " + (ece_ok ? "ok" : "violated") + " soft ECE " + fmt("%.4f", b.ece) +
              " vs hard " + fmt("%.4f", a.ece) + "; " + fmt("%.1f", t) + "s (< 600s)"};
}

Outcome occlusion_sanity() {
  const auto soft = load_config((config_dir() / "soft_gaussian_k2.ini").string());
  const PreparedData data = prepare_data(soft.data);
  const EvaluatedRun run = train_and_evaluate(data, soft);
  const double lambdas[] = {0.0, 0.8};
  const auto rows = occlusion_sweep(run.result.model, data.test, lambdas, 1, RandomSource(soft.occlusion_seed));
  const double clean = top1_error(predict(run.result.model, data.test));
  const bool ok = rows[1].top1_error >= rows[0].top1_error && rows[0].top1_error == clean;
  return {ok, "error at lambda 0.8 " + fmt("%.4f", rows[1].top1_error) + " vs lambda 0 " +
                  fmt("%.4f", rows[0].top1_error) + ", clean " + fmt("%.4f", clean)};
}

Outcome ssl_weights() {
  std::mt19937_64 gen(909);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> kd(0.0, 8.0);
  double mean_err = 0.0;
  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const SofteningPolicy pol{kd(gen), unit(gen), SofteningMode::weight};
    const double x = unit(gen);
    const double y = std::min(1.0, x + unit(gen) * (1.0 - x));
    const double s1x = ssl_pair_confidence(x, pol, PairHypothesis::SA1);
    const double s1y = ssl_pair_confidence(y, pol, PairHypothesis::SA1);
    const double s2x = ssl_pair_confidence(x, pol, PairHypothesis::SA2);
    const double s2y = ssl_pair_confidence(y, pol, PairHypothesis::SA2);
    if (s1y < s1x || s2y > s2x) ++violations;
    if (s1x != ssl_pair_confidence(1.0 - x, pol, PairHypothesis::SA2)) ++violations;
  }
  for (int batch = 0; batch < 1000; ++batch) {
    std::vector<double> w(1 + gen() % 256);
    for (double& v : w) v = 1e-3 + unit(gen);
    const auto nw = normalize_batch_weights(w);
    double s = 0.0;
    for (double v : nw) s += v;
    mean_err = std::max(mean_err, std::abs(s / static_cast<double>(nw.size()) - 1.0));
  }
  return {violations == 0 && mean_err <= 1e-12, std::to_string(violations) +
                                                    " monotonicity/reflection violations over 10^4 IoUs, batch mean error " +
                                                    fmt("%.3g", mean_err)};
}

Outcome determinism() {
  const auto hard = load_config((config_dir() / "hard_uniform_r16.ini").string());
  const auto soft = load_config((config_dir() / "soft_gaussian_k2.ini").string());
  if (g_first_compare_csv.empty()) g_first_compare_csv = compare_csv(cmd_compare(hard, soft, 3, 0));
  const std::string second = compare_csv(cmd_compare(hard, soft, 3, 0));
  const bool same = second == g_first_compare_csv;
  return {same, std::string(same ? "identical" : "different") + " compare CSV across two runs (" +
                    std::to_string(second.size()) + " bytes)"};
}

}  // namespace

int main(int argc, char** argv) {
  const bool strict = argc > 1 && std::string_view(argv[1]) == "--strict";
  const auto t0 = Clock::now();
  report(1, "gradient correctness", gradient_correctness);
  report(2, "loss algebra", loss_algebra);
  report(3, "softening curve boundaries", curve_boundaries);
  report(4, "sampler statistics", sampler_statistics);
  report(5, "ECE oracle equivalence", ece_oracle);
  report(6, "crop geometry oracle", crop_geometry);
  report(7, "directional soft vs hard experiment", directional_experiment);
  report(8, "occlusion sweep sanity", occlusion_sanity);
  report(9, "SSL weight properties", ssl_weights);
  report(10, "compare determinism", determinism);
  std::printf("acceptance: %d of 10 criteria passed [%.1fs]\n", 10 - g_failures, seconds_since(t0));
  return strict && g_failures > 0 ? 1 : 0;
}
