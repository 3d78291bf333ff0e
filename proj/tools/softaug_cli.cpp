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

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "softaug/softaug.hpp"

namespace fs = std::filesystem;
using namespace softaug;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

// Writes to <out>/<name> when an output directory is given, stdout otherwise.
void emit(const std::optional<std::string>& out, const std::string& name, const std::string& csv) {
  if (!out) {
    std::cout << csv;
    return;
  }
  fs::create_directories(*out);
  write_file(fs::path(*out) / name, csv);
  std::cerr << "wrote " << (fs::path(*out) / name).string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"softaug: transform-conditioned target softening experiments"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  app.add_option("--seed", seed, "Seed override for the command");
  app.add_option("--out", out, "Output directory");

  auto* train_cmd = app.add_subcommand("train", "Train one configuration and write a run directory");
  std::string train_config;
  train_cmd->add_option("--config", train_config, "Experiment config file")->required();

  auto* curve_cmd = app.add_subcommand("curve", "Tabulate the softening curve for several k");
  std::vector<double> ks{0, 1, 2, 4};
  double p_min = 0.01;
  int resolution = 101;
  curve_cmd->add_option("--k", ks, "Curve shapes")->delimiter(',');
  curve_cmd->add_option("--p-min", p_min, "Chance probability");
  curve_cmd->add_option("--resolution", resolution, "Grid points on v in [0, 1]");

  auto* occ_cmd = app.add_subcommand("occlusion", "Top-1 error of a checkpoint under square occlusion");
  std::string occ_config;
  std::string checkpoint;
  std::vector<double> lambdas;
  occ_cmd->add_option("--config", occ_config, "Config naming the dataset")->required();
  occ_cmd->add_option("--checkpoint", checkpoint, "Checkpoint written by train")->required();
  occ_cmd->add_option("--lambdas", lambdas, "Occluded area fractions")->delimiter(',');

  auto* stats_cmd = app.add_subcommand("sampler-stats", "Monte-Carlo summary of a crop sampler");
  std::string sampler = "gaussian";
  SamplerSpec spec;
  long long draws = 100000;
  stats_cmd->add_option("--sampler", sampler, "uniform | gaussian | resize | standard")
      ->check(CLI::IsMember({"uniform", "gaussian", "resize", "standard"}));
  stats_cmd->add_option("--range", spec.range, "Uniform offset range r");
  stats_cmd->add_option("--sigma", spec.sigma, "Relative spread");
  stats_cmd->add_option("--size", spec.size, "Image side (L, W = H)");
  stats_cmd->add_option("--l-min", spec.l_min, "Minimum crop side for resize");
  stats_cmd->add_option("--draws", draws, "Number of draws");

  auto* cmp_cmd = app.add_subcommand("compare", "Paired multi-seed comparison of two configs");
  std::string config_a;
  std::string config_b;
  int seeds = 3;
  cmp_cmd->add_option("--config-a", config_a, "Arm A config")->required();
  cmp_cmd->add_option("--config-b", config_b, "Arm B config")->required();
  cmp_cmd->add_option("--seeds", seeds, "Number of seeds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*train_cmd) {
      ExperimentConfig cfg = load_config(train_config);
      if (seed) cfg.train.seed = *seed;
      const auto art = cmd_train(cfg, out.value_or("run"));
      std::cout << "top1_error," << format_number(art.summary.top1_error) << "\nece,"
                << format_number(art.summary.ece) << '\n';
    } else if (*curve_cmd) {
      if (!(p_min >= 0.0 && p_min <= 1.0)) throw ConfigError("--p-min: must be in [0, 1]");
      if (resolution < 2) throw ConfigError("--resolution: must be >= 2");
      for (double k : ks) {
        if (!(k >= 0.0)) throw ConfigError("--k: values must be >= 0");
      }
      emit(out, "curve.csv", cmd_curve(ks, p_min, resolution));
    } else if (*occ_cmd) {
      ExperimentConfig cfg = load_config(occ_config);
      if (seed) cfg.occlusion_seed = *seed;
      if (lambdas.empty()) lambdas = cfg.lambdas;
      for (double l : lambdas) {
        if (!(l >= 0.0 && l <= 1.0)) throw ConfigError("--lambdas: values must be in [0, 1]");
      }
      const MlpClassifier model = load_checkpoint(checkpoint);
      std::ostringstream os;
      write_sweep_csv(os, cmd_occlusion(model, cfg, lambdas));
      emit(out, "occlusion.csv", os.str());
    } else if (*stats_cmd) {
      spec.kind = sampler == "uniform"    ? StatsSampler::uniform
                  : sampler == "gaussian" ? StatsSampler::gaussian
                  : sampler == "resize"   ? StatsSampler::resize
                                          : StatsSampler::standard;
      if (spec.size < 1 || spec.range < 0 || !(spec.sigma > 0.0) || spec.l_min < 1 || spec.l_min > spec.size) {
        throw ConfigError("sampler-stats: need size >= 1, range >= 0, sigma > 0, 1 <= l_min <= size");
      }
      emit(out, "sampler_stats.csv", sampler_stats_csv(sampler_stats(spec, draws, seed.value_or(0))));
    } else if (*cmp_cmd) {
      if (seeds < 1) throw ConfigError("--seeds: must be >= 1");
      const ExperimentConfig a = load_config(config_a);
      const ExperimentConfig b = load_config(config_b);
      emit(out, "compare.csv", compare_csv(cmd_compare(a, b, seeds, seed.value_or(0))));
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
