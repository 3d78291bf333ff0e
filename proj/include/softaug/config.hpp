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

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "softaug/errors.hpp"
#include "softaug/softening.hpp"
#include "softaug/train.hpp"

namespace softaug {

enum class DatasetKind { synth, cifar10, cifar100 };

struct DatasetSource {
  DatasetKind kind = DatasetKind::synth;
  std::string train_path;
  std::string test_path;
  int num_classes = 4;
  int train_per_class = 125;
  int test_per_class = 50;
  std::uint64_t seed = 1;

  int classes() const {
    switch (kind) {
      case DatasetKind::cifar10: return 10;
      case DatasetKind::cifar100: return 100;
      case DatasetKind::synth: return num_classes;
    }
    return num_classes;
  }

  friend bool operator==(const DatasetSource&, const DatasetSource&) = default;
};

/// A whole experiment as read from a sectioned key = value file:
///
///   [dataset]   source, train_path, test_path, num_classes, train_per_class,
///               test_per_class, seed
///   [sampler]   kind (none|uniform|gaussian|resize), range, sigma, l_min
///   [softening] mode (none|target|weight|target_and_weight), k, label_smoothing
///   [train]     epochs, batch_size, lr, momentum, weight_decay, seed, hidden,
///               hflip, sigma_decay_epochs, sigma_decay_factor
///   [eval]      ece_bins, lambdas, occlusion_trials, occlusion_seed
///
/// p_min is always 1 / number of classes and cannot be configured.
struct ExperimentConfig {
  DatasetSource data;
  TrainConfig train;
  int ece_bins = 10;
  std::vector<double> lambdas = {0.0, 0.2, 0.4, 0.6, 0.8};
  int occlusion_trials = 1;
  std::uint64_t occlusion_seed = 0;
  std::string text;  // verbatim source, written back as the run snapshot
};

namespace detail {

inline std::string field(const std::string& section, const std::string& key) {
  return section + "." + key;
}

class ConfigReader {
 public:
  explicit ConfigReader(const boost::property_tree::ptree& tree) : tree_(tree) {
    for (const auto& [section, body] : tree_) {
      if (body.empty() && !body.data().empty()) {
        throw ConfigError(section + ": keys must live inside a [section]");
      }
      for (const auto& [key, value] : body) seen_.insert(field(section, key));
    }
  }

  std::optional<std::string> raw(const std::string& section, const std::string& key) {
    const std::string name = field(section, key);
    used_.insert(name);
    const auto v = tree_.get_optional<std::string>(boost::property_tree::ptree::path_type(name, '.'));
    if (!v) return std::nullopt;
    return trim(*v);
  }

  std::string str(const std::string& section, const std::string& key, const std::string& fallback) {
    return raw(section, key).value_or(fallback);
  }

  template <typename T>
  T number(const std::string& section, const std::string& key, T fallback) {
    const auto v = raw(section, key);
    if (!v) return fallback;
    return parse_number<T>(*v, field(section, key));
  }

  template <typename T>
  std::optional<T> optional_number(const std::string& section, const std::string& key) {
    const auto v = raw(section, key);
    if (!v) return std::nullopt;
    return parse_number<T>(*v, field(section, key));
  }

  template <typename T>
  std::vector<T> list(const std::string& section, const std::string& key, std::vector<T> fallback) {
    const auto v = raw(section, key);
    if (!v) return fallback;
    return parse_list<T>(*v, field(section, key));
  }

  bool boolean(const std::string& section, const std::string& key, bool fallback) {
    const auto v = raw(section, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ConfigError(field(section, key) + ": expected a boolean, got '" + *v + "'");
  }

  void reject_unknown() const {
    for (const auto& name : seen_) {
      if (!used_.count(name)) throw ConfigError(name + ": unknown key");
    }
  }

  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  }

  template <typename T>
  static T parse_number(const std::string& text, const std::string& name) {
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      throw ConfigError(name + ": cannot parse '" + text + "' as a number");
    }
    return value;
  }

  template <typename T>
  static std::vector<T> parse_list(const std::string& text, const std::string& name) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number<T>(trim(item), name));
    if (out.empty()) throw ConfigError(name + ": empty list");
    return out;
  }

 private:
  const boost::property_tree::ptree& tree_;
  std::set<std::string> seen_;
  std::set<std::string> used_;
};

template <typename E>
E parse_enum(const std::string& text, const std::string& name, const std::map<std::string, E>& table) {
  const auto it = table.find(text);
  if (it == table.end()) {
    std::string options;
    for (const auto& [k, v] : table) options += (options.empty() ? "" : "|") + k;
    throw ConfigError(name + ": '" + text + "' is not one of " + options);
  }
  return it->second;
}

}  // namespace detail

inline SofteningMode parse_softening_mode(const std::string& text, const std::string& name = "softening.mode") {
  return detail::parse_enum<SofteningMode>(text, name,
                                           {{"none", SofteningMode::none},
                                            {"hard", SofteningMode::none},
                                            {"target", SofteningMode::target},
                                            {"weight", SofteningMode::weight},
                                            {"target_and_weight", SofteningMode::target_and_weight}});
}

inline ExperimentConfig parse_config(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream is(text);
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
  }
  detail::ConfigReader rd(tree);
  ExperimentConfig cfg;
  cfg.text = text;

  auto& d = cfg.data;
  d.kind = detail::parse_enum<DatasetKind>(
      rd.str("dataset", "source", "synth"), "dataset.source",
      {{"synth", DatasetKind::synth}, {"cifar10", DatasetKind::cifar10}, {"cifar100", DatasetKind::cifar100}});
  d.train_path = rd.str("dataset", "train_path", "");
  d.test_path = rd.str("dataset", "test_path", "");
  d.num_classes = rd.number<int>("dataset", "num_classes", d.num_classes);
  d.train_per_class = rd.number<int>("dataset", "train_per_class", d.train_per_class);
  d.test_per_class = rd.number<int>("dataset", "test_per_class", d.test_per_class);
  d.seed = rd.number<std::uint64_t>("dataset", "seed", d.seed);
  if (d.kind == DatasetKind::synth) {
    if (!d.train_path.empty() || !d.test_path.empty()) {
      throw ConfigError("dataset.train_path: paths are only valid for cifar sources");
    }
    if (d.num_classes < 2 || d.num_classes > 8) throw ConfigError("dataset.num_classes: must be in [2, 8]");
    if (d.train_per_class < 1) throw ConfigError("dataset.train_per_class: must be >= 1");
    if (d.test_per_class < 1) throw ConfigError("dataset.test_per_class: must be >= 1");
  } else if (d.train_path.empty() || d.test_path.empty()) {
    throw ConfigError("dataset.train_path: cifar sources need train_path and test_path");
  }

  auto& t = cfg.train;
  auto& s = t.sampler;
  s.kind = detail::parse_enum<SamplerKind>(rd.str("sampler", "kind", "gaussian"), "sampler.kind",
                                           {{"none", SamplerKind::none},
                                            {"uniform", SamplerKind::uniform},
                                            {"gaussian", SamplerKind::gaussian},
                                            {"resize", SamplerKind::resize}});
  s.range = rd.number<int>("sampler", "range", 4);
  s.sigma = rd.number<double>("sampler", "sigma", 0.3);
  s.l_min = rd.number<int>("sampler", "l_min", 16);
  if (s.range < 0) throw ConfigError("sampler.range: must be >= 0");
  if (!(s.sigma > 0.0)) throw ConfigError("sampler.sigma: must be > 0");
  if (s.l_min < 1) throw ConfigError("sampler.l_min: must be >= 1");

  if (rd.raw("softening", "p_min")) {
    throw ConfigError("softening.p_min: derived from the class count, do not set it");
  }
  t.policy.mode = parse_softening_mode(rd.str("softening", "mode", "target_and_weight"));
  t.policy.k = rd.number<double>("softening", "k", 2.0);
  t.policy.p_min = 1.0 / d.classes();
  t.label_smoothing = rd.optional_number<double>("softening", "label_smoothing");
  if (!(t.policy.k >= 0.0)) throw ConfigError("softening.k: must be >= 0");
  if (t.label_smoothing) {
    if (!(*t.label_smoothing >= 0.0 && *t.label_smoothing < 1.0)) {
      throw ConfigError("softening.label_smoothing: must be in [0, 1)");
    }
    if (t.policy.mode == SofteningMode::none) {
      throw ConfigError("softening.label_smoothing: needs mode target, weight or target_and_weight");
    }
  }

  t.epochs = rd.number<int>("train", "epochs", t.epochs);
  t.batch_size = rd.number<int>("train", "batch_size", t.batch_size);
  t.lr0 = rd.number<double>("train", "lr", t.lr0);
  t.momentum = rd.number<double>("train", "momentum", t.momentum);
  t.weight_decay = rd.number<double>("train", "weight_decay", t.weight_decay);
  t.seed = rd.number<std::uint64_t>("train", "seed", t.seed);
  t.hidden = rd.list<int>("train", "hidden", t.hidden);
  t.hflip = rd.boolean("train", "hflip", t.hflip);
  const auto decay_epochs = rd.optional_number<int>("train", "sigma_decay_epochs");
  const auto decay_factor = rd.optional_number<double>("train", "sigma_decay_factor");
  if (decay_epochs.has_value() != decay_factor.has_value()) {
    throw ConfigError("train.sigma_decay_epochs: set both sigma_decay_epochs and sigma_decay_factor");
  }
  if (decay_epochs) t.sigma_decay = SigmaDecay{*decay_epochs, *decay_factor};
  if (t.epochs < 0) throw ConfigError("train.epochs: must be >= 0");
  if (t.batch_size < 1) throw ConfigError("train.batch_size: must be >= 1");
  if (!(t.lr0 > 0.0)) throw ConfigError("train.lr: must be > 0");
  if (!(t.momentum >= 0.0 && t.momentum < 1.0)) throw ConfigError("train.momentum: must be in [0, 1)");
  if (!(t.weight_decay >= 0.0)) throw ConfigError("train.weight_decay: must be >= 0");
  for (int h : t.hidden) {
    if (h < 1) throw ConfigError("train.hidden: sizes must be positive");
  }
  if (t.sigma_decay && (t.sigma_decay->final_epochs < 0 || !(t.sigma_decay->factor > 0.0))) {
    throw ConfigError("train.sigma_decay_factor: epochs must be >= 0 and factor > 0");
  }

  cfg.ece_bins = rd.number<int>("eval", "ece_bins", cfg.ece_bins);
  cfg.lambdas = rd.list<double>("eval", "lambdas", cfg.lambdas);
  cfg.occlusion_trials = rd.number<int>("eval", "occlusion_trials", cfg.occlusion_trials);
  cfg.occlusion_seed = rd.number<std::uint64_t>("eval", "occlusion_seed", cfg.occlusion_seed);
  if (cfg.ece_bins < 1) throw ConfigError("eval.ece_bins: must be >= 1");
  for (double l : cfg.lambdas) {
    if (!(l >= 0.0 && l <= 1.0)) throw ConfigError("eval.lambdas: values must be in [0, 1]");
  }
  if (cfg.occlusion_trials < 1) throw ConfigError("eval.occlusion_trials: must be >= 1");

  rd.reject_unknown();
  return cfg;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError(path + ": cannot open config file");
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

inline ExperimentConfig load_config(const std::string& path) { return parse_config(read_text_file(path)); }

}  // namespace softaug
