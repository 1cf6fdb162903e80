#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "it2pf/env_sim.hpp"
#include "it2pf/identification.hpp"
#include "it2pf/metrics.hpp"
#include "it2pf/peg_sim.hpp"

namespace it2pf {

/// Every tunable of the pipeline. Defaults are fixed constants, seeds included.
struct ExperimentConfig {
  TrainConfig train = [] {
    TrainConfig t;
    t.rule_count = 5;
    return t;
  }();
  SiliconeEnv env = default_silicone_env();
  PressProtocol protocol;
  Split split;
  std::vector<ModelKind> benchmark_models = default_model_list();
  std::vector<std::uint64_t> benchmark_seeds{1, 2, 3, 4, 5};
  ModelKind curve_model = ModelKind::IT2PFML;
  std::vector<double> curve_fractions{0.02, 0.05, 0.10, 0.25, 0.50};
  std::vector<std::uint64_t> curve_seeds{1, 2, 3, 4, 5};
  /// Replaces train.rule_count for learning-curve runs; 0 lets subtractive clustering choose.
  int curve_rule_count = 3;
  PegWorldConfig peg;
  OperatorTiming op;
  RPTrainConfig rp;
  std::vector<std::uint64_t> demo_seeds{1, 2, 3, 4, 5};
  std::vector<std::uint64_t> episode_seeds{101, 102, 103, 104, 105, 106, 107, 108, 109, 110,
                                           111, 112, 113, 114, 115, 116, 117, 118, 119, 120};

  void validate() const;
};

/// INI text: `[section]` headers, `key = value` lines, lists comma separated.
/// Unknown sections or keys are a config error.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Applies one `section.key=value` override.
void apply_override(ExperimentConfig& config, std::string_view assignment);
/// Canonical text form; parse_config(config_to_string(c)) reproduces c.
std::string config_to_string(const ExperimentConfig& config);
/// RP training settings: degrees, deltas and rule counts from [rp], the rest from [train] and [clustering].
RPTrainConfig effective_rp_config(const ExperimentConfig& config);
/// Training settings for learning-curve runs.
TrainConfig curve_train_config(const ExperimentConfig& config);
/// All accepted `section.key` names.
std::vector<std::string> config_keys();

}  // namespace it2pf
