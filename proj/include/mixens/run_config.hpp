#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mixens/core_data.hpp"
#include "mixens/mixture.hpp"

namespace mixens {

struct PredictorSource {
  PredictorId id;
  /// Path template relative to data_root; "{task}" expands to the task id.
  std::string file_template;
};

struct SplitSettings {
  double holdout_fraction = 0.1;  // share of each task used to train ensembles
  std::size_t k = 5;
  bool stratified = true;
  std::optional<std::uint64_t> seed;  // mandatory before any command runs
};

/// A named first-layer variant of the mixture: the bag plus a subset of its groups.
struct Strategy {
  std::string name;
  std::vector<std::string> groups;
};

struct RunConfig {
  std::vector<TaskSpec> tasks;
  std::filesystem::path data_root;
  std::vector<PredictorSource> predictors;  // in ranking order, best first
  std::string labels_template = "{task}/labels.csv";
  MixtureConfig mixture;
  std::vector<Strategy> strategies;  // empty: bag, then groups added one at a time
  SplitSettings splits;
  std::filesystem::path output_dir;

  std::filesystem::path predictor_path(const PredictorSource& p, const TaskSpec& task) const;
  std::filesystem::path labels_path(const TaskSpec& task) const;
  std::vector<PredictorId> predictor_ids() const;

  /// Seed after overrides; throws ConfigError when none was given.
  std::uint64_t seed() const;

  /// Strategies to report, resolving the cumulative default.
  std::vector<Strategy> resolved_strategies() const;

  /// Throws ConfigError for structural problems and FormatError naming the
  /// first referenced file that does not exist.
  void validate() const;
};

/// Relative data_root and output_dir resolve against the config file's directory.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir,
                           const std::string& source_name = "<config>");
RunConfig load_run_config(const std::filesystem::path& path);

std::string run_config_to_json(const RunConfig& config);

}  // namespace mixens
