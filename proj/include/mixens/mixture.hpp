#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mixens/bagging.hpp"
#include "mixens/core_data.hpp"
#include "mixens/gbdt.hpp"

namespace mixens {

/// Id of the bagged first-layer predictor inside the second layer.
inline constexpr const char* kBagLayerId = "bag";

/// One boosted first-layer predictor: a named, possibly overlapping, subset of
/// base predictors whose concatenated outputs feed one booster.
struct GroupSpec {
  std::string name;
  std::vector<PredictorId> members;
  GbdtParams booster_params;

  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

struct MixtureConfig {
  std::vector<PredictorId> bag_members;
  WeightMode bag_weight_mode = EqualWeights{};
  std::vector<GroupSpec> groups;  // K groups, K >= 0
  WeightMode second_layer_mode = EqualWeights{};

  /// Throws ConfigError: empty bag, empty/duplicate group members, duplicate
  /// or reserved group names.
  void validate() const;

  /// bag(M1-M7) + Boosting(M1-M6) + Boosting(M1-M5) + Boosting(M8-M12), the
  /// two booster presets alternating across groups, equal weights in both layers.
  static MixtureConfig reference_layout();

  friend bool operator==(const MixtureConfig&, const MixtureConfig&) = default;
};

/// "M<first>".."M<last>" convenience for building groups.
std::vector<PredictorId> predictor_range(std::size_t first, std::size_t last,
                                         const std::string& prefix = "M");

struct MixtureModel {
  TaskSpec task;
  MixtureConfig config;
  VotingWeights first_layer_bag;
  std::vector<BoostedClassifier> boosted;  // parallel to config.groups
  VotingWeights second_layer;              // over "bag" + group names
};

/// Trains one booster per group on the concatenated member outputs.
/// Groups are independent; `threads` > 1 fits them concurrently.
std::vector<BoostedClassifier> fit_groups(std::span<const PredictionMatrix> train,
                                          const LabelVector& labels,
                                          std::span<const GroupSpec> groups,
                                          std::size_t threads = 1);

/// Builds the mixture from already-fitted group boosters (parallel to config.groups).
MixtureModel assemble_mixture(std::span<const PredictionMatrix> train, const LabelVector& labels,
                              const MixtureConfig& config, std::vector<BoostedClassifier> boosted);

MixtureModel fit_mixture(std::span<const PredictionMatrix> train, const LabelVector& labels,
                         const MixtureConfig& config, std::size_t threads = 1);

/// The K+1 first-layer outputs, renamed to "bag" and the group names.
std::vector<PredictionMatrix> layer_one_outputs(const MixtureModel& model,
                                                std::span<const PredictionMatrix> matrices);

PredictionMatrix predict_mixture(const MixtureModel& model,
                                 std::span<const PredictionMatrix> matrices);

/// Base-predictor outputs and labels of one task, predictors in rank order.
struct TaskData {
  TaskSpec task;
  std::vector<PredictionMatrix> predictions;
  LabelVector labels;
};

struct SweepPoint {
  std::size_t n = 0;
  double basic_precision = 0.0;
};

/// Equal-weight bag of the top N predictors for N = 1..n_max, scored by
/// basic precision over all tasks.
std::vector<SweepPoint> sweep_bagging(std::span<const TaskData> tasks, std::size_t n_max);

/// Directory layout: mixture.json plus one gbdt model file per group.
void save_mixture(const std::filesystem::path& dir, const MixtureModel& model);
MixtureModel load_mixture(const std::filesystem::path& dir);

}  // namespace mixens
