#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mixens/core_data.hpp"

namespace mixens {

double top1_accuracy(const LabelVector& predicted, const LabelVector& truth);

/// Unweighted mean of per-task accuracies. Throws ConfigError when empty.
double basic_precision(std::span<const double> task_accuracies);

/// Fraction of positions where the two label vectors differ.
double disagreement(const LabelVector& a, const LabelVector& b);

struct MetricsReport {
  std::map<std::string, double> per_task_accuracy;
  double basic_precision = 0.0;

  static MetricsReport from_tasks(std::map<std::string, double> per_task_accuracy);
};

/// `task_id,accuracy` rows (sorted by task id) followed by `__basic_precision__`.
void write_metrics_csv(std::ostream& out, const MetricsReport& report);
std::string metrics_json(const MetricsReport& report);

struct HoldoutSplit {
  std::vector<std::string> train_ids;  // sorted
  std::vector<std::string> held_ids;   // sorted
};

/// Stratified holdout. The held-out count is round(fraction * n), allocated to
/// classes by largest remainder (ties to the lower class index), with every
/// class of >= 2 samples keeping at least one training sample.
HoldoutSplit holdout_split(const LabelVector& labels, double fraction, std::uint64_t seed);

struct FoldAssignment {
  std::size_t k = 0;
  std::vector<std::size_t> fold_of;  // parallel to the labels' sample ids
  std::uint64_t seed = 0;

  std::vector<std::size_t> fold_sizes() const;
  /// Sample positions (ascending) in fold `f`, or outside it when `complement`.
  std::vector<std::size_t> members(std::size_t f, bool complement = false) const;
};

/// k-fold assignment. Samples are shuffled (within class when stratified),
/// concatenated class by class and dealt round-robin, which keeps fold sizes
/// and per-class counts within 1 of each other.
FoldAssignment kfold_split(const LabelVector& labels, std::size_t k, std::uint64_t seed,
                           bool stratified);

/// Ids at the given positions of `ids`.
std::vector<std::string> ids_at(const std::vector<std::string>& ids,
                                std::span<const std::size_t> positions);

}  // namespace mixens
