#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mixens/core_data.hpp"

namespace mixens {

/// Parameters of the synthetic stand-in for a ladder of trained classifiers.
struct SynthSpec {
  std::string task_id = "task1";
  std::size_t n_samples = 5000;
  std::size_t class_count = 5;
  /// Target Top-1 accuracies, best first; each in (1/C, 1].
  std::vector<double> predictor_accuracies = default_accuracy_ladder();
  /// Probability that a predictor follows the shared per-sample error pattern.
  double correlation = 0.5;
  /// Mass on the predicted class is s / (s + C - 1) for a row of sharpness s.
  double sharpness = 6.0;
  /// Row sharpness is s * exp(jitter * z), z standard normal. 0 disables.
  double confidence_jitter = 0.5;
  /// Extra sharpness factor applied to wrong predictions (1 = no difference).
  double error_confidence = 0.5;
  /// Probability that a wrong prediction lands on the next class (y + 1) mod C
  /// rather than a uniformly drawn wrong class. Models confusions between
  /// adjacent values of an ordinal attribute. 0 gives uniform confusion.
  double neighbor_confusion = 0.8;
  std::uint64_t seed = 0;

  void validate() const;

  /// 15 accuracies evenly spaced from 0.92 down to 0.86.
  static std::vector<double> default_accuracy_ladder();
};

/// Per-sample draws shared by every predictor of a suite: the uniform that
/// decides correctness and the wrong class used when that draw fails.
struct SharedErrorPattern {
  std::vector<double> draw;
  std::vector<std::size_t> wrong_class;
};

struct ErrorModel {
  double correlation = 0.5;
  double sharpness = 6.0;
  double confidence_jitter = 0.5;
  double error_confidence = 0.5;
  double neighbor_confusion = 0.8;
};

/// Row sharpness floor; any value above 1 keeps the predicted class on top.
inline constexpr double kMinRowSharpness = 1.001;

/// Sample ids are zero-padded ("s0000".."s4999") so lexicographic order is index order.
std::vector<std::string> synth_sample_ids(std::size_t n);

/// Labels uniform over C classes.
LabelVector gen_labels(const SynthSpec& spec);

SharedErrorPattern gen_shared_pattern(const LabelVector& labels, std::uint64_t seed,
                                      double neighbor_confusion = 0.0);

/// One predictor: per sample it follows the shared pattern with probability
/// `model.correlation` (otherwise fresh draws), is correct when its draw is
/// below `target_accuracy`, and puts the row's sharpness mass on the
/// predicted class with the remainder spread evenly.
PredictionMatrix gen_predictor(const LabelVector& labels, const SharedErrorPattern& pattern,
                               const PredictorId& id, double target_accuracy,
                               const ErrorModel& model, std::uint64_t seed);

struct SynthSuite {
  LabelVector labels;
  std::vector<PredictionMatrix> predictors;  // "M1".."Mk", best first
};

/// Seeds: labels use derive_seed(seed, 0), the shared pattern derive_seed(seed, 1),
/// predictor Mi derive_seed(seed, 1 + i).
SynthSuite gen_suite(const SynthSpec& spec);

/// Multi-task fixture: task t (1-based, "task<t>") uses seed derive_seed(spec.seed, 1000 + t).
std::vector<SynthSuite> gen_tasks(const SynthSpec& spec, std::size_t n_tasks);

/// Writes `<out>/<task>/<predictor>.csv` and `<out>/<task>/labels.csv`.
void write_suite(const std::filesystem::path& out, const SynthSuite& suite);

}  // namespace mixens
