#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace mixens {

/// Rows of a prediction matrix must sum to 1 within this tolerance.
inline constexpr double kRowSumTolerance = 1e-6;

/// Significant decimal digits used when probabilities are written to CSV.
inline constexpr int kProbabilityDigits = 9;

/// One classification task: an identifier and its class count (C >= 2).
class TaskSpec {
 public:
  TaskSpec(std::string task_id, std::size_t class_count);

  const std::string& id() const noexcept { return id_; }
  std::size_t class_count() const noexcept { return class_count_; }

  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;

 private:
  std::string id_;
  std::size_t class_count_;
};

/// Name of a base predictor ("M1".."M15") or of a synthetic ensemble output.
class PredictorId {
 public:
  PredictorId() = default;
  explicit PredictorId(std::string value) : value_(std::move(value)) {}

  const std::string& str() const noexcept { return value_; }

  friend auto operator<=>(const PredictorId&, const PredictorId&) = default;
  friend bool operator==(const PredictorId&, const PredictorId&) = default;

 private:
  std::string value_;
};

std::vector<PredictorId> to_predictor_ids(const std::vector<std::string>& names);

/// Per-sample class probabilities emitted by one predictor for one task.
///
/// Invariants checked at construction: at least one row, sample ids strictly
/// increasing, entries non-negative and every row summing to 1 within
/// kRowSumTolerance. Rows are never renormalized.
class PredictionMatrix {
 public:
  PredictionMatrix(PredictorId predictor, TaskSpec task,
                   std::vector<std::string> sample_ids,
                   std::vector<double> probs);

  /// Same as the constructor but sorts rows by sample id first.
  static PredictionMatrix from_unsorted(PredictorId predictor, TaskSpec task,
                                        std::vector<std::string> sample_ids,
                                        std::vector<double> probs);

  const PredictorId& predictor() const noexcept { return predictor_; }
  const TaskSpec& task() const noexcept { return task_; }
  const std::vector<std::string>& sample_ids() const noexcept { return sample_ids_; }
  std::size_t n_samples() const noexcept { return sample_ids_.size(); }
  std::size_t class_count() const noexcept { return task_.class_count(); }

  std::span<const double> row(std::size_t i) const {
    return {probs_.data() + i * class_count(), class_count()};
  }
  double at(std::size_t i, std::size_t k) const { return probs_[i * class_count() + k]; }
  std::span<const double> probs() const noexcept { return probs_; }

  PredictionMatrix renamed(PredictorId id) const;

 private:
  PredictorId predictor_;
  TaskSpec task_;
  std::vector<std::string> sample_ids_;
  std::vector<double> probs_;
};

/// Ground-truth (or predicted) class index per sample.
class LabelVector {
 public:
  LabelVector(TaskSpec task, std::vector<std::string> sample_ids,
              std::vector<std::size_t> labels);

  static LabelVector from_unsorted(TaskSpec task, std::vector<std::string> sample_ids,
                                   std::vector<std::size_t> labels);

  const TaskSpec& task() const noexcept { return task_; }
  const std::vector<std::string>& sample_ids() const noexcept { return sample_ids_; }
  const std::vector<std::size_t>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t operator[](std::size_t i) const { return labels_[i]; }

 private:
  TaskSpec task_;
  std::vector<std::string> sample_ids_;
  std::vector<std::size_t> labels_;
};

struct ColumnOrigin {
  PredictorId predictor;
  std::size_t class_index = 0;

  friend bool operator==(const ColumnOrigin&, const ColumnOrigin&) = default;
};

/// Dense row-major feature matrix built by concatenating predictor outputs.
class FeatureMatrix {
 public:
  FeatureMatrix(std::vector<std::string> sample_ids, std::size_t n_features,
                std::vector<double> values, std::vector<ColumnOrigin> column_origin);

  const std::vector<std::string>& sample_ids() const noexcept { return sample_ids_; }
  std::size_t n_samples() const noexcept { return sample_ids_.size(); }
  std::size_t n_features() const noexcept { return n_features_; }
  double at(std::size_t i, std::size_t j) const { return values_[i * n_features_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * n_features_, n_features_};
  }
  const std::vector<ColumnOrigin>& column_origin() const noexcept { return column_origin_; }

 private:
  std::vector<std::string> sample_ids_;
  std::size_t n_features_;
  std::vector<double> values_;
  std::vector<ColumnOrigin> column_origin_;
};

// ---------------------------------------------------------------------------
// CSV I/O. Predictions: header `sample_id,c0,...,c{C-1}`. Labels: header
// `sample_id,label`. LF line endings, probabilities written with
// kProbabilityDigits significant digits.

PredictionMatrix read_predictions(std::istream& in, const TaskSpec& task,
                                  const PredictorId& predictor,
                                  const std::string& source_name = "<stream>");
PredictionMatrix load_predictions(const std::filesystem::path& path, const TaskSpec& task,
                                  const PredictorId& predictor);
void write_predictions(std::ostream& out, const PredictionMatrix& m);
void save_predictions(const std::filesystem::path& path, const PredictionMatrix& m);

LabelVector read_labels(std::istream& in, const TaskSpec& task,
                        const std::string& source_name = "<stream>");
LabelVector load_labels(const std::filesystem::path& path, const TaskSpec& task);
void write_labels(std::ostream& out, const LabelVector& labels);
void save_labels(const std::filesystem::path& path, const LabelVector& labels);

std::string format_probability(double p);

// ---------------------------------------------------------------------------

/// Throws AlignmentError unless both id lists are identical.
void require_aligned(const std::vector<std::string>& a, const std::vector<std::string>& b,
                     const std::string& what);

/// Locates `id` among `matrices`; throws MissingPredictorError if absent.
const PredictionMatrix& find_predictor(std::span<const PredictionMatrix> matrices,
                                       const PredictorId& id);

/// Concatenates the probability rows of `group` members, in group order.
FeatureMatrix concat_features(std::span<const PredictionMatrix> matrices,
                              std::span<const PredictorId> group);

/// Top-1 class per row; ties go to the lowest class index.
LabelVector argmax_labels(const PredictionMatrix& m);
std::size_t argmax(std::span<const double> row);

/// Restricts to `ids` (sorted, each present in the source). Throws AlignmentError otherwise.
PredictionMatrix select_samples(const PredictionMatrix& m, const std::vector<std::string>& ids);
LabelVector select_samples(const LabelVector& labels, const std::vector<std::string>& ids);

}  // namespace mixens

template <>
struct std::hash<mixens::PredictorId> {
  std::size_t operator()(const mixens::PredictorId& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};
