#pragma once

#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mixens/core_data.hpp"

namespace mixens {

struct EqualWeights {
  friend bool operator==(const EqualWeights&, const EqualWeights&) = default;
};
/// weight_i proportional to the Top-1 accuracy of predictor i on the tuning labels.
struct AccuracyProportional {
  friend bool operator==(const AccuracyProportional&, const AccuracyProportional&) = default;
};
struct ExplicitWeights {
  std::vector<double> values;
  friend bool operator==(const ExplicitWeights&, const ExplicitWeights&) = default;
};

using WeightMode = std::variant<EqualWeights, AccuracyProportional, ExplicitWeights>;

std::string weight_mode_name(const WeightMode& mode);

/// Normalized nonnegative voting weights, one per predictor, in voting order.
class VotingWeights {
 public:
  struct Entry {
    PredictorId predictor;
    double weight = 0.0;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  /// Normalizes `raw` to sum 1. Throws ConfigError on negative weights,
  /// all-zero weights or duplicate predictor ids.
  static VotingWeights normalized(std::vector<Entry> raw);

  /// Adopts already-normalized weights verbatim (sum must be 1 within 1e-9).
  static VotingWeights restore(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::vector<PredictorId> predictors() const;

  friend bool operator==(const VotingWeights&, const VotingWeights&) = default;

 private:
  explicit VotingWeights(std::vector<Entry> entries) : entries_(std::move(entries)) {}
  std::vector<Entry> entries_;
};

/// Derives voting weights for `matrices` (in the given order).
/// `labels` is only consulted by AccuracyProportional.
VotingWeights tune_weights(std::span<const PredictionMatrix> matrices, const LabelVector* labels,
                           const WeightMode& mode);

/// Soft voting: per row, sum_i w_i * probs_i accumulated left to right in
/// weight order. `matrices` may be in any order but must cover exactly the
/// weighted predictors.
PredictionMatrix bag_predict(std::span<const PredictionMatrix> matrices,
                             const VotingWeights& weights);

/// Synthetic id "bag(M1,M2,...)" for a bagged output.
PredictorId bag_output_id(const VotingWeights& weights);

}  // namespace mixens
