#include "mixens/bagging.hpp"

#include <cmath>
#include <set>

#include "mixens/errors.hpp"
#include "mixens/eval.hpp"

namespace mixens {

std::string weight_mode_name(const WeightMode& mode) {
  struct Visitor {
    std::string operator()(const EqualWeights&) const { return "equal"; }
    std::string operator()(const AccuracyProportional&) const { return "accuracy"; }
    std::string operator()(const ExplicitWeights&) const { return "explicit"; }
  };
  return std::visit(Visitor{}, mode);
}

namespace {

double checked_total(const std::vector<VotingWeights::Entry>& entries) {
  if (entries.empty()) throw ConfigError("voting weights need at least one predictor");
  std::set<PredictorId> seen;
  double total = 0.0;
  for (const auto& e : entries) {
    if (!seen.insert(e.predictor).second) {
      throw ConfigError("predictor '" + e.predictor.str() + "' listed twice in voting weights");
    }
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
      throw ConfigError("negative or non-finite voting weight for '" + e.predictor.str() + "'");
    }
    total += e.weight;
  }
  if (!(total > 0.0)) throw ConfigError("degenerate voting weights: all zero");
  return total;
}

}  // namespace

VotingWeights VotingWeights::normalized(std::vector<Entry> raw) {
  const double total = checked_total(raw);
  for (auto& e : raw) e.weight /= total;
  return VotingWeights(std::move(raw));
}

VotingWeights VotingWeights::restore(std::vector<Entry> entries) {
  const double total = checked_total(entries);
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("stored voting weights do not sum to 1");
  return VotingWeights(std::move(entries));
}

std::vector<PredictorId> VotingWeights::predictors() const {
  std::vector<PredictorId> ids;
  ids.reserve(entries_.size());
  for (const auto& e : entries_) ids.push_back(e.predictor);
  return ids;
}

VotingWeights tune_weights(std::span<const PredictionMatrix> matrices, const LabelVector* labels,
                           const WeightMode& mode) {
  if (matrices.empty()) throw ConfigError("no predictors to weight");
  for (const auto& m : matrices) {
    require_aligned(matrices.front().sample_ids(), m.sample_ids(),
                    "weight tuning " + m.predictor().str());
  }
  std::vector<VotingWeights::Entry> raw;
  raw.reserve(matrices.size());

  if (std::holds_alternative<EqualWeights>(mode)) {
    for (const auto& m : matrices) raw.push_back({m.predictor(), 1.0});
  } else if (std::holds_alternative<AccuracyProportional>(mode)) {
    if (labels == nullptr) throw ConfigError("accuracy-proportional weights need labels");
    for (const auto& m : matrices) {
      require_aligned(m.sample_ids(), labels->sample_ids(),
                      "weight tuning labels/" + m.predictor().str());
      raw.push_back({m.predictor(), top1_accuracy(argmax_labels(m), *labels)});
    }
    double total = 0.0;
    for (const auto& e : raw) total += e.weight;
    if (total == 0.0) {
      throw ConfigError("degenerate weights: every predictor has zero accuracy");
    }
  } else {
    const auto& values = std::get<ExplicitWeights>(mode).values;
    if (values.size() != matrices.size()) {
      throw ConfigError("explicit weight list has " + std::to_string(values.size()) +
                        " entries for " + std::to_string(matrices.size()) + " predictors");
    }
    for (std::size_t i = 0; i < matrices.size(); ++i) {
      raw.push_back({matrices[i].predictor(), values[i]});
    }
  }
  return VotingWeights::normalized(std::move(raw));
}

PredictorId bag_output_id(const VotingWeights& weights) {
  std::string id = "bag(";
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (i > 0) id += ',';
    id += weights.entries()[i].predictor.str();
  }
  id += ')';
  return PredictorId(id);
}

PredictionMatrix bag_predict(std::span<const PredictionMatrix> matrices,
                             const VotingWeights& weights) {
  if (matrices.size() != weights.size()) {
    throw ConfigError("bagging got " + std::to_string(matrices.size()) + " predictors but " +
                      std::to_string(weights.size()) + " weights");
  }
  std::vector<const PredictionMatrix*> ordered;
  ordered.reserve(weights.size());
  for (const auto& e : weights.entries()) {
    const PredictionMatrix* found = nullptr;
    for (const auto& m : matrices) {
      if (m.predictor() == e.predictor) found = &m;
    }
    if (found == nullptr) {
      throw ConfigError("no predictions supplied for weighted predictor '" + e.predictor.str() +
                        "'");
    }
    ordered.push_back(found);
  }
  const PredictionMatrix& first = *ordered.front();
  for (const auto* m : ordered) {
    if (!(m->task() == first.task())) throw AlignmentError("bagging across different tasks");
    require_aligned(first.sample_ids(), m->sample_ids(), "bagging " + m->predictor().str());
  }

  // Fixed accumulation order (weight order, then left to right) keeps the
  // output independent of how rows are scheduled.
  std::vector<double> out(first.probs().size(), 0.0);
  for (std::size_t j = 0; j < ordered.size(); ++j) {
    const double w = weights.entries()[j].weight;
    const auto probs = ordered[j]->probs();
    for (std::size_t t = 0; t < out.size(); ++t) out[t] += w * probs[t];
  }
  return {bag_output_id(weights), first.task(), first.sample_ids(), std::move(out)};
}

}  // namespace mixens
