#include "mixens/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "mixens/errors.hpp"
#include "mixens/rng.hpp"

namespace mixens {

std::vector<double> SynthSpec::default_accuracy_ladder() {
  std::vector<double> acc(15);
  for (std::size_t i = 0; i < acc.size(); ++i) {
    acc[i] = 0.92 - 0.06 * static_cast<double>(i) / 14.0;
  }
  return acc;
}

void SynthSpec::validate() const {
  TaskSpec(task_id, class_count);  // enforces C >= 2
  if (n_samples == 0) throw ConfigError("synthetic suite needs at least one sample");
  if (predictor_accuracies.empty()) throw ConfigError("synthetic suite needs predictors");
  const double chance = 1.0 / static_cast<double>(class_count);
  for (std::size_t i = 0; i < predictor_accuracies.size(); ++i) {
    const double a = predictor_accuracies[i];
    if (!(a > chance && a <= 1.0)) {
      throw ConfigError("predictor accuracy " + std::to_string(a) + " outside (1/C, 1]");
    }
    if (i > 0 && a > predictor_accuracies[i - 1]) {
      throw ConfigError("predictor accuracies must be sorted best first");
    }
  }
  if (!(correlation >= 0.0 && correlation <= 1.0)) throw ConfigError("correlation outside [0, 1]");
  if (!(sharpness > 0.0)) throw ConfigError("sharpness must be positive");
  if (!(confidence_jitter >= 0.0)) throw ConfigError("confidence_jitter must be >= 0");
  if (!(error_confidence > 0.0)) throw ConfigError("error_confidence must be positive");
  if (!(neighbor_confusion >= 0.0 && neighbor_confusion <= 1.0)) {
    throw ConfigError("neighbor_confusion outside [0, 1]");
  }
}

std::vector<std::string> synth_sample_ids(std::size_t n) {
  const int width = static_cast<int>(std::to_string(n > 0 ? n - 1 : 0).size());
  std::vector<std::string> ids;
  ids.reserve(n);
  char buf[32];
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "s%0*zu", width, i);
    ids.emplace_back(buf);
  }
  return ids;
}

LabelVector gen_labels(const SynthSpec& spec) {
  TaskSpec task(spec.task_id, spec.class_count);
  Rng rng(derive_seed(spec.seed, 0));
  std::vector<std::size_t> labels(spec.n_samples);
  for (auto& y : labels) y = static_cast<std::size_t>(rng.below(spec.class_count));
  return {task, synth_sample_ids(spec.n_samples), std::move(labels)};
}

namespace {

// Two draws always, so the stream position never depends on the outcome.
std::size_t draw_wrong_class(Rng& rng, std::size_t truth, std::size_t c, double neighbor_rate) {
  const bool neighbor = rng.uniform01() < neighbor_rate;
  const auto k = static_cast<std::size_t>(rng.below(c - 1));
  if (neighbor) return (truth + 1) % c;
  return k >= truth ? k + 1 : k;
}

}  // namespace

SharedErrorPattern gen_shared_pattern(const LabelVector& labels, std::uint64_t seed,
                                      double neighbor_confusion) {
  if (!(neighbor_confusion >= 0.0 && neighbor_confusion <= 1.0)) {
    throw ConfigError("neighbor_confusion outside [0, 1]");
  }
  Rng rng(seed);
  const std::size_t c = labels.task().class_count();
  SharedErrorPattern pattern;
  pattern.draw.resize(labels.size());
  pattern.wrong_class.resize(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    pattern.draw[i] = rng.uniform01();
    pattern.wrong_class[i] = draw_wrong_class(rng, labels[i], c, neighbor_confusion);
  }
  return pattern;
}

PredictionMatrix gen_predictor(const LabelVector& labels, const SharedErrorPattern& pattern,
                               const PredictorId& id, double target_accuracy,
                               const ErrorModel& model, std::uint64_t seed) {
  const std::size_t c = labels.task().class_count();
  const std::size_t n = labels.size();
  if (!(target_accuracy > 1.0 / static_cast<double>(c) && target_accuracy <= 1.0)) {
    throw ConfigError("target accuracy must lie in (1/C, 1]");
  }
  if (pattern.draw.size() != n || pattern.wrong_class.size() != n) {
    throw ShapeError("shared error pattern does not match the label vector");
  }
  Rng rng(seed);
  std::vector<double> probs(n * c);
  for (std::size_t i = 0; i < n; ++i) {
    // Fixed number of draws per sample regardless of branch.
    const bool shared = rng.uniform01() < model.correlation;
    const double own_draw = rng.uniform01();
    const std::size_t own_wrong = draw_wrong_class(rng, labels[i], c, model.neighbor_confusion);
    const double z = rng.normal();

    const double draw = shared ? pattern.draw[i] : own_draw;
    const bool correct = draw < target_accuracy;
    const std::size_t predicted =
        correct ? labels[i] : (shared ? pattern.wrong_class[i] : own_wrong);

    double s = model.sharpness * std::exp(model.confidence_jitter * z);
    if (!correct) s *= model.error_confidence;
    // Keep the predicted class the strict argmax of its row.
    s = std::max(s, kMinRowSharpness);
    const double top = s / (s + static_cast<double>(c - 1));
    const double rest = (1.0 - top) / static_cast<double>(c - 1);
    for (std::size_t k = 0; k < c; ++k) probs[i * c + k] = (k == predicted) ? top : rest;
  }
  return {id, labels.task(), labels.sample_ids(), std::move(probs)};
}

SynthSuite gen_suite(const SynthSpec& spec) {
  spec.validate();
  auto labels = gen_labels(spec);
  const auto pattern =
      gen_shared_pattern(labels, derive_seed(spec.seed, 1), spec.neighbor_confusion);
  const ErrorModel model{spec.correlation, spec.sharpness, spec.confidence_jitter,
                         spec.error_confidence, spec.neighbor_confusion};
  std::vector<PredictionMatrix> predictors;
  predictors.reserve(spec.predictor_accuracies.size());
  for (std::size_t i = 0; i < spec.predictor_accuracies.size(); ++i) {
    predictors.push_back(gen_predictor(labels, pattern, PredictorId("M" + std::to_string(i + 1)),
                                       spec.predictor_accuracies[i], model,
                                       derive_seed(spec.seed, 2 + i)));
  }
  return {std::move(labels), std::move(predictors)};
}

std::vector<SynthSuite> gen_tasks(const SynthSpec& spec, std::size_t n_tasks) {
  std::vector<SynthSuite> suites;
  suites.reserve(n_tasks);
  for (std::size_t t = 1; t <= n_tasks; ++t) {
    SynthSpec task_spec = spec;
    task_spec.task_id = "task" + std::to_string(t);
    task_spec.seed = derive_seed(spec.seed, 1000 + t);
    suites.push_back(gen_suite(task_spec));
  }
  return suites;
}

void write_suite(const std::filesystem::path& out, const SynthSuite& suite) {
  const auto dir = out / suite.labels.task().id();
  std::filesystem::create_directories(dir);
  save_labels(dir / "labels.csv", suite.labels);
  for (const auto& m : suite.predictors) save_predictions(dir / (m.predictor().str() + ".csv"), m);
}

}  // namespace mixens
