#include "mixens/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "mixens/errors.hpp"
#include "mixens/rng.hpp"

namespace mixens {
namespace {

std::size_t count_matches(const LabelVector& a, const LabelVector& b, const char* what) {
  require_aligned(a.sample_ids(), b.sample_ids(), what);
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += (a[i] == b[i]) ? 1 : 0;
  return same;
}

// Positions of each class, in sample order.
std::vector<std::vector<std::size_t>> positions_by_class(const LabelVector& labels) {
  std::vector<std::vector<std::size_t>> by_class(labels.task().class_count());
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  return by_class;
}

}  // namespace

double top1_accuracy(const LabelVector& predicted, const LabelVector& truth) {
  if (truth.size() == 0) throw DegenerateInputError("accuracy of an empty label vector");
  const auto same = count_matches(predicted, truth, "top1 accuracy");
  return static_cast<double>(same) / static_cast<double>(truth.size());
}

double basic_precision(std::span<const double> task_accuracies) {
  if (task_accuracies.empty()) throw ConfigError("basic precision needs at least one task");
  double sum = 0.0;
  for (const double a : task_accuracies) sum += a;
  return sum / static_cast<double>(task_accuracies.size());
}

double disagreement(const LabelVector& a, const LabelVector& b) {
  if (a.size() == 0) throw DegenerateInputError("disagreement of empty label vectors");
  const auto same = count_matches(a, b, "disagreement");
  return static_cast<double>(a.size() - same) / static_cast<double>(a.size());
}

MetricsReport MetricsReport::from_tasks(std::map<std::string, double> per_task_accuracy) {
  std::vector<double> values;
  values.reserve(per_task_accuracy.size());
  for (const auto& [task, acc] : per_task_accuracy) values.push_back(acc);
  MetricsReport report;
  report.basic_precision = mixens::basic_precision(values);
  report.per_task_accuracy = std::move(per_task_accuracy);
  return report;
}

void write_metrics_csv(std::ostream& out, const MetricsReport& report) {
  std::string text = "task_id,accuracy\n";
  for (const auto& [task, acc] : report.per_task_accuracy) {
    text += task + "," + format_probability(acc) + "\n";
  }
  text += "__basic_precision__," + format_probability(report.basic_precision) + "\n";
  out << text;
}

std::string metrics_json(const MetricsReport& report) {
  nlohmann::json j;
  j["per_task_accuracy"] = report.per_task_accuracy;
  j["basic_precision"] = report.basic_precision;
  return j.dump(2) + "\n";
}

HoldoutSplit holdout_split(const LabelVector& labels, double fraction, std::uint64_t seed) {
  const std::size_t n = labels.size();
  if (n == 0) throw DegenerateInputError("holdout split of an empty sample set");
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ConfigError("holdout fraction must lie in (0, 1)");
  }
  if (fraction * static_cast<double>(n) < 1.0) {
    throw ConfigError("holdout fraction leaves no sample out (fraction * n < 1)");
  }

  const auto by_class = positions_by_class(labels);
  const std::size_t n_classes = by_class.size();
  const auto target = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));

  std::vector<std::size_t> quota(n_classes, 0);
  std::vector<std::size_t> cap(n_classes, 0);
  std::vector<double> remainder(n_classes, 0.0);
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    const std::size_t size = by_class[c].size();
    cap[c] = size >= 2 ? size - 1 : size;
    const double ideal = fraction * static_cast<double>(size);
    const auto base = static_cast<std::size_t>(std::floor(ideal + 1e-9));
    quota[c] = std::min(base, cap[c]);
    remainder[c] = ideal - static_cast<double>(base);
    assigned += quota[c];
  }

  std::vector<std::size_t> order(n_classes);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  bool progress = true;
  while (assigned < target && progress) {
    progress = false;
    for (const auto c : order) {
      if (assigned == target) break;
      if (quota[c] < cap[c]) {
        ++quota[c];
        ++assigned;
        progress = true;
      }
    }
  }

  Rng rng(seed);
  std::vector<bool> held(n, false);
  for (std::size_t c = 0; c < n_classes; ++c) {
    auto members = by_class[c];
    rng.shuffle(members);
    for (std::size_t j = 0; j < quota[c]; ++j) held[members[j]] = true;
  }

  HoldoutSplit split;
  for (std::size_t i = 0; i < n; ++i) {
    (held[i] ? split.held_ids : split.train_ids).push_back(labels.sample_ids()[i]);
  }
  return split;
}

std::vector<std::size_t> FoldAssignment::fold_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (const auto f : fold_of) ++sizes[f];
  return sizes;
}

std::vector<std::size_t> FoldAssignment::members(std::size_t f, bool complement) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if ((fold_of[i] == f) != complement) out.push_back(i);
  }
  return out;
}

FoldAssignment kfold_split(const LabelVector& labels, std::size_t k, std::uint64_t seed,
                           bool stratified) {
  const std::size_t n = labels.size();
  if (k < 2) throw ConfigError("k-fold needs k >= 2");
  if (k > n) {
    throw ConfigError("k-fold with k=" + std::to_string(k) + " exceeds sample count " +
                      std::to_string(n));
  }
  Rng rng(seed);
  std::vector<std::size_t> sequence;
  sequence.reserve(n);
  if (stratified) {
    for (auto members : positions_by_class(labels)) {
      rng.shuffle(members);
      sequence.insert(sequence.end(), members.begin(), members.end());
    }
  } else {
    sequence.resize(n);
    std::iota(sequence.begin(), sequence.end(), std::size_t{0});
    rng.shuffle(sequence);
  }
  FoldAssignment folds;
  folds.k = k;
  folds.seed = seed;
  folds.fold_of.assign(n, 0);
  for (std::size_t j = 0; j < n; ++j) folds.fold_of[sequence[j]] = j % k;
  return folds;
}

std::vector<std::string> ids_at(const std::vector<std::string>& ids,
                                std::span<const std::size_t> positions) {
  std::vector<std::string> out;
  out.reserve(positions.size());
  for (const auto p : positions) out.push_back(ids.at(p));
  return out;
}

}  // namespace mixens
