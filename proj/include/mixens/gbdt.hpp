#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "mixens/core_data.hpp"

namespace mixens {

/// Hyperparameters of the second-order multiclass tree booster.
struct GbdtParams {
  std::size_t rounds = 50;
  std::size_t max_depth = 3;
  double learning_rate = 0.1;  // in (0, 1]
  double l2_lambda = 1.0;      // >= 0
  double gain_gamma = 0.0;     // >= 0
  double min_hessian_sum = 1e-3;
  std::uint64_t seed = 0;  // reserved; exact greedy training is not randomized

  /// Throws ConfigError when a field is out of range.
  void validate() const;

  /// depth 4, eta 0.05, 100 rounds.
  static GbdtParams deep_slow();
  /// depth 2, eta 0.2, 60 rounds.
  static GbdtParams shallow_fast();

  friend bool operator==(const GbdtParams&, const GbdtParams&) = default;
};

struct SplitNode {
  std::size_t feature = 0;
  double threshold = 0.0;
  std::size_t left = 0;   // index into RegressionTree::nodes
  std::size_t right = 0;
  friend bool operator==(const SplitNode&, const SplitNode&) = default;
};

struct LeafNode {
  double weight = 0.0;
  friend bool operator==(const LeafNode&, const LeafNode&) = default;
};

using TreeNode = std::variant<SplitNode, LeafNode>;

/// Binary regression tree stored as a node array with the root at index 0.
/// Routing is strict: feature < threshold goes left, everything else right.
class RegressionTree {
 public:
  RegressionTree() : nodes_{LeafNode{0.0}} {}
  explicit RegressionTree(std::vector<TreeNode> nodes);

  static RegressionTree leaf(double weight) { return RegressionTree({LeafNode{weight}}); }

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  const TreeNode& root() const { return nodes_.front(); }

  double evaluate(std::span<const double> x) const;
  std::size_t depth() const;
  std::size_t leaf_count() const;
  /// Largest feature index referenced by a split, or nothing for a single leaf.
  std::size_t max_feature_plus_one() const;

  friend bool operator==(const RegressionTree&, const RegressionTree&) = default;

 private:
  std::vector<TreeNode> nodes_;
};

/// Numerically stable softmax (max-shifted).
std::vector<double> softmax(std::span<const double> logits);

struct GradHess {
  std::vector<double> grad;
  std::vector<double> hess;
};

/// First and diagonal second derivatives of softmax cross-entropy w.r.t. the
/// logits: g_k = p_k - [k == y], h_k = p_k (1 - p_k).
GradHess grad_hess(std::span<const double> probs, std::size_t true_class);

/// Regularized second-order split gain:
///   0.5 * [GL^2/(HL+l) + GR^2/(HR+l) - (GL+GR)^2/(HL+HR+l)] - gamma.
/// A term whose denominator is not positive contributes 0.
double split_gain(double gl, double hl, double gr, double hr, const GbdtParams& params);

/// Optimal leaf value -G/(H + lambda); 0 when the denominator is not positive.
double leaf_weight(double g_sum, double h_sum, const GbdtParams& params);

/// Two split gains closer than this (relative) count as equal, and the
/// earlier candidate (lower feature, then lower threshold) is kept.
inline constexpr double kGainTieTolerance = 1e-12;

/// Exact greedy tree on (g, h): every feature, every midpoint between
/// consecutive distinct values. Throws DegenerateInputError on zero samples.
RegressionTree build_tree(const FeatureMatrix& features, std::span<const double> grad,
                          std::span<const double> hess, const GbdtParams& params);

/// Multiclass boosted tree ensemble trained on concatenated probabilities.
struct BoostedClassifier {
  TaskSpec task;
  std::vector<PredictorId> group;
  GbdtParams params;
  std::size_t n_features = 0;
  double base_score = 0.0;
  /// trees[round][class]
  std::vector<std::vector<RegressionTree>> trees;

  /// Raw class logits: base_score + eta * sum_t tree[t][k](x).
  std::vector<double> logits(std::span<const double> x) const;

  friend bool operator==(const BoostedClassifier&, const BoostedClassifier&) = default;
};

BoostedClassifier fit(const FeatureMatrix& features, const LabelVector& labels,
                      const GbdtParams& params, std::vector<PredictorId> group = {});

/// Synthetic id "boost(M1,M2,...)" for a model's output.
PredictorId boost_output_id(const BoostedClassifier& model);

PredictionMatrix predict_proba(const BoostedClassifier& model, const FeatureMatrix& features);
PredictionMatrix predict_proba(const BoostedClassifier& model, const FeatureMatrix& features,
                               PredictorId output_id);

/// Mean negative log-likelihood of the true classes (probabilities floored at 1e-15).
double mean_log_loss(const PredictionMatrix& probs, const LabelVector& labels);

// Model files: JSON, keys in canonical (sorted) order, format_version 1.
std::string model_to_json(const BoostedClassifier& model);
BoostedClassifier model_from_json(std::string_view text);
void save_model(const std::filesystem::path& path, const BoostedClassifier& model);
BoostedClassifier load_model(const std::filesystem::path& path);

}  // namespace mixens
