#include "mixens/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "json_util.hpp"
#include "mixens/errors.hpp"

namespace mixens {
namespace {

using nlohmann::json;

double gain_term(double g, double h, double lambda) {
  const double denom = h + lambda;
  return denom > 0.0 ? g * g / denom : 0.0;
}

bool better_gain(double candidate, double best) {
  return candidate > best + kGainTieTolerance * std::abs(best);
}

// Exact greedy builder. Columns are sorted once per feature matrix; every
// node keeps per-feature sample lists in ascending value order, and splitting
// partitions those lists stably.
class TreeBuilder {
 public:
  explicit TreeBuilder(const FeatureMatrix& x)
      : n_(x.n_samples()), d_(x.n_features()), columns_(n_ * d_), presorted_(d_) {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t f = 0; f < d_; ++f) columns_[f * n_ + i] = x.at(i, f);
    }
    for (std::size_t f = 0; f < d_; ++f) {
      auto& order = presorted_[f];
      order.resize(n_);
      std::iota(order.begin(), order.end(), std::uint32_t{0});
      const double* col = &columns_[f * n_];
      std::stable_sort(order.begin(), order.end(),
                       [col](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
    }
  }

  RegressionTree build(std::span<const double> grad, std::span<const double> hess,
                       const GbdtParams& params) const {
    if (n_ == 0) throw DegenerateInputError("cannot build a tree on zero samples");
    if (grad.size() != n_ || hess.size() != n_) {
      throw ShapeError("gradient/hessian length does not match sample count");
    }
    Node root;
    root.members.resize(n_);
    std::iota(root.members.begin(), root.members.end(), std::uint32_t{0});
    root.sorted = presorted_;
    std::vector<TreeNode> nodes;
    std::vector<char> goes_left(n_, 0);
    grow(nodes, std::move(root), 0, grad, hess, params, goes_left);
    return RegressionTree(std::move(nodes));
  }

 private:
  struct Node {
    std::vector<std::uint32_t> members;               // ascending sample index
    std::vector<std::vector<std::uint32_t>> sorted;   // per feature, ascending value
  };

  std::size_t grow(std::vector<TreeNode>& nodes, Node node, std::size_t depth,
                   std::span<const double> grad, std::span<const double> hess,
                   const GbdtParams& params, std::vector<char>& goes_left) const {
    const std::size_t index = nodes.size();
    nodes.emplace_back(LeafNode{});

    double g_sum = 0.0;
    double h_sum = 0.0;
    for (const auto i : node.members) {
      g_sum += grad[i];
      h_sum += hess[i];
    }

    bool found = false;
    double best_gain = 0.0;
    std::size_t best_feature = 0;
    double best_threshold = 0.0;
    if (depth < params.max_depth && node.members.size() >= 2) {
      for (std::size_t f = 0; f < d_; ++f) {
        const double* col = &columns_[f * n_];
        const auto& order = node.sorted[f];
        double gl = 0.0;
        double hl = 0.0;
        for (std::size_t j = 0; j + 1 < order.size(); ++j) {
          gl += grad[order[j]];
          hl += hess[order[j]];
          const double lo = col[order[j]];
          const double hi = col[order[j + 1]];
          if (!(lo < hi)) continue;
          const double hr = h_sum - hl;
          if (hl < params.min_hessian_sum || hr < params.min_hessian_sum) continue;
          const double gain = split_gain(gl, hl, g_sum - gl, hr, params);
          if (!found || better_gain(gain, best_gain)) {
            found = true;
            best_gain = gain;
            best_feature = f;
            best_threshold = 0.5 * (lo + hi);
            if (!(lo < best_threshold)) best_threshold = hi;
          }
        }
      }
    }

    if (!found || !(best_gain > 0.0)) {
      nodes[index] = LeafNode{leaf_weight(g_sum, h_sum, params)};
      return index;
    }

    const double* col = &columns_[best_feature * n_];
    Node left;
    Node right;
    for (const auto i : node.members) {
      const bool l = col[i] < best_threshold;
      goes_left[i] = l ? 1 : 0;
      (l ? left.members : right.members).push_back(i);
    }
    left.sorted.resize(d_);
    right.sorted.resize(d_);
    for (std::size_t f = 0; f < d_; ++f) {
      left.sorted[f].reserve(left.members.size());
      right.sorted[f].reserve(right.members.size());
      for (const auto i : node.sorted[f]) {
        (goes_left[i] ? left.sorted[f] : right.sorted[f]).push_back(i);
      }
    }
    node = Node{};  // release before recursing

    const std::size_t l = grow(nodes, std::move(left), depth + 1, grad, hess, params, goes_left);
    const std::size_t r = grow(nodes, std::move(right), depth + 1, grad, hess, params, goes_left);
    nodes[index] = SplitNode{best_feature, best_threshold, l, r};
    return index;
  }

  std::size_t n_;
  std::size_t d_;
  std::vector<double> columns_;  // column-major copy
  std::vector<std::vector<std::uint32_t>> presorted_;
};

json node_to_json(const RegressionTree& tree, std::size_t index) {
  const auto& node = tree.nodes()[index];
  if (const auto* leaf = std::get_if<LeafNode>(&node)) {
    return json{{"kind", "leaf"}, {"weight", leaf->weight}};
  }
  const auto& split = std::get<SplitNode>(node);
  return json{{"kind", "split"},
              {"feature", split.feature},
              {"threshold", split.threshold},
              {"children", json::array({node_to_json(tree, split.left),
                                        node_to_json(tree, split.right)})}};
}

std::size_t node_from_json(const json& j, std::vector<TreeNode>& nodes) {
  const std::size_t index = nodes.size();
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "leaf") {
    nodes.emplace_back(LeafNode{j.at("weight").get<double>()});
    return index;
  }
  if (kind != "split") throw FormatError("unknown tree node kind '" + kind + "'");
  const auto& children = j.at("children");
  if (!children.is_array() || children.size() != 2) {
    throw FormatError("split node needs exactly two children");
  }
  nodes.emplace_back(LeafNode{});
  const std::size_t l = node_from_json(children[0], nodes);
  const std::size_t r = node_from_json(children[1], nodes);
  nodes[index] = SplitNode{j.at("feature").get<std::size_t>(), j.at("threshold").get<double>(),
                           l, r};
  return index;
}

}  // namespace

void GbdtParams::validate() const {
  if (rounds > 1'000'000) throw ConfigError("rounds is unreasonably large");
  if (max_depth == 0) throw ConfigError("max_depth must be positive");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw ConfigError("learning_rate must lie in (0, 1]");
  }
  if (!(l2_lambda >= 0.0)) throw ConfigError("l2_lambda must be >= 0");
  if (!(gain_gamma >= 0.0)) throw ConfigError("gain_gamma must be >= 0");
  if (!(min_hessian_sum >= 0.0)) throw ConfigError("min_hessian_sum must be >= 0");
}

GbdtParams GbdtParams::deep_slow() {
  GbdtParams p;
  p.max_depth = 4;
  p.learning_rate = 0.05;
  p.rounds = 100;
  return p;
}

GbdtParams GbdtParams::shallow_fast() {
  GbdtParams p;
  p.max_depth = 2;
  p.learning_rate = 0.2;
  p.rounds = 60;
  return p;
}

RegressionTree::RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw FormatError("tree has no nodes");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (const auto* s = std::get_if<SplitNode>(&nodes_[i])) {
      if (s->left <= i || s->right <= i || s->left >= nodes_.size() ||
          s->right >= nodes_.size()) {
        throw FormatError("tree node " + std::to_string(i) + " has invalid children");
      }
    }
  }
}

double RegressionTree::evaluate(std::span<const double> x) const {
  std::size_t i = 0;
  while (true) {
    const auto& node = nodes_[i];
    if (const auto* leaf = std::get_if<LeafNode>(&node)) return leaf->weight;
    const auto& s = std::get<SplitNode>(node);
    i = x[s.feature] < s.threshold ? s.left : s.right;
  }
}

std::size_t RegressionTree::depth() const {
  // Children always follow their parent, so one forward pass suffices.
  std::vector<std::size_t> level(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (const auto* s = std::get_if<SplitNode>(&nodes_[i])) {
      level[s->left] = level[i] + 1;
      level[s->right] = level[i] + 1;
    }
  }
  return deepest;
}

std::size_t RegressionTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const auto& n) {
    return std::holds_alternative<LeafNode>(n);
  }));
}

std::size_t RegressionTree::max_feature_plus_one() const {
  std::size_t m = 0;
  for (const auto& n : nodes_) {
    if (const auto* s = std::get_if<SplitNode>(&n)) m = std::max(m, s->feature + 1);
  }
  return m;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  const double shift = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    out[k] = std::exp(logits[k] - shift);
    total += out[k];
  }
  for (auto& p : out) p /= total;
  return out;
}

GradHess grad_hess(std::span<const double> probs, std::size_t true_class) {
  if (true_class >= probs.size()) {
    throw IndexError("true class " + std::to_string(true_class) + " outside [0, " +
                     std::to_string(probs.size()) + ")");
  }
  GradHess gh{std::vector<double>(probs.size()), std::vector<double>(probs.size())};
  for (std::size_t k = 0; k < probs.size(); ++k) {
    gh.grad[k] = probs[k] - (k == true_class ? 1.0 : 0.0);
    gh.hess[k] = probs[k] * (1.0 - probs[k]);
  }
  return gh;
}

double split_gain(double gl, double hl, double gr, double hr, const GbdtParams& params) {
  const double lambda = params.l2_lambda;
  return 0.5 * (gain_term(gl, hl, lambda) + gain_term(gr, hr, lambda) -
                gain_term(gl + gr, hl + hr, lambda)) -
         params.gain_gamma;
}

double leaf_weight(double g_sum, double h_sum, const GbdtParams& params) {
  const double denom = h_sum + params.l2_lambda;
  return denom > 0.0 ? -g_sum / denom : 0.0;
}

RegressionTree build_tree(const FeatureMatrix& features, std::span<const double> grad,
                          std::span<const double> hess, const GbdtParams& params) {
  params.validate();
  for (const double h : hess) {
    if (!(h >= 0.0)) throw ConfigError("hessians must be nonnegative");
  }
  return TreeBuilder(features).build(grad, hess, params);
}

std::vector<double> BoostedClassifier::logits(std::span<const double> x) const {
  std::vector<double> z(task.class_count(), base_score);
  for (const auto& round : trees) {
    for (std::size_t k = 0; k < round.size(); ++k) {
      z[k] += params.learning_rate * round[k].evaluate(x);
    }
  }
  return z;
}

BoostedClassifier fit(const FeatureMatrix& features, const LabelVector& labels,
                      const GbdtParams& params, std::vector<PredictorId> group) {
  params.validate();
  require_aligned(features.sample_ids(), labels.sample_ids(), "boosting features/labels");
  const std::size_t n = features.n_samples();
  if (n == 0) throw DegenerateInputError("boosting needs at least one sample");
  const std::size_t c = labels.task().class_count();
  if (c < 2) throw ConfigError("boosting needs at least 2 classes");

  BoostedClassifier model{labels.task(), std::move(group), params, features.n_features(), 0.0,
                          {}};
  model.trees.reserve(params.rounds);

  const TreeBuilder builder(features);
  std::vector<double> logits(n * c, model.base_score);
  std::vector<double> probs(n * c);
  std::vector<double> grad(n);
  std::vector<double> hess(n);
  for (std::size_t t = 0; t < params.rounds; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = softmax(std::span<const double>(logits.data() + i * c, c));
      std::copy(p.begin(), p.end(), probs.begin() + static_cast<std::ptrdiff_t>(i * c));
    }
    std::vector<RegressionTree> round;
    round.reserve(c);
    for (std::size_t k = 0; k < c; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        const double p = probs[i * c + k];
        grad[i] = p - (labels[i] == k ? 1.0 : 0.0);
        hess[i] = p * (1.0 - p);
      }
      round.push_back(builder.build(grad, hess, params));
    }
    for (std::size_t k = 0; k < c; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        logits[i * c + k] += params.learning_rate * round[k].evaluate(features.row(i));
      }
    }
    model.trees.push_back(std::move(round));
  }
  return model;
}

PredictorId boost_output_id(const BoostedClassifier& model) {
  std::string id = "boost(";
  for (std::size_t i = 0; i < model.group.size(); ++i) {
    if (i > 0) id += ',';
    id += model.group[i].str();
  }
  return PredictorId(id + ")");
}

PredictionMatrix predict_proba(const BoostedClassifier& model, const FeatureMatrix& features) {
  return predict_proba(model, features, boost_output_id(model));
}

PredictionMatrix predict_proba(const BoostedClassifier& model, const FeatureMatrix& features,
                               PredictorId output_id) {
  if (features.n_features() != model.n_features) {
    throw ShapeError("model expects " + std::to_string(model.n_features) + " features, got " +
                     std::to_string(features.n_features()));
  }
  const std::size_t c = model.task.class_count();
  std::vector<double> probs;
  probs.reserve(features.n_samples() * c);
  for (std::size_t i = 0; i < features.n_samples(); ++i) {
    const auto p = softmax(model.logits(features.row(i)));
    probs.insert(probs.end(), p.begin(), p.end());
  }
  return {std::move(output_id), model.task, features.sample_ids(), std::move(probs)};
}

double mean_log_loss(const PredictionMatrix& probs, const LabelVector& labels) {
  require_aligned(probs.sample_ids(), labels.sample_ids(), "log loss");
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    total -= std::log(std::max(probs.at(i, labels[i]), 1e-15));
  }
  return total / static_cast<double>(labels.size());
}

std::string model_to_json(const BoostedClassifier& model) {
  json trees = json::array();
  for (const auto& round : model.trees) {
    json per_class = json::array();
    for (const auto& tree : round) per_class.push_back(node_to_json(tree, 0));
    trees.push_back(std::move(per_class));
  }
  json group = json::array();
  for (const auto& id : model.group) group.push_back(id.str());
  const json j{{"format_version", 1},
               {"task", {{"task_id", model.task.id()}, {"class_count", model.task.class_count()}}},
               {"group", std::move(group)},
               {"n_features", model.n_features},
               {"params", params_to_json(model.params)},
               {"base_score", model.base_score},
               {"trees", std::move(trees)}};
  return j.dump() + "\n";
}

BoostedClassifier model_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format_version").get<int>() != 1) {
      throw FormatError("unsupported model format_version");
    }
    const auto& t = j.at("task");
    TaskSpec task(t.at("task_id").get<std::string>(), t.at("class_count").get<std::size_t>());
    std::vector<PredictorId> group;
    for (const auto& id : j.at("group")) group.emplace_back(id.get<std::string>());
    BoostedClassifier model{task, std::move(group), params_from_json(j.at("params")),
                            j.at("n_features").get<std::size_t>(),
                            j.at("base_score").get<double>(), {}};
    for (const auto& round : j.at("trees")) {
      if (round.size() != task.class_count()) {
        throw FormatError("each boosting round needs one tree per class");
      }
      std::vector<RegressionTree> per_class;
      for (const auto& root : round) {
        std::vector<TreeNode> nodes;
        node_from_json(root, nodes);
        RegressionTree tree(std::move(nodes));
        if (tree.max_feature_plus_one() > model.n_features) {
          throw FormatError("tree references a feature beyond n_features");
        }
        per_class.push_back(std::move(tree));
      }
      model.trees.push_back(std::move(per_class));
    }
    return model;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const BoostedClassifier& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write model file '" + path.string() + "'");
  out << model_to_json(model);
}

BoostedClassifier load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open model file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace mixens
