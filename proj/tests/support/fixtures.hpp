#pragma once

// Small deterministic fixtures shared by the unit and acceptance suites.

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "mixens/core_data.hpp"
#include "mixens/gbdt.hpp"
#include "mixens/imageprep.hpp"
#include "mixens/rng.hpp"
#include "mixens/synth.hpp"
#include "tree_oracle.hpp"

namespace fixtures {

inline std::vector<std::string> ids(std::size_t n) { return mixens::synth_sample_ids(n); }

inline mixens::PredictionMatrix matrix(const std::string& id, std::size_t c,
                                       std::vector<double> probs, const std::string& task = "t") {
  return {mixens::PredictorId(id), mixens::TaskSpec(task, c), ids(probs.size() / c),
          std::move(probs)};
}

inline mixens::LabelVector labels(std::size_t c, std::vector<std::size_t> y,
                                  const std::string& task = "t") {
  return {mixens::TaskSpec(task, c), ids(y.size()), std::move(y)};
}

/// Random valid probability matrix (Dirichlet-like rows from exponentials).
inline mixens::PredictionMatrix random_matrix(const std::string& id, std::size_t n, std::size_t c,
                                              std::uint64_t seed) {
  mixens::Rng rng(seed);
  std::vector<double> p(n * c);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
      p[i * c + k] = -std::log(1.0 - rng.uniform01());
      s += p[i * c + k];
    }
    for (std::size_t k = 0; k < c; ++k) p[i * c + k] /= s;
  }
  return matrix(id, c, std::move(p));
}

/// Random tree-builder input: features, gradients, hessians.
struct TreeFixture {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> x;  // row-major
  std::vector<double> g;
  std::vector<double> h;

  mixens::FeatureMatrix features() const {
    std::vector<mixens::ColumnOrigin> origin;
    for (std::size_t j = 0; j < d; ++j) origin.push_back({mixens::PredictorId("F"), j});
    return {ids(n), d, x, origin};
  }
};

/// Half of the fixtures use a coarse integer grid so repeated values and
/// exactly tied gains are exercised; the rest use continuous values.
inline TreeFixture random_tree_fixture(std::uint64_t seed, std::size_t max_n = 50,
                                       std::size_t max_d = 6) {
  mixens::Rng rng(seed);
  TreeFixture f;
  f.n = 2 + static_cast<std::size_t>(rng.below(max_n - 1));
  f.d = 1 + static_cast<std::size_t>(rng.below(max_d));
  const bool grid = rng.bernoulli(0.5);
  f.x.resize(f.n * f.d);
  for (auto& v : f.x) v = grid ? static_cast<double>(rng.below(5)) : rng.normal();
  f.g.resize(f.n);
  f.h.resize(f.n);
  for (std::size_t i = 0; i < f.n; ++i) {
    f.g[i] = grid ? static_cast<double>(static_cast<int>(rng.below(5)) - 2) : rng.uniform(-1, 1);
    f.h[i] = grid ? 1.0 : rng.uniform(0.0, 0.25);
  }
  return f;
}

/// Empty string when the library tree equals the oracle tree exactly
/// (structure, features, thresholds) with leaf weights within `weight_tol`.
inline std::string compare_trees(const mixens::RegressionTree& tree,
                                 const std::vector<oracle::OracleNode>& expected,
                                 double weight_tol) {
  const auto& nodes = tree.nodes();
  std::ostringstream err;
  if (nodes.size() != expected.size()) {
    err << "node count " << nodes.size() << " vs oracle " << expected.size();
    return err.str();
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& e = expected[i];
    if (const auto* leaf = std::get_if<mixens::LeafNode>(&nodes[i])) {
      if (!e.leaf) return "node " + std::to_string(i) + ": leaf vs oracle split";
      if (std::abs(leaf->weight - e.weight) > weight_tol) {
        err << "node " << i << ": weight " << leaf->weight << " vs " << e.weight;
        return err.str();
      }
    } else {
      const auto& s = std::get<mixens::SplitNode>(nodes[i]);
      if (e.leaf) return "node " + std::to_string(i) + ": split vs oracle leaf";
      if (s.feature != e.feature || s.threshold != e.threshold ||
          s.left != static_cast<std::size_t>(e.left) ||
          s.right != static_cast<std::size_t>(e.right)) {
        err << "node " << i << ": split (" << s.feature << ", " << s.threshold << ") vs oracle ("
            << e.feature << ", " << e.threshold << ")";
        return err.str();
      }
    }
  }
  return {};
}

/// Two classes separated on one feature: x < 0 is class 0.
struct SeparableFixture {
  mixens::FeatureMatrix features;
  mixens::LabelVector labels;
};

inline SeparableFixture separable_fixture(std::size_t n = 40) {
  std::vector<double> x(n);
  std::vector<std::size_t> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    y[i] = x[i] < 0.0 ? 0 : 1;
  }
  return {mixens::FeatureMatrix(ids(n), 1, x, {{mixens::PredictorId("F"), 0}}),
          labels(2, y, "toy")};
}

/// Deterministic integer-valued RGB image with no pixel equal to `avoid`.
inline mixens::RasterImage pattern_image(std::size_t w, std::size_t h, std::size_t channels,
                                         std::uint8_t avoid = 128) {
  std::vector<std::uint8_t> px(w * h * channels);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      for (std::size_t c = 0; c < channels; ++c) {
        auto v = static_cast<std::uint8_t>((x * 7 + y * 13 + c * 61 + (x * y) % 17) % 256);
        if (v == avoid) v = static_cast<std::uint8_t>(avoid + 1);
        px[(y * w + x) * channels + c] = v;
      }
    }
  }
  return {w, h, channels, std::move(px)};
}

}  // namespace fixtures
