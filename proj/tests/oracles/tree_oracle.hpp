#pragma once

// Brute-force reference for the exact greedy tree builder. It shares no code
// with the library: every candidate split is materialized, child sums are
// recomputed from scratch over the partition, and the best candidate is
// chosen by scanning the full candidate list.

#include <cstddef>
#include <vector>

namespace oracle {

struct OracleParams {
  std::size_t max_depth = 2;
  double lambda = 1.0;
  double gamma = 0.0;
  double min_hessian_sum = 1e-3;
  double tie_tolerance = 1e-12;  // relative, same rule as the builder
};

struct OracleNode {
  bool leaf = true;
  double weight = 0.0;
  std::size_t feature = 0;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
};

/// Pre-order node list, root at 0. x is row-major n x d.
std::vector<OracleNode> brute_force_tree(const std::vector<double>& x, std::size_t n,
                                         std::size_t d, const std::vector<double>& g,
                                         const std::vector<double>& h, const OracleParams& p);

}  // namespace oracle
