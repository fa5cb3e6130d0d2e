#pragma once

#include <vector>

namespace repqec {

/// Exact maximum-weight perfect matching on a complete graph with an even
/// number of vertices (Edmonds' blossom algorithm with dual variables,
/// O(V^3)). `weights` is a symmetric n x n matrix in row-major order.
/// Returns match[v] = partner of v.
std::vector<int> max_weight_perfect_matching(int n, const std::vector<double>& weights);

/// Minimum-weight perfect matching via the complement transform.
std::vector<int> min_weight_perfect_matching(int n, const std::vector<double>& weights);

}  // namespace repqec
