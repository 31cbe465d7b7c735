#pragma once

#include <vector>

namespace memtrack {

/// Bipartite matching maximizing cardinality first, total weight second.
/// weights[i][j] is the value of pairing row i with column j; pairs with
/// weights[i][j] < 0 are forbidden. Returns, per row, the matched column or
/// -1. Deterministic for fixed inputs.
std::vector<int> max_cardinality_max_weight_matching(
    const std::vector<std::vector<double>>& weights);

}  // namespace memtrack
