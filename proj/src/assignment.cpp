#include "memtrack/assignment.hpp"

#include <algorithm>
#include <limits>

namespace memtrack {

// Kuhn-Munkres with potentials on a padded square matrix, O(n^3).
// Cardinality dominance comes from adding a constant larger than any
// possible total-weight difference to every allowed edge.
std::vector<int> max_cardinality_max_weight_matching(
    const std::vector<std::vector<double>>& weights) {
    const std::size_t rows = weights.size();
    const std::size_t cols = rows == 0 ? 0 : weights[0].size();
    if (rows == 0 || cols == 0) return std::vector<int>(rows, -1);

    const std::size_t n = rows + cols;  // square, with dummy rows/columns
    double max_weight = 0.0;
    for (const auto& row : weights) {
        for (double w : row) max_weight = std::max(max_weight, w);
    }
    const double big = max_weight * static_cast<double>(std::min(rows, cols)) + 1.0;

    // cost(i,j) = -(big + w) for allowed real pairs, 0 otherwise; minimize.
    auto cost = [&](std::size_t i, std::size_t j) -> double {
        if (i < rows && j < cols && weights[i][j] >= 0.0) return -(big + weights[i][j]);
        return 0.0;
    };

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> match_col(n + 1, 0);  // 1-based; col -> row
    std::vector<std::size_t> way(n + 1, 0);

    for (std::size_t i = 1; i <= n; ++i) {
        match_col[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            std::size_t i0 = match_col[j0], j1 = 0;
            double delta = inf;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match_col[j0] != 0);
        do {
            std::size_t j1 = way[j0];
            match_col[j0] = match_col[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> result(rows, -1);
    for (std::size_t j = 1; j <= n; ++j) {
        std::size_t i = match_col[j];
        if (i >= 1 && i <= rows && j <= cols && weights[i - 1][j - 1] >= 0.0) {
            result[i - 1] = static_cast<int>(j - 1);
        }
    }
    return result;
}

}  // namespace memtrack
