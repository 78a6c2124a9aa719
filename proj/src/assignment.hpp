#pragma once

#include <span>
#include <vector>

namespace musiclab {

// Minimum-cost bipartite assignment (Hungarian algorithm with potentials,
// O(rows * cols^2)). cost is row-major rows x cols with rows <= cols;
// arbitrary finite real costs are fine, including negatives. Returns the
// matched column for every row.
std::vector<int> min_cost_assignment(int rows, int cols, std::span<const double> cost);

// Square convenience used as the Dinkelbach oracle.
std::vector<int> min_cost_assignment(int n, std::span<const double> cost);

}  // namespace musiclab
