#include "assignment.hpp"

#include <algorithm>
#include <limits>

#include "errors.hpp"

namespace musiclab {

std::vector<int> min_cost_assignment(int rows, int cols, std::span<const double> cost) {
  require(rows >= 1 && cols >= rows, errc::invalid_argument,
          "assignment needs 1 <= rows <= cols");
  require(cost.size() == static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols),
          errc::dimension_mismatch, "cost matrix size mismatch");

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // match[j] = row currently assigned to column j; column `cols` is the
  // virtual column holding the row being inserted.
  std::vector<int> match(static_cast<std::size_t>(cols) + 1, -1);
  std::vector<int> way(static_cast<std::size_t>(cols) + 1, cols);
  std::vector<double> row_pot(static_cast<std::size_t>(rows), 0.0);
  std::vector<double> col_pot(static_cast<std::size_t>(cols) + 1, 0.0);
  std::vector<double> minv(static_cast<std::size_t>(cols) + 1);
  std::vector<char> used(static_cast<std::size_t>(cols) + 1);

  for (int i = 0; i < rows; ++i) {
    int j0 = cols;
    match[static_cast<std::size_t>(j0)] = i;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = match[static_cast<std::size_t>(j0)];
      double delta = kInf;
      int j1 = -1;
      for (int j = 0; j < cols; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        if (used[sj]) continue;
        const double reduced = cost[static_cast<std::size_t>(i0) * cols + sj] -
                               row_pot[static_cast<std::size_t>(i0)] - col_pot[sj];
        if (reduced < minv[sj]) {
          minv[sj] = reduced;
          way[sj] = j0;
        }
        if (minv[sj] < delta) {
          delta = minv[sj];
          j1 = j;
        }
      }
      require(j1 >= 0, errc::invalid_argument, "assignment: no augmenting column");
      for (int j = 0; j <= cols; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        if (used[sj]) {
          row_pot[static_cast<std::size_t>(match[sj])] += delta;
          col_pot[sj] -= delta;
        } else {
          minv[sj] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<std::size_t>(j0)] != -1);
    while (j0 != cols) {
      const int j1 = way[static_cast<std::size_t>(j0)];
      match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
      j0 = j1;
    }
  }

  std::vector<int> row_to_col(static_cast<std::size_t>(rows), -1);
  for (int j = 0; j < cols; ++j) {
    const int r = match[static_cast<std::size_t>(j)];
    if (r >= 0) row_to_col[static_cast<std::size_t>(r)] = j;
  }
  return row_to_col;
}

std::vector<int> min_cost_assignment(int n, std::span<const double> cost) {
  return min_cost_assignment(n, n, cost);
}

}  // namespace musiclab
