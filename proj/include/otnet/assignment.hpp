#pragma once

#include "otnet/types.hpp"

#include <vector>

namespace otnet {

struct Assignment {
  std::vector<Index> column_of_row;  // row i is matched to column column_of_row[i]
  double cost = 0.0;
};

/// Exact minimum-cost perfect matching on a square cost matrix
/// (shortest augmenting paths with dual potentials, O(n^3)).
Assignment solve_assignment(const Matrix& cost);

}  // namespace otnet
