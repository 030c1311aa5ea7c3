#pragma once

#include <cstdint>
#include <vector>

namespace mtmc {

// Maximum-weight one-to-one assignment on a rectangular rows x cols matrix
// of non-negative weights (Hungarian method with potentials, O(n^2 m)).
// Returns, per row, the matched column or -1 when the row is left unmatched.
std::vector<int> max_weight_assignment(const std::vector<std::vector<std::int64_t>>& weights);

}  // namespace mtmc
