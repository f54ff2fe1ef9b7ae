#pragma once
// Partition of spatial indices into zero blocks and support blocks of a
// vector field, shared by the factored shrinkage and the rate analysis.

#include <vector>

#include "tvcs/grid.hpp"

namespace tvcs {

struct SupportSet {
  std::vector<char> on;  // length N; 1 = support (nonzero block)
  index_t n_on = 0;
  double max_mag = 0;    // max block magnitude at detection time
  double eps = 0;        // relative threshold used

  index_t n_zero() const { return static_cast<index_t>(on.size()) - n_on; }
};

}  // namespace tvcs
