#pragma once
// Deterministic synthetic test images: the classical ten-ellipse head phantom
// in 2D and 3D (intensities rescaled to [0, 1]) and a 1D staircase.

#include <string>

#include "tvcs/grid.hpp"

namespace tvcs {

struct Phantom {
  Image<double> image;
  std::string name;
  std::string variant;  // parameter table identifier recorded for provenance
};

// d = 2 or 3; throws std::invalid_argument otherwise.
Phantom shepp_logan(const GridShape& shape);

// Piecewise-constant 1D profile with four plateaus, values in [0, 1].
Phantom staircase_1d(int n);

}  // namespace tvcs
