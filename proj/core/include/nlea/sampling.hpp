#ifndef NLEA_SAMPLING_HPP
#define NLEA_SAMPLING_HPP

#include <vector>

#include "nlea/polynomial.hpp"

namespace nlea {

/// Axis-aligned sampling region, optionally cut down by polynomial
/// constraints c(x) >= 0 (for regions like {x : x2 <= 1 + x1} that are not
/// boxes).
struct SamplingBox {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<Polynomial> constraints;
};

/// Uniform grid over the box with `grid` points per axis, filtered by the
/// box constraints. grid == 1 yields the midpoint.
std::vector<std::vector<double>> sample_grid(const SamplingBox& box, int grid);

}  // namespace nlea

#endif  // NLEA_SAMPLING_HPP
