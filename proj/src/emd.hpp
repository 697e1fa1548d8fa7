#pragma once

#include <vector>

namespace umbra {

// Minimum-cost transportation value moving h1's mass onto h2 under the given
// ground cost matrix (row-major K x K). Both histograms must have equal size
// and equal total mass; the ground matrix must be symmetric, nonnegative,
// zero-diagonal, and satisfy the triangle inequality. Solved exactly with a
// transportation simplex.
double emd(const std::vector<double>& h1, const std::vector<double>& h2,
           const std::vector<double>& ground);

}  // namespace umbra
