#pragma once

#include <vector>

#include "meshsmooth/core.hpp"
#include "meshsmooth/quality.hpp"

namespace meshsmooth {

/// One smoothing iteration's bookkeeping.
struct IterationStats {
  QualitySummary quality;
  double max_displacement = 0.0;
  int inversions_recovered = 0;
};

/// Output of either smoother. `history` holds exactly one entry per executed
/// iteration; `converged` reports whether the stopping rule (rather than the
/// iteration cap) ended the run.
struct SmoothResult {
  Mesh mesh;
  int iterations = 0;
  bool converged = false;
  std::vector<IterationStats> history;
  std::vector<int> inverted_elements;  // planar post-run orientation audit
};

}  // namespace meshsmooth
