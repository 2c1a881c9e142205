#pragma once

#include <vector>

namespace seqtrace {

struct PupilSample {
  double px;  // normalized pupil x in [−1, 1]
  double py;  // normalized pupil y in [−1, 1]
  double weight = 1.0;
};

enum class PupilPattern { hexapolar, grid };

// hexapolar: `n` rings, ring r holding 6r points (ring 0 is the center).
// grid: n×n cell centers, keeping those inside the unit disk.
std::vector<PupilSample> sample_pupil(PupilPattern pattern, int n);

}  // namespace seqtrace
