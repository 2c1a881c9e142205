#include "seqtrace/pupil.hpp"

#include <cmath>
#include <numbers>

#include "seqtrace/error.hpp"

namespace seqtrace {

std::vector<PupilSample> sample_pupil(PupilPattern pattern, int n) {
  std::vector<PupilSample> out;
  if (pattern == PupilPattern::hexapolar) {
    if (n < 0) throw Error(ErrorKind::invalid_argument, "hexapolar ring count must be >= 0");
    out.push_back({0.0, 0.0, 1.0});
    for (int r = 1; r <= n; ++r) {
      const double rho = static_cast<double>(r) / n;
      const int count = 6 * r;
      for (int k = 0; k < count; ++k) {
        const double a = 2.0 * std::numbers::pi * k / count;
        out.push_back({rho * std::sin(a), rho * std::cos(a), 1.0});
      }
    }
    return out;
  }
  if (n < 1) throw Error(ErrorKind::invalid_argument, "grid size must be >= 1");
  for (int j = 0; j < n; ++j) {
    const double py = (j + 0.5) / n * 2.0 - 1.0;
    for (int i = 0; i < n; ++i) {
      const double px = (i + 0.5) / n * 2.0 - 1.0;
      if (px * px + py * py <= 1.0) out.push_back({px, py, 1.0});
    }
  }
  return out;
}

}  // namespace seqtrace
