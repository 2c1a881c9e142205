#pragma once

#include <span>

#include "seqtrace/aim.hpp"
#include "seqtrace/kernels.hpp"
#include "seqtrace/pupil.hpp"

namespace seqtrace::detail {

// Fills a batch with one ray per pupil sample of the frame.
inline void fill_beam(const LaunchFrame& frame, std::span<const PupilSample> samples,
                      kernels::RayBatch& batch) {
  batch.resize(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    batch.set(i, frame.origin(samples[i].px, samples[i].py), frame.direction);
}

}  // namespace seqtrace::detail
