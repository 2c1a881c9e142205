#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "seqtrace/kernels_raw.hpp"
#include "seqtrace/system.hpp"
#include "seqtrace/vec3.hpp"

// Batched sequential tracing over structure-of-arrays ray bundles. The scalar
// kernel is the reference; the AVX2 kernel reproduces it lane for lane and is
// chosen at runtime when the CPU supports it.
namespace seqtrace::kernels {

enum class Backend { scalar, avx2 };

const char* to_string(Backend backend);

bool avx2_available();

// Backend used by trace_batch() without an explicit backend argument.
Backend active_backend();

// Forces a backend (nullopt restores auto-detection). Throws InvalidArgument when
// AVX2 is requested on a CPU without it.
void set_backend_override(std::optional<Backend> backend);

std::vector<SurfaceConstants> surface_constants(const LensSystem& system, double wavelength_um);

enum Status : std::int32_t {
  kCompleted = 0,
  kMissed = 1,
  kTotalInternalReflection = 2,
  kVignetted = 3,
};

struct RayBatch {
  std::vector<double> x, y, z;
  std::vector<double> dx, dy, dz;
  std::vector<double> opl;
  std::vector<std::int32_t> status;
  std::vector<std::int32_t> failed_surface;

  RayBatch() = default;
  explicit RayBatch(std::size_t n) { resize(n); }

  void resize(std::size_t n);
  // Drops rays beyond the first n, keeping their contents.
  void truncate(std::size_t n);
  std::size_t size() const { return x.size(); }
  // Sets origin and unit direction and clears opl/status.
  void set(std::size_t i, const Vec3& origin, const Vec3& direction);
  Vec3 position(std::size_t i) const { return {x[i], y[i], z[i]}; }
  Vec3 direction(std::size_t i) const { return {dx[i], dy[i], dz[i]}; }
};

void trace_batch(std::span<const SurfaceConstants> surfaces, RayBatch& rays, Backend backend);
void trace_batch(std::span<const SurfaceConstants> surfaces, RayBatch& rays);

}  // namespace seqtrace::kernels
