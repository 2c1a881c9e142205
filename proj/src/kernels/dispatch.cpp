#include <atomic>

#include "seqtrace/error.hpp"
#include "seqtrace/kernels.hpp"

namespace seqtrace::kernels {

namespace {
// -1: auto, otherwise a Backend value.
std::atomic<int> g_override{-1};
}  // namespace

const char* to_string(Backend backend) {
  return backend == Backend::avx2 ? "avx2" : "scalar";
}

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  static const bool available = __builtin_cpu_supports("avx2");
  return available;
#else
  return false;
#endif
}

Backend active_backend() {
  const int forced = g_override.load(std::memory_order_relaxed);
  if (forced >= 0) return static_cast<Backend>(forced);
  return avx2_available() ? Backend::avx2 : Backend::scalar;
}

void set_backend_override(std::optional<Backend> backend) {
  if (backend && *backend == Backend::avx2 && !avx2_available()) {
    throw Error(ErrorKind::invalid_argument, "AVX2 backend requested but not supported by this CPU");
  }
  g_override.store(backend ? static_cast<int>(*backend) : -1, std::memory_order_relaxed);
}

std::vector<SurfaceConstants> surface_constants(const LensSystem& system, double wavelength_um) {
  const std::vector<double> media = system.media(wavelength_um);
  std::vector<SurfaceConstants> out;
  out.reserve(system.size());
  for (std::size_t i = 0; i < system.size(); ++i) {
    const SurfaceNode& s = system.surface(i);
    const double sd = s.semi_diameter;
    out.push_back({system.vertex_z(i), s.profile.curvature(), 1.0 + s.profile.conic_constant(),
                   sd * sd, i == 0 ? 1.0 : media[i - 1], media[i]});
  }
  return out;
}

void RayBatch::resize(std::size_t n) {
  for (auto* v : {&x, &y, &z, &dx, &dy, &dz, &opl}) v->assign(n, 0.0);
  status.assign(n, kCompleted);
  failed_surface.assign(n, -1);
}

void RayBatch::truncate(std::size_t n) {
  if (n >= size()) return;
  for (auto* v : {&x, &y, &z, &dx, &dy, &dz, &opl}) v->resize(n);
  status.resize(n);
  failed_surface.resize(n);
}

void RayBatch::set(std::size_t i, const Vec3& origin, const Vec3& direction) {
  const Vec3 d = normalized(direction);
  x[i] = origin.x;
  y[i] = origin.y;
  z[i] = origin.z;
  dx[i] = d.x;
  dy[i] = d.y;
  dz[i] = d.z;
  opl[i] = 0.0;
  status[i] = kCompleted;
  failed_surface[i] = -1;
}

void trace_batch(std::span<const SurfaceConstants> surfaces, RayBatch& rays, Backend backend) {
  RawBatch raw{rays.x.data(),  rays.y.data(),      rays.z.data(),
               rays.dx.data(), rays.dy.data(),     rays.dz.data(),
               rays.opl.data(), rays.status.data(), rays.failed_surface.data(),
               rays.size()};
  if (backend == Backend::avx2) {
    if (!avx2_available()) {
      throw Error(ErrorKind::invalid_argument, "AVX2 backend not supported by this CPU");
    }
    trace_batch_avx2(surfaces.data(), surfaces.size(), raw);
  } else {
    trace_batch_scalar(surfaces.data(), surfaces.size(), raw);
  }
}

void trace_batch(std::span<const SurfaceConstants> surfaces, RayBatch& rays) {
  trace_batch(surfaces, rays, active_backend());
}

}  // namespace seqtrace::kernels
