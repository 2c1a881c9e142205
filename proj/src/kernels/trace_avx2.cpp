// Compiled with -mavx2 (no FMA: every product is rounded exactly as in the
// scalar kernel so the two agree bit for bit). Only raw pointers cross this
// boundary; see kernels_raw.hpp.
#include <immintrin.h>

#include "seqtrace/kernels_raw.hpp"

namespace seqtrace::kernels {

namespace {

constexpr double kBackwardTolerance = 1e-9;
constexpr double kGrazingCos = 1e-12;

struct Lanes {
  double* x;
  double* y;
  double* z;
  double* dx;
  double* dy;
  double* dz;
  double* opl;
  std::int32_t* status;
  std::int32_t* failed;
};

inline __m256d neg(__m256d v) { return _mm256_xor_pd(v, _mm256_set1_pd(-0.0)); }

void process4(const SurfaceConstants& k, double mu, std::int32_t surface_index, const Lanes& l) {
  const __m128i st = _mm_loadu_si128(reinterpret_cast<const __m128i*>(l.status));
  const __m256d active = _mm256_castsi256_pd(_mm256_cvtepi32_epi64(_mm_cmpeq_epi32(st, _mm_setzero_si128())));
  if (_mm256_movemask_pd(active) == 0) return;

  const __m256d c = _mm256_set1_pd(k.curvature);
  const __m256d kappa = _mm256_set1_pd(k.kappa);
  const __m256d vz = _mm256_set1_pd(k.vertex_z);

  const __m256d x = _mm256_loadu_pd(l.x);
  const __m256d y = _mm256_loadu_pd(l.y);
  const __m256d z = _mm256_loadu_pd(l.z);
  const __m256d dx = _mm256_loadu_pd(l.dx);
  const __m256d dy = _mm256_loadu_pd(l.dy);
  const __m256d dz = _mm256_loadu_pd(l.dz);
  const __m256d pz = _mm256_sub_pd(z, vz);

  // intersect_local
  const __m256d a = _mm256_mul_pd(
      c, _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)),
                       _mm256_mul_pd(kappa, _mm256_mul_pd(dz, dz))));
  const __m256d b = _mm256_sub_pd(
      _mm256_mul_pd(c, _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(x, dx), _mm256_mul_pd(y, dy)),
                                     _mm256_mul_pd(kappa, _mm256_mul_pd(pz, dz)))),
      dz);
  const __m256d cc = _mm256_sub_pd(
      _mm256_mul_pd(c, _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(x, x), _mm256_mul_pd(y, y)),
                                     _mm256_mul_pd(kappa, _mm256_mul_pd(pz, pz)))),
      _mm256_mul_pd(_mm256_set1_pd(2.0), pz));
  const __m256d disc = _mm256_sub_pd(_mm256_mul_pd(b, b), _mm256_mul_pd(a, cc));
  const __m256d disc_ok = _mm256_cmp_pd(disc, _mm256_setzero_pd(), _CMP_GE_OQ);
  const __m256d sq = _mm256_sqrt_pd(disc);
  const __m256d b_nonpos = _mm256_cmp_pd(b, _mm256_setzero_pd(), _CMP_LE_OQ);
  const __m256d q = _mm256_blendv_pd(_mm256_sub_pd(neg(b), sq), _mm256_sub_pd(sq, b), b_nonpos);
  const __m256d q_ok = _mm256_cmp_pd(q, _mm256_setzero_pd(), _CMP_NEQ_OQ);
  const __m256d t = _mm256_div_pd(cc, q);
  const __m256d abs_t = _mm256_andnot_pd(_mm256_set1_pd(-0.0), t);
  const __m256d t_ok = _mm256_and_pd(
      _mm256_cmp_pd(abs_t, _mm256_set1_pd(__builtin_huge_val()), _CMP_LT_OQ),
      _mm256_cmp_pd(t, _mm256_set1_pd(-kBackwardTolerance), _CMP_GE_OQ));
  const __m256d hit_ok = _mm256_and_pd(_mm256_and_pd(disc_ok, q_ok), t_ok);

  const __m256d hx = _mm256_add_pd(x, _mm256_mul_pd(t, dx));
  const __m256d hy = _mm256_add_pd(y, _mm256_mul_pd(t, dy));
  const __m256d hz = _mm256_add_pd(z, _mm256_mul_pd(t, dz));
  const __m256d r2 = _mm256_add_pd(_mm256_mul_pd(hx, hx), _mm256_mul_pd(hy, hy));
  const __m256d inside =
      _mm256_cmp_pd(r2, _mm256_set1_pd(k.semi_diameter_sq), _CMP_LE_OQ);

  // surface_normal
  const __m256d gx = neg(_mm256_mul_pd(c, hx));
  const __m256d gy = neg(_mm256_mul_pd(c, hy));
  const __m256d gz = _mm256_sub_pd(_mm256_set1_pd(1.0),
                                   _mm256_mul_pd(c, _mm256_mul_pd(kappa, _mm256_sub_pd(hz, vz))));
  const __m256d inv = _mm256_div_pd(
      _mm256_set1_pd(1.0),
      _mm256_sqrt_pd(_mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(gx, gx), _mm256_mul_pd(gy, gy)),
                                   _mm256_mul_pd(gz, gz))));
  __m256d nx = _mm256_mul_pd(gx, inv);
  __m256d ny = _mm256_mul_pd(gy, inv);
  __m256d nz = _mm256_mul_pd(gz, inv);
  __m256d cos_i = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, nx), _mm256_mul_pd(dy, ny)),
                                _mm256_mul_pd(dz, nz));
  const __m256d flip = _mm256_and_pd(_mm256_cmp_pd(cos_i, _mm256_setzero_pd(), _CMP_LT_OQ),
                                     _mm256_set1_pd(-0.0));
  nx = _mm256_xor_pd(nx, flip);
  ny = _mm256_xor_pd(ny, flip);
  nz = _mm256_xor_pd(nz, flip);
  cos_i = _mm256_xor_pd(cos_i, flip);
  const __m256d not_grazing = _mm256_cmp_pd(cos_i, _mm256_set1_pd(kGrazingCos), _CMP_GE_OQ);

  // refract_oriented
  const __m256d vmu = _mm256_set1_pd(mu);
  const __m256d kk = _mm256_sub_pd(
      _mm256_set1_pd(1.0),
      _mm256_mul_pd(_mm256_mul_pd(vmu, vmu),
                    _mm256_sub_pd(_mm256_set1_pd(1.0), _mm256_mul_pd(cos_i, cos_i))));
  const __m256d no_tir = _mm256_cmp_pd(kk, _mm256_setzero_pd(), _CMP_GE_OQ);
  const __m256d g = _mm256_sub_pd(_mm256_sqrt_pd(kk), _mm256_mul_pd(vmu, cos_i));
  const __m256d ox = _mm256_add_pd(_mm256_mul_pd(vmu, dx), _mm256_mul_pd(g, nx));
  const __m256d oy = _mm256_add_pd(_mm256_mul_pd(vmu, dy), _mm256_mul_pd(g, ny));
  const __m256d oz = _mm256_add_pd(_mm256_mul_pd(vmu, dz), _mm256_mul_pd(g, nz));

  const __m256d ok = _mm256_and_pd(
      _mm256_and_pd(_mm256_and_pd(active, hit_ok), _mm256_and_pd(inside, not_grazing)), no_tir);

  _mm256_storeu_pd(l.x, _mm256_blendv_pd(x, hx, ok));
  _mm256_storeu_pd(l.y, _mm256_blendv_pd(y, hy, ok));
  _mm256_storeu_pd(l.z, _mm256_blendv_pd(z, hz, ok));
  _mm256_storeu_pd(l.dx, _mm256_blendv_pd(dx, ox, ok));
  _mm256_storeu_pd(l.dy, _mm256_blendv_pd(dy, oy, ok));
  _mm256_storeu_pd(l.dz, _mm256_blendv_pd(dz, oz, ok));
  const __m256d opl = _mm256_loadu_pd(l.opl);
  _mm256_storeu_pd(
      l.opl, _mm256_blendv_pd(opl, _mm256_add_pd(opl, _mm256_mul_pd(_mm256_set1_pd(k.n_before), t)), ok));

  const int active_bits = _mm256_movemask_pd(active);
  const int ok_bits = _mm256_movemask_pd(ok);
  if (active_bits == ok_bits) return;
  const int hit_bits = _mm256_movemask_pd(hit_ok);
  const int inside_bits = _mm256_movemask_pd(inside);
  const int graze_ok_bits = _mm256_movemask_pd(not_grazing);
  for (int lane = 0; lane < 4; ++lane) {
    const int bit = 1 << lane;
    if (!(active_bits & bit) || (ok_bits & bit)) continue;
    std::int32_t code;
    if (!(hit_bits & bit)) code = 1;
    else if (!(inside_bits & bit)) code = 3;
    else if (!(graze_ok_bits & bit)) code = 1;
    else code = 2;
    l.status[lane] = code;
    l.failed[lane] = surface_index;
  }
}

}  // namespace

void trace_batch_avx2(const SurfaceConstants* surfaces, std::size_t surface_count, RawBatch r) {
  const std::size_t full = r.count & ~static_cast<std::size_t>(3);
  for (std::size_t s = 0; s < surface_count; ++s) {
    const SurfaceConstants& k = surfaces[s];
    const double mu = k.n_before / k.n_after;
    const auto index = static_cast<std::int32_t>(s);
    for (std::size_t i = 0; i < full; i += 4) {
      process4(k, mu, index,
               {r.x + i, r.y + i, r.z + i, r.dx + i, r.dy + i, r.dz + i, r.opl + i, r.status + i,
                r.failed_surface + i});
    }
    if (full == r.count) continue;
    // Tail: pad to a full vector with inactive lanes.
    double bx[4] = {}, by[4] = {}, bz[4] = {}, bdx[4] = {}, bdy[4] = {}, bdz[4] = {1, 1, 1, 1}, bo[4] = {};
    std::int32_t bs[4] = {-1, -1, -1, -1}, bf[4] = {};
    const std::size_t rem = r.count - full;
    for (std::size_t j = 0; j < rem; ++j) {
      bx[j] = r.x[full + j];
      by[j] = r.y[full + j];
      bz[j] = r.z[full + j];
      bdx[j] = r.dx[full + j];
      bdy[j] = r.dy[full + j];
      bdz[j] = r.dz[full + j];
      bo[j] = r.opl[full + j];
      bs[j] = r.status[full + j];
      bf[j] = r.failed_surface[full + j];
    }
    process4(k, mu, index, {bx, by, bz, bdx, bdy, bdz, bo, bs, bf});
    for (std::size_t j = 0; j < rem; ++j) {
      r.x[full + j] = bx[j];
      r.y[full + j] = by[j];
      r.z[full + j] = bz[j];
      r.dx[full + j] = bdx[j];
      r.dy[full + j] = bdy[j];
      r.dz[full + j] = bdz[j];
      r.opl[full + j] = bo[j];
      r.status[full + j] = bs[j];
      r.failed_surface[full + j] = bf[j];
    }
  }
}

}  // namespace seqtrace::kernels
