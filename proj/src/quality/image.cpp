#include "seqtrace/image.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <cctype>
#include <iterator>
#include <numbers>
#include <random>
#include <string>

#include "seqtrace/aim.hpp"
#include "seqtrace/detail/fft.hpp"
#include "seqtrace/diffraction.hpp"
#include "seqtrace/error.hpp"
#include "seqtrace/kernels.hpp"
#include "seqtrace/paraxial.hpp"

namespace seqtrace {

namespace {

constexpr int kMaxOutput = 4096;
constexpr std::size_t kChunk = 1 << 16;
constexpr int kBlock = 512;

class HeaderReader {
 public:
  explicit HeaderReader(const std::vector<unsigned char>& b) : bytes_(b) {}

  long next_int() {
    skip_space();
    long v = 0;
    bool any = false;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      any = true;
      if (v > 1'000'000'000) bad();
    }
    if (!any) bad();
    return v;
  }
  std::size_t pos() const { return pos_; }
  void advance() { ++pos_; }
  [[noreturn]] static void bad() { throw Error(ErrorKind::unreadable_image, "malformed PGM header"); }

 private:
  void skip_space() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<unsigned char>& bytes_;
  std::size_t pos_ = 2;
};

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t pow2_at_least(std::size_t v) {
  std::size_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

// Zero-boundary 2-D convolution of an s×s image with a (2h+1)² kernel, FFT
// overlap-add over kBlock tiles.
std::vector<double> convolve(const std::vector<double>& img, int s, const std::vector<double>& kern,
                             int h) {
  const int k = 2 * h + 1;
  const int f = static_cast<int>(pow2_at_least(static_cast<std::size_t>(std::min(kBlock, s) + k - 1)));
  // Fill the padded transform: the tile grows to whatever the kernel leaves free.
  const int block = std::min(s, f - k + 1);
  std::vector<std::complex<double>> kf(static_cast<std::size_t>(f) * f);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) kf[static_cast<std::size_t>(j) * f + i] = kern[static_cast<std::size_t>(j) * k + i];
  detail::fft2d(kf, f, f);
  const double scale = 1.0 / (static_cast<double>(f) * f);

  std::vector<double> out(static_cast<std::size_t>(s) * s, 0.0);
  std::vector<std::complex<double>> tile(kf.size());
  for (int by = 0; by < s; by += block) {
    for (int bx = 0; bx < s; bx += block) {
      std::fill(tile.begin(), tile.end(), std::complex<double>());
      bool any = false;
      for (int j = 0; j < block && by + j < s; ++j) {
        for (int i = 0; i < block && bx + i < s; ++i) {
          const double v = img[static_cast<std::size_t>(by + j) * s + bx + i];
          if (v != 0.0) any = true;
          tile[static_cast<std::size_t>(j) * f + i] = v;
        }
      }
      if (!any) continue;
      detail::fft2d(tile, f, f);
      for (std::size_t q = 0; q < tile.size(); ++q) tile[q] *= kf[q];
      detail::ifft2d(tile, f, f);
      for (int j = 0; j < block + k - 1; ++j) {
        const int oy = by + j - h;
        if (oy < 0 || oy >= s) continue;
        for (int i = 0; i < block + k - 1; ++i) {
          const int ox = bx + i - h;
          if (ox < 0 || ox >= s) continue;
          out[static_cast<std::size_t>(oy) * s + ox] += tile[static_cast<std::size_t>(j) * f + i].real() * scale;
        }
      }
    }
  }
  return out;
}

GrayImage normalized(const std::vector<double>& raw, int s) {
  GrayImage img{s, s, raw};
  const double peak = raw.empty() ? 0.0 : *std::max_element(raw.begin(), raw.end());
  if (peak > 0.0)
    for (double& v : img.pixels) v /= peak;
  return img;
}

}  // namespace

GrayImage parse_pgm(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2'))
    throw Error(ErrorKind::unreadable_image, "not a PGM (P5/P2) image");
  const bool binary = bytes[1] == '5';
  HeaderReader r(bytes);
  const long w = r.next_int(), h = r.next_int(), maxval = r.next_int();
  if (w <= 0 || h <= 0 || w > 65536 || h > 65536 || maxval <= 0 || maxval > 65535)
    HeaderReader::bad();
  GrayImage img{static_cast<int>(w), static_cast<int>(h), {}};
  const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  img.pixels.resize(count);
  if (binary) {
    if (r.pos() >= bytes.size() || !std::isspace(bytes[r.pos()])) HeaderReader::bad();
    r.advance();
    const std::size_t bpp = maxval > 255 ? 2 : 1;
    if (bytes.size() - r.pos() < count * bpp)
      throw Error(ErrorKind::unreadable_image, "PGM pixel data truncated");
    const unsigned char* p = bytes.data() + r.pos();
    for (std::size_t i = 0; i < count; ++i) {
      const long v = bpp == 2 ? (p[2 * i] << 8) | p[2 * i + 1] : p[i];
      img.pixels[i] = std::min(1.0, static_cast<double>(v) / maxval);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i)
      img.pixels[i] = std::min(1.0, static_cast<double>(r.next_int()) / maxval);
  }
  return img;
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::unreadable_image, "cannot open image " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_pgm(bytes);
}

std::vector<unsigned char> encode_pgm(const GrayImage& image) {
  const std::string header =
      "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  std::vector<unsigned char> out(header.begin(), header.end());
  out.reserve(out.size() + image.pixels.size());
  for (double v : image.pixels)
    out.push_back(static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
  return out;
}

void write_pgm(const GrayImage& image, const std::filesystem::path& path) {
  const auto bytes = encode_pgm(image);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io_failure, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::io_failure, "write failed for " + path.string());
}

SimulatedImage simulate_image(const LensSystem& system, const GrayImage& source,
                              const ImageSimOptions& options) {
  if (source.width <= 0 || source.height <= 0)
    throw Error(ErrorKind::unreadable_image, "empty source image");
  const int s = options.out_size;
  if (s < 1 || s > kMaxOutput)
    throw Error(ErrorKind::invalid_argument, "output size must be in [1, 4096]");

  const double wl = system.primary_wavelength();
  const ParaxialSummary summary = system_summary(system, wl);
  const double tmax = std::tan(system.max_field() * std::numbers::pi / 180.0);
  const double half_diag = 0.5 * std::hypot(source.width, source.height);
  const double tan_per_px = tmax / half_diag;
  const int long_side = std::max(source.width, source.height);
  // Output pitch on the image plane, mm.
  const double pitch = std::abs(summary.effl) * tan_per_px * long_side / s;

  SimulatedImage sim;
  sim.pixel_um = pitch * 1e3;
  std::vector<double> acc(static_cast<std::size_t>(s) * s, 0.0);

  if (options.mode == ImageMode::geometric) {
    if (!(tmax > 0.0)) throw Error(ErrorKind::invalid_argument, "geometric image needs a non-zero field");
    const double scale = static_cast<double>(s) / long_side;
    const int rays = options.rays_per_pixel > 0
                         ? options.rays_per_pixel
                         : std::max(16, static_cast<int>(std::ceil(4.0 * scale * scale)));
    const LaunchFrame corner = paraxial_launch(system, {tmax, tmax, 1.0});
    const auto constants = kernels::surface_constants(system, wl);
    std::mt19937_64 rng(options.seed);

    kernels::RayBatch batch(kChunk);
    std::vector<double> weight(kChunk);
    std::size_t fill = 0;
    auto flush = [&] {
      batch.truncate(fill);
      kernels::trace_batch(constants, batch);
      for (std::size_t i = 0; i < fill; ++i) {
        if (batch.status[i] != kernels::kCompleted) continue;
        ++sim.arrived;
        const double ox = s * 0.5 + batch.x[i] / pitch;
        const double oy = s * 0.5 - batch.y[i] / pitch;
        if (ox < 0.0 || oy < 0.0 || ox >= s || oy >= s) continue;
        acc[static_cast<std::size_t>(oy) * s + static_cast<std::size_t>(ox)] += weight[i];
      }
      fill = 0;
      batch.resize(kChunk);
    };

    for (int j = 0; j < source.height; ++j) {
      for (int i = 0; i < source.width; ++i) {
        const double v = source.at(i, j);
        if (v <= 0.0) continue;
        for (int r = 0; r < rays; ++r) {
          const double xs = i + uniform(rng) - 0.5 * source.width;
          const double ys = 0.5 * source.height - (j + uniform(rng));
          const double rho = std::sqrt(uniform(rng));
          const double phi = 2.0 * std::numbers::pi * uniform(rng);
          LaunchFrame f = corner;
          f.direction = normalized(Vec3{xs * tan_per_px, ys * tan_per_px, 1.0});
          batch.set(fill, f.origin(rho * std::cos(phi), rho * std::sin(phi)), f.direction);
          weight[fill] = v / rays;
          ++sim.launched;
          if (++fill == kChunk) flush();
        }
      }
    }
    if (fill > 0) flush();
    sim.efficiency_percent =
        sim.launched == 0 ? 100.0 : 100.0 * static_cast<double>(sim.arrived) / sim.launched;
  } else {
    // Ideal (nearest-sample) mapping of the source onto the output grid.
    const double step = static_cast<double>(long_side) / s;
    std::vector<double> ideal(acc.size(), 0.0);
    for (int oy = 0; oy < s; ++oy) {
      const double ys = (s * 0.5 - (oy + 0.5)) * step;
      const int j = static_cast<int>(std::floor(0.5 * source.height - ys));
      if (j < 0 || j >= source.height) continue;
      for (int ox = 0; ox < s; ++ox) {
        const double xs = (ox + 0.5 - s * 0.5) * step;
        const int i = static_cast<int>(std::floor(xs + 0.5 * source.width));
        if (i < 0 || i >= source.width) continue;
        ideal[static_cast<std::size_t>(oy) * s + ox] = source.at(i, j);
      }
    }

    const Psf psf = psf_and_strehl(system, 0.0, options.psf_grid, options.psf_pad);
    const double reach_um = std::min(0.5 * psf.size * psf.pixel_um, 12.0 * wl * psf.fno);
    const int h = std::min(static_cast<int>(std::floor(reach_um / sim.pixel_um)), s);
    const int k = 2 * h + 1;
    sim.kernel_half = h;
    sim.kernel.assign(static_cast<std::size_t>(k) * k, 0.0);
    double total = 0.0;
    const double c = psf.size / 2;
    for (int j = 0; j < k; ++j) {
      for (int i = 0; i < k; ++i) {
        // Bilinear sample of the PSF grid (x to the right, y down on both grids).
        const double u = c + (i - h) * sim.pixel_um / psf.pixel_um;
        const double v = c + (j - h) * sim.pixel_um / psf.pixel_um;
        const int u0 = static_cast<int>(std::floor(u)), v0 = static_cast<int>(std::floor(v));
        if (u0 < 0 || v0 < 0 || u0 + 1 >= psf.size || v0 + 1 >= psf.size) continue;
        const double fu = u - u0, fv = v - v0;
        auto at = [&](int x, int y) { return psf.intensity[static_cast<std::size_t>(y) * psf.size + x]; };
        const double val = (1 - fu) * (1 - fv) * at(u0, v0) + fu * (1 - fv) * at(u0 + 1, v0) +
                           (1 - fu) * fv * at(u0, v0 + 1) + fu * fv * at(u0 + 1, v0 + 1);
        sim.kernel[static_cast<std::size_t>(j) * k + i] = val;
        total += val;
      }
    }
    if (!(total > 0.0)) {
      std::fill(sim.kernel.begin(), sim.kernel.end(), 0.0);
      sim.kernel[static_cast<std::size_t>(h) * k + h] = total = 1.0;
    }
    for (double& v : sim.kernel) v /= total;
    acc = convolve(ideal, s, sim.kernel, h);
    sim.launched = sim.arrived = 0;
    sim.efficiency_percent = 100.0;
  }
  sim.raw = acc;
  sim.image = normalized(acc, s);
  return sim;
}

}  // namespace seqtrace
