#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "seqtrace/system.hpp"

namespace seqtrace {

// Grayscale image, row-major with the top row first, values in [0, 1].
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;

  double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

// Binary (P5, 8- or 16-bit) or ASCII (P2) graymap. Throws UnreadableImage.
GrayImage read_pgm(const std::filesystem::path& path);
GrayImage parse_pgm(const std::vector<unsigned char>& bytes);
// 8-bit P5; values are clamped to [0, 1] and rounded. Throws IoFailure.
void write_pgm(const GrayImage& image, const std::filesystem::path& path);
std::vector<unsigned char> encode_pgm(const GrayImage& image);

enum class ImageMode { geometric, diffraction };

struct ImageSimOptions {
  ImageMode mode = ImageMode::geometric;
  int out_size = 512;
  int rays_per_pixel = 0;  // geometric mode; 0 picks a density from the output scale
  std::uint64_t seed = 0;
  int psf_grid = 64;
  int psf_pad = 4;
};

struct SimulatedImage {
  GrayImage image;               // out_size², normalized to its own peak
  std::vector<double> raw;       // unnormalized intensities
  double efficiency_percent = 100.0;
  std::uint64_t launched = 0;
  std::uint64_t arrived = 0;
  double pixel_um = 0.0;         // output sampling on the image plane
  int kernel_half = 0;           // diffraction mode: PSF kernel is (2h+1)²
  std::vector<double> kernel;    // unit-sum PSF resampled to the output pitch
};

// The source's half-diagonal maps to the maximum system field (rectilinear).
// The output is shown upright and covers the ideal image of the source.
SimulatedImage simulate_image(const LensSystem& system, const GrayImage& source,
                              const ImageSimOptions& options);

}  // namespace seqtrace
