#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "parafrac/empirical.hpp"
#include "parafrac/system.hpp"

namespace parafrac {

struct Image8 {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> px;  // row-major, row 0 at the top

  Image8(int w, int h);
  std::uint8_t& at(int x, int y) { return px[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const {
    return px[static_cast<std::size_t>(y) * width + x];
  }
};

/// Binary PGM (P5), max value 255.
void write_pgm(const Image8& img, std::ostream& out);
/// Binary PPM (P6) with equal RGB channels.
void write_ppm(const Image8& img, std::ostream& out);

/// Level-n cylinder rectangles filled white on black. A pixel is on iff its
/// center lies in some closed cylinder rectangle.
Image8 render_cylinders(const CarpetSystem& sys, int level, int width, int height,
                        std::size_t budget = 1 << 22);

/// Chaos-game histogram, gamma-mapped grayscale (white = dense).
struct DensitySpec {
  std::size_t samples = 1'000'000;
  ChaosOptions chaos;
  double gamma = 2.2;
};
Image8 render_density(const CarpetSystem& sys, const SymbolicMeasure& measure,
                      int width, int height, const DensitySpec& spec);

}  // namespace parafrac
