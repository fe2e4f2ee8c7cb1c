#include "parafrac/render.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace parafrac {

Image8::Image8(int w, int h) : width(w), height(h) {
  if (w < 16 || w > 8192 || h < 16 || h > 8192) {
    throw std::invalid_argument("image dimensions must lie in [16, 8192]");
  }
  px.assign(static_cast<std::size_t>(w) * h, 0);
}

void write_pgm(const Image8& img, std::ostream& out) {
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.px.data()),
            static_cast<std::streamsize>(img.px.size()));
}

void write_ppm(const Image8& img, std::ostream& out) {
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  for (std::uint8_t v : img.px) {
    const char rgb[3] = {static_cast<char>(v), static_cast<char>(v),
                         static_cast<char>(v)};
    out.write(rgb, 3);
  }
}

Image8 render_cylinders(const CarpetSystem& sys, int level, int width, int height,
                        std::size_t budget) {
  if (level < 1) throw std::invalid_argument("render level must be >= 1");
  Image8 img(width, height);
  const auto words = enumerate_words(sys.size(), level, budget);
  for (const Word& w : words) {
    const Interval ix = image_interval(word_fmaps(sys, w));
    const Interval iy = image_interval(word_gmaps(sys, w));
    // pixel centers: x = (i+0.5)/W, y = 1-(j+0.5)/H
    const int i0 = static_cast<int>(std::ceil(ix.lo * width - 0.5));
    const int i1 = static_cast<int>(std::floor(ix.hi * width - 0.5));
    const int j0 = static_cast<int>(std::ceil((1.0 - iy.hi) * height - 0.5));
    const int j1 = static_cast<int>(std::floor((1.0 - iy.lo) * height - 0.5));
    for (int j = std::max(0, j0); j <= std::min(height - 1, j1); ++j) {
      for (int i = std::max(0, i0); i <= std::min(width - 1, i1); ++i) {
        img.at(i, j) = 255;
      }
    }
  }
  return img;
}

Image8 render_density(const CarpetSystem& sys, const SymbolicMeasure& measure,
                      int width, int height, const DensitySpec& spec) {
  Image8 img(width, height);
  const auto pts = chaos_game_sample(sys, measure, spec.samples, spec.chaos);
  std::vector<std::uint32_t> counts(img.px.size(), 0);
  for (const auto& p : pts) {
    const int i = std::clamp(static_cast<int>(std::floor(p.x * width)), 0, width - 1);
    const int j = std::clamp(static_cast<int>(std::floor((1.0 - p.y) * height)), 0,
                             height - 1);
    ++counts[static_cast<std::size_t>(j) * width + i];
  }
  const std::uint32_t max_count = *std::max_element(counts.begin(), counts.end());
  if (max_count == 0) return img;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) continue;
    const double v = std::pow(static_cast<double>(counts[k]) / max_count, 1.0 / spec.gamma);
    img.px[k] = static_cast<std::uint8_t>(std::clamp(std::lround(v * 255.0), 1L, 255L));
  }
  return img;
}

}  // namespace parafrac
