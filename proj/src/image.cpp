#include "cofkit/image.hpp"

#include <algorithm>
#include <cmath>

namespace cofkit {

int to_level(double sample) {
  const double scaled = std::floor(sample * 255.0 + 0.5);
  return static_cast<int>(std::clamp(scaled, 0.0, 255.0));
}

std::vector<int> gray_levels(const GrayImage& img) {
  std::vector<int> levels(img.data.size());
  std::transform(img.data.begin(), img.data.end(), levels.begin(), to_level);
  return levels;
}

ColorImage gray_to_color(const GrayImage& img) {
  ColorImage out(img.width, img.height);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    double* px = out.pixel(i);
    px[0] = px[1] = px[2] = img.data[i];
  }
  return out;
}

std::size_t RegionMask::count() const {
  return static_cast<std::size_t>(std::count(inside.begin(), inside.end(), 1));
}

RegionMask RegionMask::complement() const {
  RegionMask out = *this;
  for (auto& v : out.inside) v = v ? 0 : 1;
  return out;
}

}  // namespace cofkit
