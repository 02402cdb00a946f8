#include "cofkit/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace cofkit {
namespace {

double unit(std::mt19937_64& rng) { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; }

// Box-Muller on the raw engine output keeps noise identical across standard
// library implementations.
double gaussian(std::mt19937_64& rng) {
  const double u1 = unit(rng);
  const double u2 = unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void fill_gray(ColorImage& img, int x, int y, double v) {
  for (int c = 0; c < 3; ++c) img.at(x, y, c) = v;
}

}  // namespace

const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names = {"two-region-checkerboard", "ramp", "step-stripes",
                                                 "star-field"};
  return names;
}

ColorImage make_fixture(const std::string& name, int width, int height, double noise_sigma,
                        std::uint64_t seed) {
  if (width < 1 || height < 1) throw Error("fixture: size must be positive");
  if (noise_sigma < 0.0) throw Error("fixture: noise sigma must be >= 0");
  std::mt19937_64 rng(seed);
  ColorImage img(width, height);

  if (name == "two-region-checkerboard") {
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const bool right = x >= width / 2;
        const bool odd = ((x / kCheckerCell) + (y / kCheckerCell)) % 2 == 1;
        fill_gray(img, x, y, kCheckerLevels[(right ? 2 : 0) + (odd ? 1 : 0)]);
      }
    }
  } else if (name == "ramp") {
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const double level = width > 1 ? std::round(255.0 * x / (width - 1)) : 0.0;
        fill_gray(img, x, y, level / 255.0);
      }
    }
  } else if (name == "step-stripes") {
    constexpr double levels[3] = {0.2, 0.5, 0.8};
    const int stripe = std::max(1, width / 8);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) fill_gray(img, x, y, levels[(x / stripe) % 3]);
    }
  } else if (name == "star-field") {
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) fill_gray(img, x, y, 0.05);
    }
    const std::size_t stars = std::max<std::size_t>(1, img.pixel_count() / 200);
    for (std::size_t s = 0; s < stars; ++s) {
      const int cx = static_cast<int>(rng() % static_cast<std::uint64_t>(width));
      const int cy = static_cast<int>(rng() % static_cast<std::uint64_t>(height));
      for (int y = std::max(0, cy - 1); y <= std::min(height - 1, cy + 1); ++y) {
        for (int x = std::max(0, cx - 1); x <= std::min(width - 1, cx + 1); ++x) fill_gray(img, x, y, 0.95);
      }
    }
  } else {
    throw Error("fixture: unknown name '" + name + "'");
  }

  if (noise_sigma > 0.0) {
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
      const double n = noise_sigma * gaussian(rng);
      double* px = img.pixel(i);
      for (int c = 0; c < 3; ++c) px[c] = std::clamp(px[c] + n, 0.0, 1.0);
    }
  }
  return img;
}

}  // namespace cofkit
