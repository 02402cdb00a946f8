#include "cofkit/color.hpp"

#include <cmath>

namespace cofkit {
namespace {

// D65 reference white for the 2-degree observer.
constexpr double kWhiteX = 0.95047;
constexpr double kWhiteY = 1.00000;
constexpr double kWhiteZ = 1.08883;

double srgb_to_linear(double v) {
  return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
  constexpr double delta = 6.0 / 29.0;
  if (t > delta * delta * delta) return std::cbrt(t);
  return t / (3.0 * delta * delta) + 4.0 / 29.0;
}

}  // namespace

void srgb_to_lab(const double rgb[3], double lab[3]) {
  const double r = srgb_to_linear(rgb[0]);
  const double g = srgb_to_linear(rgb[1]);
  const double b = srgb_to_linear(rgb[2]);

  const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;

  const double fx = lab_f(x / kWhiteX);
  const double fy = lab_f(y / kWhiteY);
  const double fz = lab_f(z / kWhiteZ);

  lab[0] = 116.0 * fy - 16.0;
  lab[1] = 500.0 * (fx - fy);
  lab[2] = 200.0 * (fy - fz);
}

LabImage rgb_to_lab(const ColorImage& img) {
  LabImage out(img.width, img.height);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) srgb_to_lab(img.pixel(i), out.pixel(i));
  return out;
}

GrayImage rgb_to_gray(const ColorImage& img) {
  GrayImage out(img.width, img.height);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const double* px = img.pixel(i);
    out.data[i] = 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
  }
  return out;
}

}  // namespace cofkit
