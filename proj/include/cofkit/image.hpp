#pragma once

#include <cstddef>
#include <vector>

#include "cofkit/error.hpp"

namespace cofkit {

/// Dense row-major raster of double samples with interleaved channels.
///
/// The tag parameter keeps color, gray and Lab rasters apart at compile time;
/// the storage layout is identical for all of them.
template <int Channels, typename Tag>
struct Raster {
  static constexpr int kChannels = Channels;

  int width = 0;
  int height = 0;
  std::vector<double> data;

  Raster() = default;
  Raster(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h * Channels, fill) {
    if (w < 0 || h < 0) throw Error("raster dimensions must be non-negative");
  }

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  bool empty() const { return pixel_count() == 0; }

  double& at(int x, int y, int c = 0) {
    return data[(static_cast<std::size_t>(y) * width + x) * Channels + c];
  }
  double at(int x, int y, int c = 0) const {
    return data[(static_cast<std::size_t>(y) * width + x) * Channels + c];
  }
  double* pixel(std::size_t index) { return data.data() + index * Channels; }
  const double* pixel(std::size_t index) const { return data.data() + index * Channels; }

  template <typename OtherTag>
  bool same_size(const Raster<Channels, OtherTag>& other) const {
    return width == other.width && height == other.height;
  }

  friend bool operator==(const Raster&, const Raster&) = default;
};

struct ColorTag;
struct GrayTag;
struct LabTag;

/// RGB samples in [0,1].
using ColorImage = Raster<3, ColorTag>;
/// Single-channel samples in [0,1]; level() gives the 0-255 view.
using GrayImage = Raster<1, GrayTag>;
/// CIELAB triplets, L in [0,100].
using LabImage = Raster<3, LabTag>;

/// 8-bit level of a [0,1] sample, rounding half up.
int to_level(double sample);

/// Integer 0-255 view of a gray image.
std::vector<int> gray_levels(const GrayImage& img);

/// Replicates a gray image into three equal channels.
ColorImage gray_to_color(const GrayImage& img);

/// Mean of squared per-sample differences. Throws DimensionMismatch.
template <int C, typename Tag>
double mse(const Raster<C, Tag>& a, const Raster<C, Tag>& b) {
  if (!a.same_size(b)) throw DimensionMismatch("mse: image dimensions differ");
  if (a.data.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.data.size());
}

/// Boolean per-pixel inclusion flags.
struct RegionMask {
  int width = 0;
  int height = 0;
  std::vector<unsigned char> inside;

  RegionMask() = default;
  RegionMask(int w, int h, bool fill = true)
      : width(w), height(h), inside(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}

  bool at(int x, int y) const { return inside[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v) { inside[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
  std::size_t count() const;
  RegionMask complement() const;

  friend bool operator==(const RegionMask&, const RegionMask&) = default;
};

}  // namespace cofkit
