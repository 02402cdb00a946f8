#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cofkit/image.hpp"

namespace cofkit {

using LabColor = std::array<double, 3>;

/// k cluster centers in Lab space.
struct Palette {
  std::vector<LabColor> centers;
  std::uint64_t seed = 42;
  /// k requested by the caller; centers.size() is the effective k.
  int requested_k = 0;

  int k() const { return static_cast<int>(centers.size()); }
  friend bool operator==(const Palette&, const Palette&) = default;
};

/// Per-pixel cluster labels (the guidance image).
struct GuidanceImage {
  int width = 0;
  int height = 0;
  int k = 0;
  std::vector<int> labels;

  int at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
  friend bool operator==(const GuidanceImage&, const GuidanceImage&) = default;
};

/// Row-stochastic Gaussian affinity between cluster centers.
struct AffinityMatrix {
  int k = 0;
  double sigma_r = 0.0;
  std::vector<double> values;

  double at(int a, int b) const { return values[static_cast<std::size_t>(a) * k + b]; }
};

struct KMeansOptions {
  int k = 32;
  int grid_spacing = 10;
  std::uint64_t seed = 42;
  int max_iterations = 50;
  double tolerance = 1e-4;
};

struct KMeansResult {
  Palette palette;
  int iterations = 0;
  /// Sum of squared sample-to-center distances after each assignment step.
  std::vector<double> objective;
};

/// k-means++ seeding plus Lloyd iterations over the pixels on a regular grid.
/// When the grid holds fewer distinct colors than k, k is reduced to that
/// count (see Palette::requested_k).
KMeansResult kmeans(const LabImage& img, const KMeansOptions& options);

inline Palette kmeans_palette(const LabImage& img, int k, int grid_spacing, std::uint64_t seed) {
  return kmeans(img, {k, grid_spacing, seed}).palette;
}

/// Nearest center per pixel; ties go to the lowest index.
GuidanceImage assign_hard(const LabImage& img, const Palette& palette);

/// K(a,b) = exp(-|c_a - c_b|^2 / 2 sigma_r^2) / Z_a, rows summing to one.
/// sigma_r == 0 gives the identity.
AffinityMatrix cluster_affinity(const Palette& palette, double sigma_r);

/// Mean distance from each center to its nearest other center.
double default_sigma_r(const Palette& palette);

std::string palette_to_json(const Palette& palette);
Palette palette_from_json(const std::string& text);

}  // namespace cofkit
