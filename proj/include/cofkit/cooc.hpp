#pragma once

#include <vector>

#include "cofkit/image.hpp"
#include "cofkit/quantize.hpp"

namespace cofkit {

/// Symmetric, distance-weighted co-occurrence counts of value pairs.
struct CoocMatrix {
  int dim = 0;
  /// Spatial bandwidth used during collection.
  double sigma = 0.0;
  /// Collection window radius (Chebyshev).
  int window = 0;
  std::vector<double> values;

  double at(int a, int b) const { return values[static_cast<std::size_t>(a) * dim + b]; }
  double sum() const;
};

struct Histogram {
  std::vector<double> counts;

  int dim() const { return static_cast<int>(counts.size()); }
  double sum() const;
};

struct CoocStats {
  CoocMatrix cooc;
  Histogram hist;
};

/// Normalized co-occurrence, the range weight of the filter.
struct PmiMatrix {
  int dim = 0;
  double epsilon = 0.0;
  std::vector<double> values;

  double at(int a, int b) const { return values[static_cast<std::size_t>(a) * dim + b]; }
  PmiMatrix scaled(double factor) const;

  static PmiMatrix identity(int dim);
  static PmiMatrix ones(int dim);
};

/// Accumulates exp(-d^2 / 2 sigma^2) over every ordered pair of masked pixels
/// within Chebyshev distance `window`, self pairs included with weight one.
/// sigma == 0 keeps only the self pairs. Labels must lie in [0, dim).
///
/// Pair counts are kept as integers per distinct squared distance and only
/// weighted at the end, so the result is exactly symmetric and independent of
/// how rows are split between workers.
CoocStats collect_labels(const std::vector<int>& labels, int width, int height, int dim,
                         double sigma, int window, const RegionMask* mask = nullptr);

/// Gray path: 256 x 256 statistics over the 0-255 levels of the image.
CoocStats collect_gray(const GrayImage& img, double sigma, int window,
                       const RegionMask* mask = nullptr);

/// Quantized path: k x k statistics over the guidance labels.
CoocStats collect_hard(const GuidanceImage& guide, double sigma, int window,
                       const RegionMask* mask = nullptr);

/// K * C * K^T, evaluated in O(k^3).
CoocMatrix hard_to_soft(const CoocMatrix& hard, const AffinityMatrix& K);

/// K * h, the histogram at the same level of approximation as hard_to_soft.
Histogram soft_histogram(const Histogram& hard, const AffinityMatrix& K);

/// Direct pixel-pair evaluation of the soft co-occurrence with per-pixel
/// membership K(a, T_p). O(n r^2 k^2); meant as a test oracle on small inputs.
CoocMatrix brute_soft(const LabImage& img, const GuidanceImage& guide, const Palette& palette,
                      double sigma_r, double sigma, int window);

/// M(a,b) = C^(a,b) / (h^(a) h^(b) + epsilon) with C and h normalized to unit
/// mass. Throws when C holds no mass.
PmiMatrix normalize_pmi(const CoocMatrix& c, const Histogram& h, double epsilon = 1e-8);

}  // namespace cofkit
