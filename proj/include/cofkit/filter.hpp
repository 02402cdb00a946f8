#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "cofkit/cooc.hpp"
#include "cofkit/image.hpp"
#include "cofkit/quantize.hpp"

namespace cofkit {

enum class IterationMode { Iterative, Rolling };

/// Spatial bandwidth used throughout: sigma_s^2 = 2 sqrt(15) + 1.
inline double default_sigma_s() { return std::sqrt(2.0 * std::sqrt(15.0) + 1.0); }

struct FilterParams {
  /// Window radius; 7 gives a 15x15 window.
  int window = 7;
  double sigma_s = default_sigma_s();
  /// Range bandwidth of the bilateral filter.
  double sigma_r = 0.1;
  int iterations = 1;
  IterationMode mode = IterationMode::Iterative;
  /// Include the spatial Gaussian in fb_cof.
  bool fb_spatial = true;

  void validate() const;
};

/// (2r+1)^2 weights exp(-d^2 / 2 sigma_s^2), center weight one.
struct SpatialKernel {
  int radius = 0;
  double sigma = 0.0;
  std::vector<double> weights;

  SpatialKernel(int radius, double sigma);
  double at(int dx, int dy) const {
    return weights[static_cast<std::size_t>(dy + radius) * (2 * radius + 1) + (dx + radius)];
  }
};

/// Range weights as used by the filters: M / max(M), rounded to single
/// precision. Output therefore does not change when M is multiplied by a
/// positive constant. Throws on negative or non-finite entries.
std::vector<double> canonical_weights(const PmiMatrix& m);

GrayImage gaussian_filter(const GrayImage& img, const FilterParams& params);
ColorImage gaussian_filter(const ColorImage& img, const FilterParams& params);

GrayImage bilateral(const GrayImage& img, const FilterParams& params);
ColorImage bilateral(const ColorImage& img, const FilterParams& params);

/// Co-occurrence filter on 0-255 levels with a 256 x 256 matrix. Pixels whose
/// weights all vanish are copied unchanged.
GrayImage cof_gray(const GrayImage& img, const PmiMatrix& m, const FilterParams& params);

/// Guided co-occurrence filter: weights G(p,q) M(T_p, T_q), one weight field
/// shared by all channels, averaging the neighbors I_q.
ColorImage guided_cof(const ColorImage& img, const GuidanceImage& guide, const PmiMatrix& m,
                      const FilterParams& params);
GrayImage guided_cof(const GrayImage& img, const GuidanceImage& guide, const PmiMatrix& m,
                     const FilterParams& params);

/// Guidance plus the matrix it indexes.
struct GuidedModel {
  Palette palette;
  GuidanceImage guide;
  PmiMatrix pmi;
};

/// Rebuilds guidance and matrix from an image (used by rolling iterations).
using ModelBuilder = std::function<GuidedModel(const ColorImage&)>;

struct IterationResult {
  ColorImage image;
  /// msd[i] = mse(J_{i+1}, J_i), J_0 being the input.
  std::vector<double> msd;
};

/// Applies guided_cof params.iterations times. Iterative mode keeps the
/// initial model; rolling mode asks `rebuild` for a new one from the current
/// output before every round after the first.
IterationResult iterate(const ColorImage& img, const GuidedModel& model, const FilterParams& params,
                        const ModelBuilder& rebuild = {});

/// Foreground/background filter: sum G (M_F I_p + M_B I_q) / sum G (M_F + M_B).
/// Both matrices share one normalization so their balance is kept.
ColorImage fb_cof(const ColorImage& img, const GuidanceImage& guide, const PmiMatrix& m_fg,
                  const PmiMatrix& m_bg, const FilterParams& params);

/// Blends color and gray per pixel by alpha = sum M_F(T_p,T_q) and
/// beta = sum M_B(T_p,T_q) over the window.
ColorImage selective_gray(const ColorImage& img, const GuidanceImage& guide, const PmiMatrix& m_fg,
                          const PmiMatrix& m_bg, const FilterParams& params);

}  // namespace cofkit
