#pragma once

// Naive reference implementations and random input generators used only by
// the tests. Nothing here calls into the filter or collection code paths.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "cofkit/cooc.hpp"
#include "cofkit/filter.hpp"
#include "cofkit/image.hpp"
#include "cofkit/quantize.hpp"

namespace cofkit::testing {

inline std::mt19937_64& rng_for(std::uint64_t seed) {
  static thread_local std::mt19937_64 rng;
  rng.seed(seed);
  return rng;
}

inline double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <typename Image>
Image random_image(int w, int h, std::mt19937_64& rng) {
  Image img(w, h);
  for (auto& v : img.data) v = uniform(rng);
  return img;
}

/// Gray image whose samples are exact 8-bit levels.
inline GrayImage random_levels(int w, int h, int levels, std::mt19937_64& rng) {
  GrayImage img(w, h);
  for (auto& v : img.data) v = static_cast<double>(rng() % levels) / 255.0;
  return img;
}

inline GuidanceImage random_guide(int w, int h, int k, std::mt19937_64& rng) {
  GuidanceImage g{w, h, k, std::vector<int>(static_cast<std::size_t>(w) * h)};
  for (auto& l : g.labels) l = static_cast<int>(rng() % k);
  return g;
}

inline Palette random_palette(int k, std::mt19937_64& rng) {
  Palette p;
  for (int i = 0; i < k; ++i) {
    p.centers.push_back({100.0 * uniform(rng), 200.0 * uniform(rng) - 100.0, 200.0 * uniform(rng) - 100.0});
  }
  p.requested_k = k;
  return p;
}

/// Symmetric random matrix whose entries are floats in (0, 1] with the largest
/// exactly 1, so the filters' weight canonicalization leaves it unchanged.
inline PmiMatrix random_pmi(int dim, std::mt19937_64& rng) {
  PmiMatrix m{dim, 0.0, std::vector<double>(static_cast<std::size_t>(dim) * dim)};
  for (int a = 0; a < dim; ++a) {
    for (int b = a; b < dim; ++b) {
      const double v = static_cast<float>(0.05 + 0.9 * uniform(rng));
      m.values[a * dim + b] = m.values[b * dim + a] = v;
    }
  }
  m.values[0] = 1.0;
  return m;
}

/// Ordered-pair enumeration of the co-occurrence sum, one pair at a time.
inline CoocMatrix naive_cooc(const std::vector<int>& labels, int w, int h, int dim, double sigma,
                             int window, const RegionMask* mask = nullptr) {
  CoocMatrix c{dim, sigma, window, std::vector<double>(static_cast<std::size_t>(dim) * dim, 0.0)};
  for (int py = 0; py < h; ++py)
    for (int px = 0; px < w; ++px)
      for (int qy = 0; qy < h; ++qy)
        for (int qx = 0; qx < w; ++qx) {
          if (std::abs(px - qx) > window || std::abs(py - qy) > window) continue;
          if (mask && (!mask->at(px, py) || !mask->at(qx, qy))) continue;
          const double d2 = (px - qx) * (px - qx) + (py - qy) * (py - qy);
          double wgt = d2 == 0 ? 1.0 : (sigma > 0 ? std::exp(-d2 / (2 * sigma * sigma)) : 0.0);
          c.values[labels[py * w + px] * dim + labels[qy * w + qx]] += wgt;
        }
  return c;
}

/// The filter sum evaluated literally: every q in the truncated window, weight
/// exp(-d^2 / 2 sigma_s^2) * range(p, q).
template <typename Image>
Image naive_filter(const Image& img, int window, double sigma_s,
                   const std::function<double(int, int)>& range) {
  constexpr int C = Image::kChannels;
  Image out(img.width, img.height);
  for (int py = 0; py < img.height; ++py)
    for (int px = 0; px < img.width; ++px) {
      double num[C] = {};
      double den = 0.0;
      for (int qy = py - window; qy <= py + window; ++qy)
        for (int qx = px - window; qx <= px + window; ++qx) {
          if (qx < 0 || qy < 0 || qx >= img.width || qy >= img.height) continue;
          const double d2 = (px - qx) * (px - qx) + (py - qy) * (py - qy);
          const double w = std::exp(-d2 / (2 * sigma_s * sigma_s)) *
                           range(py * img.width + px, qy * img.width + qx);
          den += w;
          for (int c = 0; c < C; ++c) num[c] += w * img.at(qx, qy, c);
        }
      for (int c = 0; c < C; ++c) out.at(px, py, c) = den > 0 ? num[c] / den : img.at(px, py, c);
    }
  return out;
}

template <typename Image>
double max_abs_diff(const Image& a, const Image& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double relative_frobenius(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace cofkit::testing
