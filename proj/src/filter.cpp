#include "cofkit/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cofkit/color.hpp"
#include "cofkit/parallel.hpp"

namespace cofkit {
namespace {

constexpr int kRowGrain = 8;

// J_p = sum_q G(p,q) R(p,q) I_q / sum_q G(p,q) R(p,q) over the truncated
// window; a zero denominator copies I_p.
template <int C, typename RangeWeight>
void weighted_average(const double* src, int width, int height, const SpatialKernel& kernel,
                      RangeWeight range, double* dst) {
  const int r = kernel.radius;
  const int span = 2 * r + 1;
  parallel_chunks(height, kRowGrain, worker_count(), [&](int, int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      const int qy0 = std::max(0, y - r);
      const int qy1 = std::min(height - 1, y + r);
      for (int x = 0; x < width; ++x) {
        const std::size_t p = static_cast<std::size_t>(y) * width + x;
        const int qx0 = std::max(0, x - r);
        const int qx1 = std::min(width - 1, x + r);
        double num[C] = {};
        double den = 0.0;
        for (int qy = qy0; qy <= qy1; ++qy) {
          const double* g = kernel.weights.data() + static_cast<std::size_t>(qy - y + r) * span + r - x;
          for (int qx = qx0; qx <= qx1; ++qx) {
            const std::size_t q = static_cast<std::size_t>(qy) * width + qx;
            const double w = g[qx] * range(p, q);
            if (w == 0.0) continue;
            den += w;
            for (int c = 0; c < C; ++c) num[c] += w * src[q * C + c];
          }
        }
        for (int c = 0; c < C; ++c) dst[p * C + c] = den > 0.0 ? num[c] / den : src[p * C + c];
      }
    }
  });
}

template <typename Image, typename RangeWeight>
Image run_weighted(const Image& img, const FilterParams& params, RangeWeight range) {
  params.validate();
  const SpatialKernel kernel(params.window, params.sigma_s);
  Image out(img.width, img.height);
  weighted_average<Image::kChannels>(img.data.data(), img.width, img.height, kernel, range,
                                     out.data.data());
  return out;
}

template <typename Image>
Image gaussian_impl(const Image& img, const FilterParams& params) {
  return run_weighted(img, params, [](std::size_t, std::size_t) { return 1.0; });
}

template <typename Image>
Image bilateral_impl(const Image& img, const FilterParams& params) {
  if (!(params.sigma_r > 0.0)) throw Error("bilateral: sigma_r must be > 0");
  constexpr int C = Image::kChannels;
  const double inv = 1.0 / (2.0 * params.sigma_r * params.sigma_r);
  const double* src = img.data.data();
  return run_weighted(img, params, [=](std::size_t p, std::size_t q) {
    double d2 = 0.0;
    for (int c = 0; c < C; ++c) {
      const double d = src[p * C + c] - src[q * C + c];
      d2 += d * d;
    }
    return std::exp(-d2 * inv);
  });
}

template <typename Image>
Image guided_impl(const Image& img, const GuidanceImage& guide, const PmiMatrix& m,
                  const FilterParams& params) {
  if (guide.width != img.width || guide.height != img.height) {
    throw DimensionMismatch("guided_cof: guidance image size differs from input");
  }
  if (m.dim != guide.k) {
    throw DimensionMismatch("guided_cof: matrix is " + std::to_string(m.dim) + "x" +
                            std::to_string(m.dim) + " but guidance has k=" + std::to_string(guide.k));
  }
  const std::vector<double> table = canonical_weights(m);
  const int* labels = guide.labels.data();
  const double* t = table.data();
  const std::size_t dim = static_cast<std::size_t>(m.dim);
  return run_weighted(img, params, [=](std::size_t p, std::size_t q) {
    return t[static_cast<std::size_t>(labels[p]) * dim + labels[q]];
  });
}

void check_pair(const GuidanceImage& guide, const ColorImage& img, const PmiMatrix& fg,
                const PmiMatrix& bg, const char* who) {
  if (guide.width != img.width || guide.height != img.height) {
    throw DimensionMismatch(std::string(who) + ": guidance image size differs from input");
  }
  if (fg.dim != guide.k || bg.dim != guide.k) {
    throw DimensionMismatch(std::string(who) + ": matrices must be k x k with k=" +
                            std::to_string(guide.k));
  }
}

// Foreground and background tables scaled by one shared factor.
std::pair<std::vector<double>, std::vector<double>> joint_weights(const PmiMatrix& fg,
                                                                  const PmiMatrix& bg) {
  double top = 0.0;
  for (const PmiMatrix* m : {&fg, &bg}) {
    for (double v : m->values) {
      if (!std::isfinite(v) || v < 0.0) throw Error("matrix entries must be finite and >= 0");
      top = std::max(top, v);
    }
  }
  auto scale = [top](const PmiMatrix& m) {
    std::vector<double> t(m.values.size(), 0.0);
    if (top > 0.0) {
      for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<float>(m.values[i] / top);
    }
    return t;
  };
  return {scale(fg), scale(bg)};
}

}  // namespace

void FilterParams::validate() const {
  if (window < 0) throw Error("filter: window must be >= 0");
  if (!(sigma_s > 0.0)) throw Error("filter: sigma_s must be > 0");
  if (iterations < 0) throw Error("filter: iterations must be >= 0");
}

SpatialKernel::SpatialKernel(int r, double s) : radius(r), sigma(s) {
  if (r < 0) throw Error("spatial kernel: radius must be >= 0");
  if (!(s > 0.0)) throw Error("spatial kernel: sigma must be > 0");
  const int span = 2 * r + 1;
  weights.resize(static_cast<std::size_t>(span) * span);
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      weights[static_cast<std::size_t>(dy + r) * span + (dx + r)] =
          std::exp(-static_cast<double>(dx * dx + dy * dy) / (2.0 * s * s));
    }
  }
}

std::vector<double> canonical_weights(const PmiMatrix& m) {
  double top = 0.0;
  for (double v : m.values) {
    if (!std::isfinite(v) || v < 0.0) throw Error("matrix entries must be finite and >= 0");
    top = std::max(top, v);
  }
  std::vector<double> table(m.values.size(), 0.0);
  if (top == 0.0) return table;
  for (std::size_t i = 0; i < table.size(); ++i) table[i] = static_cast<float>(m.values[i] / top);
  return table;
}

GrayImage gaussian_filter(const GrayImage& img, const FilterParams& params) {
  return gaussian_impl(img, params);
}
ColorImage gaussian_filter(const ColorImage& img, const FilterParams& params) {
  return gaussian_impl(img, params);
}

GrayImage bilateral(const GrayImage& img, const FilterParams& params) {
  return bilateral_impl(img, params);
}
ColorImage bilateral(const ColorImage& img, const FilterParams& params) {
  return bilateral_impl(img, params);
}

GrayImage cof_gray(const GrayImage& img, const PmiMatrix& m, const FilterParams& params) {
  if (m.dim != 256) throw DimensionMismatch("cof_gray: matrix must be 256 x 256");
  GuidanceImage levels{img.width, img.height, 256, gray_levels(img)};
  return guided_impl(img, levels, m, params);
}

ColorImage guided_cof(const ColorImage& img, const GuidanceImage& guide, const PmiMatrix& m,
                      const FilterParams& params) {
  return guided_impl(img, guide, m, params);
}

GrayImage guided_cof(const GrayImage& img, const GuidanceImage& guide, const PmiMatrix& m,
                     const FilterParams& params) {
  return guided_impl(img, guide, m, params);
}

IterationResult iterate(const ColorImage& img, const GuidedModel& model, const FilterParams& params,
                        const ModelBuilder& rebuild) {
  params.validate();
  if (params.mode == IterationMode::Rolling && params.iterations > 1 && !rebuild) {
    throw Error("iterate: rolling mode needs a model builder");
  }
  IterationResult result{img, {}};
  GuidedModel current = model;
  for (int i = 0; i < params.iterations; ++i) {
    if (i > 0 && params.mode == IterationMode::Rolling) current = rebuild(result.image);
    ColorImage next = guided_cof(result.image, current.guide, current.pmi, params);
    result.msd.push_back(mse(next, result.image));
    result.image = std::move(next);
  }
  return result;
}

ColorImage fb_cof(const ColorImage& img, const GuidanceImage& guide, const PmiMatrix& m_fg,
                  const PmiMatrix& m_bg, const FilterParams& params) {
  params.validate();
  check_pair(guide, img, m_fg, m_bg, "fb_cof");
  const auto [tf, tb] = joint_weights(m_fg, m_bg);
  const SpatialKernel kernel(params.window, params.sigma_s);
  const int width = img.width;
  const int height = img.height;
  const int r = params.window;
  const std::size_t dim = static_cast<std::size_t>(guide.k);
  const double* src = img.data.data();
  ColorImage out(width, height);

  parallel_chunks(height, kRowGrain, worker_count(), [&](int, int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < width; ++x) {
        const std::size_t p = static_cast<std::size_t>(y) * width + x;
        const std::size_t row = static_cast<std::size_t>(guide.labels[p]) * dim;
        // J_p = I_p + sum w_B (I_q - I_p) / sum (w_F + w_B): exact I_p when M_B = 0.
        double num[3] = {};
        double den = 0.0;
        for (int qy = std::max(0, y - r); qy <= std::min(height - 1, y + r); ++qy) {
          for (int qx = std::max(0, x - r); qx <= std::min(width - 1, x + r); ++qx) {
            const std::size_t q = static_cast<std::size_t>(qy) * width + qx;
            const double g = params.fb_spatial ? kernel.at(qx - x, qy - y) : 1.0;
            const double wf = g * tf[row + guide.labels[q]];
            const double wb = g * tb[row + guide.labels[q]];
            den += wf + wb;
            if (wb == 0.0) continue;
            for (int c = 0; c < 3; ++c) num[c] += wb * (src[q * 3 + c] - src[p * 3 + c]);
          }
        }
        for (int c = 0; c < 3; ++c) {
          out.data[p * 3 + c] = den > 0.0 ? src[p * 3 + c] + num[c] / den : src[p * 3 + c];
        }
      }
    }
  });
  return out;
}

ColorImage selective_gray(const ColorImage& img, const GuidanceImage& guide, const PmiMatrix& m_fg,
                          const PmiMatrix& m_bg, const FilterParams& params) {
  params.validate();
  check_pair(guide, img, m_fg, m_bg, "selective_gray");
  const auto [tf, tb] = joint_weights(m_fg, m_bg);
  const GrayImage gray = rgb_to_gray(img);
  const int width = img.width;
  const int height = img.height;
  const int r = params.window;
  const std::size_t dim = static_cast<std::size_t>(guide.k);
  ColorImage out(width, height);

  parallel_chunks(height, kRowGrain, worker_count(), [&](int, int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < width; ++x) {
        const std::size_t p = static_cast<std::size_t>(y) * width + x;
        const std::size_t row = static_cast<std::size_t>(guide.labels[p]) * dim;
        double alpha = 0.0;
        double beta = 0.0;
        for (int qy = std::max(0, y - r); qy <= std::min(height - 1, y + r); ++qy) {
          for (int qx = std::max(0, x - r); qx <= std::min(width - 1, x + r); ++qx) {
            const std::size_t q = static_cast<std::size_t>(qy) * width + qx;
            alpha += tf[row + guide.labels[q]];
            beta += tb[row + guide.labels[q]];
          }
        }
        const double total = alpha + beta;
        for (int c = 0; c < 3; ++c) {
          const double color = img.data[p * 3 + c];
          out.data[p * 3 + c] = total > 0.0 ? color + beta * (gray.data[p] - color) / total : color;
        }
      }
    }
  });
  return out;
}

}  // namespace cofkit
